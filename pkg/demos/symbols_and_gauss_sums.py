"""Quartic residue symbols and Gauss sums on a few small moduli."""

from quartic_hecke.gauss_sums import LamFrac, gauss4_direct, gauss4_fast
from quartic_hecke.gaussint import GaussInt, enumerate_primary
from quartic_hecke.quartic import quartic_symbol_euler, quartic_symbol_fast


def main():
    c = GaussInt(-1, -2)
    for a in (GaussInt(2), GaussInt(0, 1), GaussInt(1, 1), GaussInt(-3)):
        print(f"({a} / {c})_4 = {quartic_symbol_fast(a, c)}  (Euler: {quartic_symbol_euler(a, c)})")

    print("\nc        N(c)   g4(1, c) fast                    |g4|^2 / N(c)")
    for c in list(enumerate_primary(120))[1:12]:
        g = gauss4_fast(1, c)
        d = gauss4_direct(1, c)
        assert abs(g.value - d.value) <= g.err + d.err
        print(f"{str(c):8} {c.norm():5}  {g.value.real:+.6f}{g.value.imag:+.6f}i"
              f"   {abs(g.value) ** 2 / c.norm():.6f}")

    nu = LamFrac(GaussInt(1), 2)
    print(f"\ng4(lam^-2, 3+2i) = {gauss4_fast(nu, GaussInt(3, 2)).value:.6f}")


if __name__ == "__main__":
    main()
