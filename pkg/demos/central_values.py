"""Central values L(1/2, nu_{q,omega}) for the first family members, with both checks."""

import sys

from quartic_hecke.hecke import make_spec
from quartic_hecke.lvalues import A_value, central_value
from quartic_hecke.moments import family


def main(X: float = 300):
    print(f"{'q':>8} {'w':>2} {'L(1/2)':>34} {'err':>8} {'U spread':>9} {'|L|^2-2A':>9}")
    for q in family(X)[:6]:
        for w in (0, 1, 4):
            spec = make_spec(q, w)
            recs = [central_value(spec, U) for U in (0.25, 1.0, 4.0)]
            spread = max(abs(r.value - recs[1].value) for r in recs)
            a = A_value(spec)
            L = recs[1].value
            print(f"{str(q):>8} {w:2d} {L.real:+.14f}{L.imag:+.14f}i {recs[1].err:8.1e} "
                  f"{spread:9.1e} {abs(abs(L) ** 2 - 2 * a.value):9.1e}")


if __name__ == "__main__":
    main(float(sys.argv[1]) if len(sys.argv) > 1 else 300)
