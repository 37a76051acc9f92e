"""Small second-moment scan, census and mollified moment (a few minutes on one core)."""

from quartic_hecke.moments import (
    euler_constant, mollified_moments, nonvanishing_census, second_moment_experiment,
)


def main():
    for w in (0, 1, 4):
        C, ec = euler_constant("C", w)
        D, ed = euler_constant("D", w)
        print(f"omega={w}: C = {C:.10f} (±{ec:.0e}), D = {D:.10f} (±{ed:.0e})")

    rep = second_moment_experiment([1e3, 3e3, 1e4], 0, mutual_rate=0.05)
    print("\nX        members  S2/(2 D F(0) X)")
    for win in rep.windows:
        print(f"{win.X:8.0f} {win.family_size:7d}  {win.ratio:.4f}")
    print(f"fitted slope against log X: {rep.slope:.3f}, intercept {rep.intercept:.3f}")
    print(f"mutual |L|^2 vs 2A checks: {len(rep.mutual_checks)}, "
          f"all within err: {all(d <= b for _, d, b in rep.mutual_checks)}")

    c = nonvanishing_census(3e3, 0)
    print(f"\ncensus X=3e3: {c.nonzero}/{c.total} nonzero, {c.undecidable} undecidable")

    mm = mollified_moments(3e3, 3e3 ** 0.3, omega=0)
    print(f"mollified, M = X^0.3: |S1|^2 / (S2 * sum F) = {mm.cs_ratio:.4f}")


if __name__ == "__main__":
    main()
