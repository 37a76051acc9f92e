"""Coprimality-reduction identities for the series psi over the fixed parameter matrix."""

from quartic_hecke.metaplectic import STANDARD_MATRIX, verify_corollary62, verify_lemma61


def main(s=2.0, cutoff=3000):
    print("row  part   discrepancy     bound   corrected  printed")
    for i, (a, b, c, d, r, w, v) in enumerate(STANDARD_MATRIX[:8]):
        for part in ("i", "ii", "iii", "iv"):
            fixed = verify_lemma61(part, a * b, c * d, r, s, w, v, cutoff)
            old = verify_lemma61(part, a * b, c * d, r, s, w, v, cutoff, variant="printed")
            print(f"{i:3d}  {part:5}  {fixed.discrepancy:11.2e} {fixed.bound:9.2e}   "
                  f"{'PASS' if fixed.passed else 'FAIL':9}  {'PASS' if old.passed else 'FAIL'}")
        ck = verify_corollary62(a, b, c, d, r, s, w, v, cutoff)
        print(f"{i:3d}  cor    {ck.discrepancy:11.2e} {ck.bound:9.2e}   {'PASS' if ck.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
