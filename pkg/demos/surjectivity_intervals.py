"""Classify surjectivity intervals and extension operators for a few sequences,
then check one uniform asymptotic expansion.

    python demos/surjectivity_intervals.py
"""
import numpy as np

from weightseq import catalog
from weightseq.asymptotics import AsymptoticClaim, GridSpec, fit_constants, verify_uniform_expansion
from weightseq.conditions import check_beta2, check_dc, check_lc, check_mg, check_snq
from weightseq.indices import estimate_gamma
from weightseq.kernels import Sector, inverse_one_plus
from weightseq.sequence import make_sequence
from weightseq.series import FormalSeries
from weightseq.surjectivity import classify

N = 10**4


def report(cid, **params):
    M = catalog.build(cid, **params)
    verdicts = {"lc": check_lc(M, N), "dc": check_dc(M, N), "snq": check_snq(M, N), "mg": check_mg(M, N),
                "beta2": check_beta2(M, N=N)}
    rep = classify(M, verdicts, {"gamma": estimate_gamma(M, N)})
    print(f"{M.label}: rules {rep.rules_applied}")
    for name, b in rep.intervals.items():
        print(f"  {name:10} {str(b.certified_subset):>12} <= S <= {str(b.certified_superset):<12} {b.boundary_status}")
    print("  extension operators:", ", ".join(f"r={e.opening:g}: {e.status}" for e in rep.extension_ops))


def main() -> None:
    for cid, params in (("gevrey", {"alpha": 1.0}), ("gevrey", {"alpha": 1.5}), ("q_gevrey", {"q": 2.0}),
                        ("pure_log", {"beta": 1.0})):
        report(cid, **params)
        print()

    print("1/(1+z) against its Taylor series on the sector |arg z| < pi/4, |z| < 1, constant weights:")
    const = make_sequence(log_m=np.zeros(32), label="constant")
    series = FormalSeries(np.array([(-1.0) ** p for p in range(25)], complex))
    sector, grid = Sector(0.0, 0.5, 1.0), GridSpec(max_order=24)
    C, A = fit_constants(inverse_one_plus(), series, const, sector, grid)
    v = verify_uniform_expansion(AsymptoticClaim(inverse_one_plus(), series, const, C, A, sector), grid)
    print(f"  fitted C = {C:.4f}, A = {A:.4f}; verdict {v.verdict.value}, worst ratio {v.worst_ratio:.4f}")


if __name__ == "__main__":
    main()
