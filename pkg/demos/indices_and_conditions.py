"""Walk the catalog: growth conditions and growth indices of each sample sequence.

    python demos/indices_and_conditions.py [N]
"""
import sys

from weightseq import catalog
from weightseq.conditions import check_dc, check_lc, check_mg, check_snq
from weightseq.indices import index_chain


def fmt(e):
    return "inf" if e.infinite else f"{e.value:.3f}"


def main(N: int = 10**4) -> None:
    print(f"truncation N = {N}\n")
    print(f"{'sequence':34} {'lc':>5} {'dc':>5} {'mg':>5} {'snq':>5}   gamma  omega  beta(m) alpha(m)")
    for cid, params in catalog.SAMPLE_INSTANCES:
        M = catalog.build(cid, **params)
        v = [f(M, N).verdict.value[:4] for f in (check_lc, check_dc, check_mg, check_snq)]
        c = index_chain(M, N)
        idx = [fmt(c[k]) for k in ("gamma", "omega", "matuszewska_lower", "matuszewska_upper")]
        print(f"{M.label:34} " + " ".join(f"{x:>5}" for x in v) + "   " + "  ".join(f"{x:>6}" for x in idx))
    print("\nEvery row should satisfy gamma ~ beta(m) <= omega <= alpha(m);")
    print("pure_log has gamma = 0 and fails (snq); q_gevrey has every index infinite and fails (mg).")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10**4)
