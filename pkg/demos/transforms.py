"""Formal and integral alpha-Laplace/Borel transforms side by side.

    python demos/transforms.py
"""
import numpy as np
from scipy.special import gamma

from weightseq.kernels import AccuracyError, BorelPath, borel_transform, inverse_one_plus, laplace_transform, mittag_leffler, monomial
from weightseq.series import FormalSeries, formal_borel, formal_laplace


def main() -> None:
    alpha = 0.5
    print(f"alpha = {alpha}\n")

    a = FormalSeries(np.array([(-1.0) ** p for p in range(8)], complex))
    la = formal_laplace(a, alpha)
    print("formal Laplace multiplies a_p by Gamma(1 + alpha p):")
    print("  ", np.round(la.coeffs.real, 4))
    print("formal Borel undoes it exactly:", np.allclose(formal_borel(la, alpha).coeffs, a.coeffs, rtol=1e-14))

    print("\nintegral Laplace of u^p at z = 0.3 against Gamma(1 + alpha p) z^p:")
    for p in range(5):
        r = laplace_transform(monomial(p), alpha, 0.0, 0.3)
        exact = gamma(1 + alpha * p) * 0.3**p
        print(f"  p={p}: {r.value.real:.12f}  exact {exact:.12f}  error estimate {r.error:.1e}")

    print("\nintegral Borel of 1/(1+z) is E_alpha(-u):")
    path = BorelPath(0.0, alpha, 2.0)
    for u in (0.2, 1.0, 3.0):
        r = borel_transform(inverse_one_plus(), alpha, 0.0, path, u)
        print(f"  u={u}: {r.value.real:.12f}  E_alpha(-u) = {mittag_leffler(alpha, -u).real:.12f}")

    print("\nwith the arc at |z| = 0.5 the kernel reaches exp(36) there and the legs cancel:")
    try:
        borel_transform(inverse_one_plus(), alpha, 0.0, BorelPath(0.0, alpha, 0.5), 3.0)
    except AccuracyError as exc:
        print("  ", exc)


if __name__ == "__main__":
    main()
