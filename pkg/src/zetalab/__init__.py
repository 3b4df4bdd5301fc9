"""zetalab: numerical laboratory for zero-detecting Dirichlet polynomials.

Subpackages cover the smooth dyadic weight and its Mellin transform
(:mod:`zetalab.weights`), sieved arithmetic tables (:mod:`zetalab.arith`),
extremal power-sum search with certified grids (:mod:`zetalab.powersum`),
zero tables, clustering and half-isolation predicates
(:mod:`zetalab.zerosets`), prime-sum detectors and the length dichotomy
(:mod:`zetalab.detectors`), and reproducible experiment drivers
(:mod:`zetalab.experiments`). The console entry point lives in
:mod:`zetalab.cli`.
"""

from ._kernels import BACKEND as kernel_backend

__version__ = "0.1.0"

__all__ = ["kernel_backend", "__version__"]
