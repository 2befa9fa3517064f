"""ncdiffop: an exact kernel for noncommutative differential operators.

Finite-dimensional first-order calculi with bimodule connections, the
associative algebra of differential operators on vector-field tensor powers,
its crossing into the centre of the bimodule-connection category, and Sobolev
Gram matrices - all over exact rational (or Gaussian rational) arithmetic.
"""

from .bundle import BUILTIN_NAMES, Bundle, load_builtin, load_bundle, resolve_bundle
from .report import ValidationError
from .scalars import Scalar, sc
from .verify import SUITE_NAMES, verify_all

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES",
    "Bundle",
    "SUITE_NAMES",
    "Scalar",
    "ValidationError",
    "load_builtin",
    "load_bundle",
    "resolve_bundle",
    "sc",
    "verify_all",
    "__version__",
]
