"""maxker: q^s-polinomios linealizados con núcleo máximo sobre cuerpos finitos."""

import sys
from pathlib import Path

_CORE_DIR = Path(__file__).resolve().parent
if str(_CORE_DIR) not in sys.path:
    sys.path.insert(0, str(_CORE_DIR))

from codec import parse_field, parse_poly  # noqa: E402
from gf import make_field  # noqa: E402
from linpoly import LinearizedPoly, kernel_basis  # noqa: E402
from maxkernel import is_maximum_kernel, splitting_field_degree  # noqa: E402

__all__ = [
    "parse_field",
    "parse_poly",
    "make_field",
    "LinearizedPoly",
    "kernel_basis",
    "is_maximum_kernel",
    "splitting_field_degree",
]
