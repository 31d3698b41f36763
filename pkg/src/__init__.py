"""Second-order rewriting systems, cost-size interpretations and oracle machines."""

from .interp import check_poly_bounded, check_system, load_interp
from .rewrite import compute_type2, normalize
from .strs import load_strs

__all__ = ['check_poly_bounded', 'check_system', 'compute_type2', 'load_interp', 'load_strs', 'normalize']
