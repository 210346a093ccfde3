"""Number-scaling arithmetic and the scaled calculus it induces."""

__version__ = "0.1.0"

from .arithmetic import (  # noqa: F401
    ScaledNumber,
    add_in,
    conj_in,
    div_in,
    make_number,
    mul_in,
    natural_value_table,
    value_in,
    w_map,
    z_map,
)
from .field import FieldSpec, Grid, connect, eval_alpha, eval_g, grad_alpha, parse_field  # noqa: F401
