"""Exact-arithmetic toolkit for lattice vertex algebras under conformal flow."""

from .scalars import GaussRational, ceil_re, format_gauss, gauss, gbinom, parse_gauss
from .qseries import QSeries
from .lattices import Cocycle, CosetVector, EvenLattice, smith_normal_form, validate

__version__ = "0.1.0"
