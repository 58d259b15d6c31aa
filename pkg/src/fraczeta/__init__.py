"""Multifractal and geometric zeta functions of fractal strings, computed exactly."""
from .exact import Interval, IntervalSet, EMPTY, UNIT
from .strings import (FractalString, LengthSystem, make_string, make_cantor_string,
                      make_reordered_cantor, make_paired_cantor, make_a_string,
                      tube_volume, gap_lengths)
from .measures import Regularity, PointMassMeasure, boundary_measure, window_start_set
from .engine import (ScaleSequence, build_mzf, finite_alpha_mzf, effective_lengths,
                     verify_geometric_recovery)
from .analysis import (ZetaForm, Window, geometric_form, complex_dimensions,
                       abscissa_of_convergence, minkowski_report, tube_explicit_formula)
from .partition import (BINOMIAL, CascadeMeasure, partition_zeta, sigma_of_q,
                        spectrum_from_partition, modified_mzf)
from .kernels import BACKEND

__version__ = "0.1.0"
