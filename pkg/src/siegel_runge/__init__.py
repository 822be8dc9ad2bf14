"""Explicit computations for Runge's method on the Siegel modular threefold of level 2."""
from .characteristics import ALL_CHARS, EVEN_CHARS, ODD_CHARS, ThetaChar
from .qseries import QSeries, hforms_qexp, theta_qexp, verify_sigma_identities, verify_vdg_relations
from .thetanum import SiegelPoint, SymplecticMatrix, eval_theta, reduce_to_F2
from .padic import newton_polygon, theta8_ratio_bound
from .igusa import CurveSextic, JInvariants, classify_places, igusa_from_sextic
from .arith import FieldSpec, ProjPoint, weil_height
from .runge import audit, bound_case_a, bound_case_b, faltings_bound

__version__ = "0.1.0"
