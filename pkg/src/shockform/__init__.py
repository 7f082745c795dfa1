from . import error, const
from .core import SystemModel, EigenFrame, eigenframe, structure_coeffs, hyperbolicity_margin, separation_time
from .crystal import CrystalParams, crystal_model
from .seed import BumpSeed, SimpleWaveSeed
from .solver import reference_solve
from .tracer import trace_characteristics, sup_diagnostics
from .shock import seed_stats, forecast, detect_shock, validate_window
