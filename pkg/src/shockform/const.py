SHOCKFORM_BUILD = 1


class Tolerance:
    # Eigenvalues closer than this (relative to the spectral scale) are coincident
    GAP = 1e-12

    # |c^i_ii| below this falls back to base-frame continuity for the eigenvector sign
    SIGN = 1e-12

    # Frame self-checks
    DUALITY = 1e-10
    UNIT_NORM = 1e-12
    EIGEN_RESIDUAL = 1e-9

    # Base frame must diagonalise a(0) to this relative tolerance
    BASE_FRAME = 1e-10

    # Newton for the constitutive inverse and the interface quartic
    NEWTON = 1e-14
    QUARTIC = 1e-14

    # Residual of x = X(z, t) accepted at the edge of the seed support, relative to max(1, |x|)
    LABEL = 1e-13


class Defaults:
    # Finite-difference step for D_v a, as a fraction of the ball radius
    FD_STEP_FACTOR = 1e-5

    # Quasi-random samples over the 2δ-ball
    SAMPLES = 4096

    # Closed-form crystal frame switches to the series branch below c_switch = C_SWITCH * r
    C_SWITCH = 1e-6

    NEWTON_MAX_ITER = 50
    NEWTON_HALVINGS = 30

    # Admissible δ search
    BISECTION_STEPS = 64
    DELTA_SHRINK = 0.99
    DELTA_MAX = 1.0
    H_FRACTION = 0.9
    BOUNDARY_ANGLES = 720

    # Shock analysis
    RHO_STOP = 0.01
    EPSILON = 1e-3
    SLACK = 0.05
    FIT_FRACTION = 0.1

    # Characteristic fan
    Z_MIN = -1.5
    Z_MAX = 1.5
    Z_POINTS = 401
    TRACE_SUBSTEPS = 2
    MAX_RHO_JUMP = 0.25
    MIN_STEP_FRACTION = 2.0 ** -20

    # Grid solver
    CFL = 0.5
    DX = 0.02
    LEVELS = 400
    # Final time when none is configured and no window can be forecast
    T_END = 40.0
    GRADIENT_CAP_FACTOR = 50.0
    LIMITER = "tvb"
    # tvb limiter constant M = TVB_FACTOR * max|f''|
    TVB_FACTOR = 4.0

    # Seed sampling
    SEED_SAMPLES = 4001
    BUMP_POWER = 3

    # Interface oracle
    ROOT_SCAN = 2048
    ENVELOPE_SCAN = 8192


class ExitCode:
    OK = 0
    VERIFY_FAILED = 1
    CONFIG = 2
    RUNTIME = 3


class Limiter:
    TVB = "tvb"
    MC = "mc"
    MINMOD = "minmod"
    NONE = "none"

    ALL = [TVB, MC, MINMOD, NONE]


class SeedKind:
    BUMP = "bump"
    SIMPLE_WAVE = "simple_wave"

    ALL = [BUMP, SIMPLE_WAVE]


class ModelKind:
    CRYSTAL = "crystal"
    VACUUM = "vacuum"

    ALL = [CRYSTAL, VACUUM]


class Artifact:
    """
    File names written into the output directory.

    Fans are written one file per family, numbered from 1 (the fastest family).
    """
    FAN = "fan_{family}.csv"
    DIAGNOSTICS = "diagnostics.csv"
    ENERGY = "solution_energy.csv"
    SHOCK = "shock.json"
    SEED_STATS = "seed_stats.json"
    FORECAST = "forecast.json"
    EXACT_SLICE = "exact_t{index}.csv"
    EXACT = "exact.json"
    VERIFY = "verify.json"

    FAN_COLUMNS = ["z", "t", "X", "rho", "v", "w"]
    DIAGNOSTICS_COLUMNS = ["t", "W", "V", "S", "J", "U"]
    ENERGY_COLUMNS = ["t", "energy"]
    SLICE_COLUMNS = ["x", "D_y", "D_z", "B_y", "B_z"]

    # 17 significant digits round-trip a double exactly
    FLOAT_FORMAT = "{:.17g}"
