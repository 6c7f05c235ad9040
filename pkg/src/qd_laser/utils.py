BOLTZMANN_UEV_PER_K = 86.173332621

QD_STATES = ("g", "e")
QD_PAIR_LABELS = ("gg", "ge", "eg", "ee")
COLLECTIVE_LABELS = ("ee", "plus", "minus", "gg")

PUMP_MODES = ("incoherent", "coherent")
ENGINES = ("full", "sme")
ENGINE_CHOICES = ("full", "sme", "both")
OUTPUT_FORMATS = ("csv", "json")
OUTPUT_SETS = ("populations", "mean_n", "excess", "me_sme_compare", "rateeq_sme_compare")

DEFAULT_ALPHA_P = 1.42e-3
DEFAULT_OMEGA_B = 10.0
DEFAULT_G1_ABS_UEV = 100.0
DEFAULT_N_MAX = 15
DEFAULT_M_MAX = 4
N_MAX_STEP = 4
N_MAX_CAP = 40

FREQUENCY_PANELS = 12
GAUSS_NODES_MIN = 48
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-10
QUAD_LIMIT = 200
TAU_STEP = 2e-3
TAIL_TOL = 1e-10
TAU_CAP_CUTOFFS = 400.0
HALF_FOURIER_CHUNK = 256
THERMAL_CORRECTION_FLOOR = 1e-10
KERNEL_REFINE_RTOL = 1e-8
KERNEL_TRAPEZOID_RTOL = 1e-5

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
NEGATIVITY_TOL = 1e-7
DEGENERACY_TOL = 1e-10

RESULT_COLUMNS = (
    "axis",
    "engine",
    "p_ee",
    "p_plus",
    "p_minus",
    "p_gg",
    "mean_n",
    "spee",
    "tpee",
    "thpee",
    "fpee",
    "residual",
    "n_max",
    "B",
    "flags",
)
COMPARE_COLUMNS = (
    "axis",
    "d_p_ee",
    "d_p_plus",
    "d_p_minus",
    "d_p_gg",
    "d_mean_n",
    "mean_n_rate_eq",
    "overflow_excess",
    "mean_n_sme",
    "rel_rate_eq",
    "flags",
)
SIGNIFICANT_DIGITS = 12
FLOAT_TEMPLATE = "{:.12g}"

FLAG_G1_ABS = "g1_abs={value}"
FLAG_CALIBRATED = "calibrated"
FLAG_OMEGA_PLUS_FIX = "omega_plus_fix"
FLAG_B_ZERO_TEMPERATURE = "b_zero_discrepancy"
FLAG_NO_EPI = "no_epi"
FLAG_ERROR = "error={name}"
FLAG_NEGATIVE_SHARE = "negative_share={value}"
FLAG_OVERFLOW = "overflow={value}"
OVERFLOW_WARN_FRACTION = 1e-4
FLAG_SEPARATOR = ";"

SCENARIO_SECTIONS = ("model", "bath", "sweep", "output")
AXIS_ALIASES = {
    "eta": ("eta1", "eta2"),
    "delta": ("delta1", "delta2"),
    "delta_p": ("delta1p", "delta2p"),
}
