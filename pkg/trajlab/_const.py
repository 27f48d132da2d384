import math

# trajectory shape
DEFAULT_OBS_LEN = 8
DEFAULT_PRED_LEN = 12
DEFAULT_DT = 1.0

# qualitative classes
CLASS_STATIONARY = 'T1'
CLASS_BOUNDED_SMALL = 'T2'
CLASS_FLYING_SMALL = 'T2F'
CLASS_BOUNDED_LARGE = 'T3'
CLASS_FLYING_LARGE = 'T3F'
CLASS_LOOP = 'T4'
CLASS_HAPHAZARD = 'T5'
CLASS_BACKTRACKER = 'T6'
CLASS_LINEAR = 'T7'
CLASS_UNCLASSIFIED = 'TX'

QUAL_CLASSES = (
    CLASS_STATIONARY,
    CLASS_BOUNDED_SMALL,
    CLASS_FLYING_SMALL,
    CLASS_BOUNDED_LARGE,
    CLASS_FLYING_LARGE,
    CLASS_LOOP,
    CLASS_HAPHAZARD,
    CLASS_BACKTRACKER,
    CLASS_LINEAR,
    CLASS_UNCLASSIFIED,
)

# classifier thresholds (scene units)
SMALL_BOX = 5.0
LARGE_BOX = 100.0
BACKTRACK_TOLERANCE = 1e-6
BACKTRACK_MIN_FORWARD = 6
BACKTRACK_MIN_RETRACE = 3
LINEARITY_THRESHOLD = 1.0
FLYING_MIN_STEP = 5.0
FLYING_MAX_CIRCVAR = 0.05
HAPHAZARD_MIN_CIRCVAR = 0.5

# abruptness score
EPS_AREA = 1e-9
CEIL_SNAP = 1e-9
DEGREES_PER_BUCKET = 10.0

# evaluation
DEFAULT_K = 20
DEFAULT_STANDARDIZATION = 1.0
PECNET_STANDARDIZATION = 1.86

SCALING_AREA = 'area'
SCALING_LENGTH = 'length'

# norms
NORM_FROBENIUS = 'fro'
NORM_L1 = 'l1'
NORM_L2OP = 'l2op'
NORM_LINF = 'linf'

# generators
ACCEL_STATIC = 'static'
ACCEL_VARIABLE = 'variable'

CURVE_CIRCLE = 'circle'
CURVE_SPIRAL = 'spiral'
CURVE_LOOP = 'loop'
CURVE_LINE = 'line'

SAMPLING_FIXED = 'fixed'
SAMPLING_VARIABLE = 'variable'

# interaction chain
DEFAULT_HEADING_NOISE_DEG = 5.0
DEFAULT_TURN_MAX_DEG = 90.0
COLLISION_SLOWDOWN = 0.5

# neural
DEFAULT_OMEGA0 = 30.0
ACTIVATION_RELU = 'relu'
ACTIVATION_SINE = 'sine'
ACTIVATION_IDENTITY = 'identity'
INIT_SIREN = 'siren'
INIT_DEFAULT = 'default'

# policy gradient agent
VARIANCE_FLOOR = 1e-4
DEFAULT_V_MAX = 2.0
DEFAULT_A_MAX = 0.5
DEFAULT_COLLISION_PENALTY = -10.0
DEFAULT_NEIGHBORS = 3
DEFAULT_GOAL_RADIUS = 1.0
LOG_2PI = math.log(2.0 * math.pi)

TERMINAL_GOAL = 'goal'
TERMINAL_COLLISION = 'collision'
TERMINAL_TIMEOUT = 'timeout'

# baselines
PREDICTOR_CONSTANT_VELOCITY = 'constant_velocity'
PREDICTOR_LINEAR_FIT = 'linear_fit'
PREDICTOR_STATIONARY = 'stationary'

# report keys
ATTR_RESOLVED_CONFIG = 'resolved_config'
ATTR_ADE = 'ade'
ATTR_FDE = 'fde'
ATTR_COUNT = 'count'
ATTR_PER_CLASS = 'per_class'
ATTR_TRAJECTORIES = 'trajectories'
ATTR_UNIQUE_POINTS = 'unique_points'
ATTR_CLASSES = 'classes'
ATTR_PERCENT = 'percent'
ATTR_ABSCORE = 'abscore'
ATTR_ABSCORE_SCALED = 'abscore_scaled'

# shipped defaults
DATA_PACKAGE = 'trajlab'
HMM_DEFAULT_FILE = 'hmm_default.json'
SDD_TARGET_FILE = 'sdd_target.json'
