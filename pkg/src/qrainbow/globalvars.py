from os.path import join

# TABLE PARAMETERS
DEFAULT_T = 64  # Chain length
DEFAULT_M = 1024  # Number of chains
DEFAULT_K = 16  # Bucket modulus, i.e. quantum search space of 4 qubits
DEFAULT_KAPPA = 12  # Bit width of the truncated endpoint hash
DEFAULT_HASH = "sha1"
HASH_ALGORITHMS = ("sha1", "sha256")
MAX_SPACE_SIZE = 2**64 - 1  # Plaintext space must fit an unsigned 64-bit index
INDEX_BYTES = 16  # Digest bytes read by HashToIndex

# SEED FOR REPRODUCIBILITY
DEFAULT_SEED = 42

# SIMULATOR LIMITS
MAX_PURE_QUBITS = 12
MAX_DENSITY_QUBITS = 8
UNITARY_ATOL = 1e-10
STATE_ATOL = 1e-8  # Tolerated drift of norm, trace and hermiticity

# EXPERIMENT PARAMETERS
NOISE_QUBITS = 4
NOISE_TAU = "0011"
NOISE_P_GRID = "0:0.1:0.01"
SUCCESS_TAUS = ["11", "001", "1100", "01011"]
SUCCESS_QUBITS = [2, 3, 4, 5]
CSV_FLOAT_PRECISION = 12

# ENGINES
ENGINES = ("classical", "dega")
DEFAULT_ENGINE = "dega"

# FILEPATHS
DATA_DIR = "data"
DEMO_DICT_FILEPATH = join("dictionaries", "demo.dict")
TABLE_FILEPATH = join(DATA_DIR, "demo.rtbl")
NOISE_CSV_FILEPATH = join(DATA_DIR, "bench_noise.csv")
SUCCESS_CSV_FILEPATH = join(DATA_DIR, "bench_success.csv")
