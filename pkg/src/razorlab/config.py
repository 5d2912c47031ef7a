"""Shared defaults. Every CLI run echoes the values it actually used."""

DEFAULT_GAS = 100_000

# vote censuses enumerate all closed codes up to n bits; past ~28 the code
# count and demand trees outgrow a desk machine
CENSUS_CEILING = 26

# hard ceiling for enumerate_codes
ENUM_CEILING = 40

# demand-tree node budget per census/search call
NODE_CAP = 10 ** 8

# outputs longer than this are tallied under OVERFLOW_KEY
MAX_TRACKED_OUTPUT = 64
OVERFLOW_KEY = "overflow"

# default exhaustive frontier for shortest-program search
SEARCH_CEILING = 20

DEFAULT_SAMPLES = 10_000
DEFAULT_SEED = 0

CHECKPOINT_VERSION = 1

REGISTRY_ENV = "RAZORLAB_REGISTRY"
