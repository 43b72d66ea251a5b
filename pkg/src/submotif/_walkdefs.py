"""Constants shared by the compiled walker and its pure-Python twin."""

# walk modes
HAM = 0
HAM_LOW = 1
HAM_MIXED = 2
CLIQUE = 3
CLIQUE_LOW = 4
CLIQUE_MEDIUM = 5
CLIQUE_HIGH = 6
STAR = 7
STAR_LOW = 8
STAR_NONLOW = 9
VERTEX = 10

# counter slots
ATTEMPTS = 0
DEGREE_Q = 1
NEIGHBOR_Q = 2
PAIR_Q = 3
UNIFORM_D = 4
BRANCH = 5
COMPOSITION = 6
REASON_BASE = 7
NCOUNTERS = 16

# failure reasons (offsets from REASON_BASE)
UNIFORM_MISS = 0
DEGREE_CLASS = 1
NEIGHBOR_MISS = 2
DUPLICATE = 3
NOT_A_CYCLE = 4
NO_COPY = 5
REJECTION = 6

REASONS = ("uniform-miss", "degree-class-violation", "neighbor-index-miss",
           "duplicate-vertex", "not-a-cycle", "no-motif-copy", "rejection-coin")

# branch labels
LOW = 0
MID = 1
HIGH = 2
