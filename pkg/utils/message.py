WELCOME_MESSAGE = "DynamicFL communication-allocation simulator."

VALIDATION_ERROR = "A validation error occurred."
INTERNAL_SERVER_ERROR = "An internal error occurred. Re-run with LOG_LEVEL=DEBUG for details."

# Label statistics and partitioning
LABEL_OUT_OF_RANGE = "Label index {label} is outside [0, {num_classes})."
NUM_CLASSES_MUST_BE_POSITIVE = "num_classes must be a positive integer."
PROBS_NEGATIVE = "Probability vector contains negative entries."
PROBS_NOT_NORMALISED = "Probability vector sums to {total}, expected 1."
COUNT_NEGATIVE = "Sample count must be non-negative."
NUM_CLASSES_MISMATCH = "Distributions disagree on num_classes ({left} vs {right})."
JOINT_OF_EMPTY = "Joint distribution needs at least one non-empty member."
KL_OF_EMPTY = "The empty distribution cannot enter a KL divergence."
DATASET_EMPTY = "Dataset is empty."
DATASET_SHAPE_MISMATCH = "Feature rows ({rows}) and labels ({labels}) disagree."
BALANCED_K_TOO_LARGE = "Balanced partition needs K ({k}) <= num_classes ({num_classes})."
BALANCED_NOT_ENOUGH_SLOTS = (
    "Balanced partition with {clients} clients x K={k} gives {slots} class slots, "
    "fewer than the {num_classes} classes present; some samples would be dropped."
)
BALANCED_UNEVEN = (
    "Balanced partition infeasible: per-class supply {supply} split over class-slot demand {demand} "
    "gives client sizes between {smallest} and {largest} (must differ by at most 1)."
)
BALANCED_CLASS_SHORT = (
    "Balanced partition infeasible: class {label} has {supply} samples for {holders} holding clients, "
    "so some client would hold fewer than K classes (per-class supply {all_supply}, demand {demand})."
)
CSV_NO_ROWS = "CSV dataset {path} has a header but no rows."
CSV_BAD_ROW = "CSV dataset {path}: row {row} could not be parsed ({reason})."
TEST_FRACTION_RANGE = "test_fraction must lie in [0, 1)."

# Selection
CANDIDATE_COST_NEGATIVE = "Candidate {client_id} has a negative cost or budget."
CANDIDATE_DUPLICATE = "Candidate ids must be unique; {client_id} appears twice."
TARGET_FRACTION_RANGE = "target_fraction must lie in [0, 1]."
BRUTE_FORCE_TOO_LARGE = "Exhaustive selection supports at most {limit} candidates, got {count}."
SELECTION_INFEASIBLE = "Selector returned a subset violating the communication budgets: {subset}."
NO_FEASIBLE_SUBSET = "No feasible high-frequency subset in round {t}; all active clients run at low frequency."

# Communication accounting
SUBSET_NOT_IN_ACTIVES = "High-frequency subset contains clients that are not active: {extra}."
BETA_RANGE = "beta must lie in (0, 1]."
LOCAL_UPDATES_POSITIVE = "L and the interval must both be at least 1."
LEDGER_MISMATCH = "Cost ledger mismatch in round {t}: {billed} billed vs {expected} from sync events."

# Models
OBJECTIVE_QUADRATIC_DIM = "quadratic_mean requires feature_dim = 1."
OBJECTIVE_MLP_HIDDEN = "mlp requires a positive hidden size."
PARAMS_LAYOUT_MISMATCH = "Parameter layouts differ between models."
BATCH_SHAPE_MISMATCH = "Batch has {cols} features, the objective expects {expected}."
BATCH_EMPTY = "Batch must contain at least one sample."
NON_FINITE_LOSS = "Loss became non-finite ({loss})."
GRAD_LENGTH_MISMATCH = "Gradient length {grad} does not match parameter size {size}."
COSINE_NEEDS_HORIZON = "The cosine schedule needs a positive step horizon."

# Engine
AGGREGATE_EMPTY = "Weighted average needs at least one model."
AGGREGATE_ZERO_WEIGHT = "Weighted average needs at least one positive weight."
ROUND_SKIPPED_EMPTY_SUBSET = "Round {t} skipped: high-only participation with an empty subset."
EMPTY_CLIENTS_EXCLUDED = "{count} clients hold no samples and are excluded from sampling."
NO_CLIENTS_WITH_DATA = "No client holds any training sample."
LOCAL_UPDATES_EXCLUSIVE = "Set exactly one of local_epochs or local_updates."
ROUND_COMPLETED = "Round {t}/{total}: |z|={size} kl={kl:.4f} cost={cost:.4f} acc={acc}"

# Theory
THEORY_ETA_RANGE = "eta must lie in (0, 1], got {eta}."
THEORY_NEEDS_THREE_CLIENTS = "The quadratic scenario needs exactly three non-empty clients."
THEORY_PLAIN_SGD_ONLY = "The quadratic equivalence check requires momentum = 0 and weight_decay = 0."
THEORY_PASSED = "PASS"
THEORY_FAILED = "FAIL"

# Commands
CONFIG_NOT_FOUND = "Config file {path} does not exist."
RUN_COMPLETED = "Run completed: {rounds} rounds written to {directory}."
BENCH_COMPLETED = "Selector benchmark written to {path}."
PARTITION_STATS_COMPLETED = "Partition statistics written to {path}."
COST_TABLE_COMPLETED = "Cost table written to {path}."
THEORY_REPORT = "Theory grid {verdict}: {count} scenarios, max_delta={max_delta!r} (closed-form {closed!r}, fedsgd {fedsgd!r})"
COST_TABLE_ARGUMENTS = "cost-table needs L >= 1, actives >= 1 and high_fraction in [0, 1]."
BENCH_ARGUMENTS = "selector-bench needs at least one trial and positive candidate counts."
