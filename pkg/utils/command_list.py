RUN_COMMAND = "run"
THEORY_COMMAND = "theory"
SELECTOR_BENCH_COMMAND = "selector-bench"
PARTITION_STATS_COMMAND = "partition-stats"
COST_TABLE_COMMAND = "cost-table"

METRICS_CSV_FILE = "metrics.csv"
METRICS_JSON_FILE = "metrics.json"
RESOLVED_CONFIG_FILE = "resolved_config.json"
THEORY_REPORT_FILE = "theory_report.json"
BENCH_CSV_FILE = "selector_bench.csv"
BENCH_CURVE_FILE = "kl_curve.csv"
BENCH_SUMMARY_FILE = "selector_bench_summary.json"
PARTITION_STATS_FILE = "partition_stats.csv"
COST_TABLE_FILE = "cost_table.csv"
