#pragma once

#include <string>
#include <vector>

#include "actembed/config.hpp"
#include "actembed/metrics.hpp"
#include "actembed/types.hpp"

namespace actembed::experiment {

struct FoldSplit {
    std::vector<int> train_rows;
    std::vector<int> test_rows;
};

// Session-granular cross-validation: sessions shuffled by seed, dealt
// round-robin, so a session's segments never straddle folds.
std::vector<FoldSplit> crossval_split(const FeatureMatrix& matrix, int folds,
                                      std::uint64_t seed);

struct RunRow {
    std::string run_id;
    int fold = 0;
    config::Method method = config::Method::Joint;
    Scalar alpha = 0.0;  // effective loss weights for this run
    Scalar beta = 0.0;
    int k = 0;
    double acc = 0.0;
    double ari = 0.0;
    double nmi = 0.0;
    double inertia = 0.0;
    int epochs = 0;       // 0 for PCA
    double wall_ms = 0.0; // emitted separately; not part of runs.csv
    metrics::ConfusionResult confusion;
};

struct AggregateRow {
    config::Method method = config::Method::Joint;
    Scalar alpha = 0.0;
    Scalar beta = 0.0;
    int k = 0;
    double mean_acc = 0.0, std_acc = 0.0;
    double mean_ari = 0.0, std_ari = 0.0;
    double mean_nmi = 0.0, std_nmi = 0.0;
    int folds = 0;
};

struct RunReport {
    config::ExperimentConfig config;  // effective configuration echo
    int tn = 0;                       // distinct classes in the loaded data
    std::vector<std::string> class_names;
    std::vector<RunRow> rows;         // ordered by (fold, method, alpha, beta, k)
    std::vector<AggregateRow> aggregates;
};

// Full protocol: load + repair + segment + features, then per fold fit the
// standardizer and neighborhoods on training rows only, train/fit each
// method, embed all rows, cluster at k = tn + offset, and score the test
// rows. Deterministic for a fixed (config, seed); folds may run on worker
// threads (ACTEMBED_THREADS caps them, 0 = auto).
RunReport run_experiment(const config::ExperimentConfig& config);

// runs.csv, timings.csv, aggregate.csv, confusion_*.csv and run_manifest.ini
void emit_report(const RunReport& report, const std::string& out_dir);

}  // namespace actembed::experiment
