#pragma once

#include <cstdint>
#include <vector>

#include "actembed/types.hpp"

namespace actembed::metrics {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CountVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// counts(i, j) = number of samples placed in cluster i that carry class j.
struct ContingencyTable {
    CountMatrix counts;
    CountVector cluster_sizes;  // row sums
    CountVector class_sizes;    // column sums
    std::int64_t total = 0;
};

ContingencyTable make_table(CountMatrix counts);

// Sizes are inferred from the largest ids unless given explicitly (explicit
// sizes keep empty clusters/classes as zero rows/columns).
ContingencyTable contingency(const std::vector<int>& pred, const std::vector<int>& truth,
                             int num_clusters = 0, int num_classes = 0);

// Minimum-cost assignment (Kuhn-Munkres) on a square cost matrix;
// returns col_of_row.
std::vector<int> solve_assignment(const CountMatrix& cost);

// Fraction of samples explained by the best one-to-one cluster-to-class
// mapping (injective on the smaller side).
double acc(const ContingencyTable& table);

// Adjusted Rand index. When the adjustment denominator is zero the value is
// 1 for identical partitions and 0 otherwise.
double ari(const ContingencyTable& table);

// Normalized mutual information (natural log, geometric normalization).
// A single-block partition has zero entropy; then the value is 1 if both
// partitions are single-block and 0 otherwise.
double nmi(const ContingencyTable& table);

struct ConfusionResult {
    CountMatrix matrix;               // rows reordered by the optimal mapping
    std::vector<int> row_cluster;     // original cluster id of each output row
    std::vector<int> cluster_to_class;  // per cluster id, matched class or -1
};

// Rows reordered so each matched class count sits on the diagonal; unmatched
// clusters follow in cluster-id order.
ConfusionResult confusion_after_assignment(const ContingencyTable& table);

}  // namespace actembed::metrics
