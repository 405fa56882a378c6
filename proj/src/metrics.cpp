#include "actembed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "actembed/errors.hpp"

namespace actembed::metrics {

namespace {

double comb2(std::int64_t x) {
    return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1);
}

// true when every row and every column holds at most one nonzero cell,
// i.e. the two partitions are identical up to relabeling
bool perfect_agreement(const ContingencyTable& t) {
    for (Index i = 0; i < t.counts.rows(); ++i) {
        int nz = 0;
        for (Index j = 0; j < t.counts.cols(); ++j) nz += t.counts(i, j) > 0;
        if (nz > 1) return false;
    }
    for (Index j = 0; j < t.counts.cols(); ++j) {
        int nz = 0;
        for (Index i = 0; i < t.counts.rows(); ++i) nz += t.counts(i, j) > 0;
        if (nz > 1) return false;
    }
    return true;
}

int nonzero_blocks(const CountVector& sizes) {
    int nz = 0;
    for (Index i = 0; i < sizes.size(); ++i) nz += sizes(i) > 0;
    return nz;
}

}  // namespace

ContingencyTable make_table(CountMatrix counts) {
    ContingencyTable t;
    t.cluster_sizes = counts.rowwise().sum();
    t.class_sizes = counts.colwise().sum().transpose();
    t.total = t.cluster_sizes.sum();
    t.counts = std::move(counts);
    return t;
}

ContingencyTable contingency(const std::vector<int>& pred, const std::vector<int>& truth,
                             int num_clusters, int num_classes) {
    if (pred.size() != truth.size()) {
        throw LengthMismatch("prediction and truth lengths differ: " +
                             std::to_string(pred.size()) + " vs " +
                             std::to_string(truth.size()));
    }
    if (pred.empty()) throw EmptyInput("contingency of empty label vectors");

    int k = num_clusters;
    int c = num_classes;
    for (std::size_t s = 0; s < pred.size(); ++s) {
        if (pred[s] < 0 || truth[s] < 0) {
            throw DataError("negative label at position " + std::to_string(s));
        }
        k = std::max(k, pred[s] + 1);
        c = std::max(c, truth[s] + 1);
    }

    CountMatrix counts = CountMatrix::Zero(k, c);
    for (std::size_t s = 0; s < pred.size(); ++s) ++counts(pred[s], truth[s]);
    return make_table(std::move(counts));
}

std::vector<int> solve_assignment(const CountMatrix& cost) {
    if (cost.rows() != cost.cols()) throw DimMismatch("assignment matrix must be square");
    const int n = static_cast<int>(cost.rows());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

    // Kuhn-Munkres with row/column potentials, O(n^3)
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            std::int64_t delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) col_of_row[p[j] - 1] = j - 1;
    }
    return col_of_row;
}

namespace {

// Optimal cluster->class matching on the zero-padded square problem.
std::vector<int> optimal_mapping(const ContingencyTable& table) {
    const Index k = table.counts.rows();
    const Index c = table.counts.cols();
    const Index n = std::max(k, c);
    CountMatrix cost = CountMatrix::Zero(n, n);
    cost.topLeftCorner(k, c) = -table.counts;
    std::vector<int> col_of_row = solve_assignment(cost);

    std::vector<int> mapping(static_cast<std::size_t>(k), -1);
    for (Index i = 0; i < k; ++i) {
        const int j = col_of_row[static_cast<std::size_t>(i)];
        if (j < c) mapping[static_cast<std::size_t>(i)] = j;
    }
    return mapping;
}

}  // namespace

double acc(const ContingencyTable& table) {
    if (table.total <= 0) throw EmptyInput("accuracy of an empty table");
    const std::vector<int> mapping = optimal_mapping(table);
    std::int64_t matched = 0;
    for (Index i = 0; i < table.counts.rows(); ++i) {
        const int j = mapping[static_cast<std::size_t>(i)];
        if (j >= 0) matched += table.counts(i, j);
    }
    return static_cast<double>(matched) / static_cast<double>(table.total);
}

double ari(const ContingencyTable& table) {
    if (table.total < 2) throw TooFewSamples("ARI needs at least 2 samples");
    if (perfect_agreement(table)) return 1.0;

    double sum_ij = 0.0;
    for (Index i = 0; i < table.counts.rows(); ++i) {
        for (Index j = 0; j < table.counts.cols(); ++j) sum_ij += comb2(table.counts(i, j));
    }
    double sum_rows = 0.0;
    for (Index i = 0; i < table.cluster_sizes.size(); ++i) {
        sum_rows += comb2(table.cluster_sizes(i));
    }
    double sum_cols = 0.0;
    for (Index j = 0; j < table.class_sizes.size(); ++j) {
        sum_cols += comb2(table.class_sizes(j));
    }

    const double expected = sum_rows * sum_cols / comb2(table.total);
    const double denom = 0.5 * (sum_rows + sum_cols) - expected;
    if (denom == 0.0) return 0.0;  // degenerate and not identical
    return (sum_ij - expected) / denom;
}

double nmi(const ContingencyTable& table) {
    if (table.total < 1) throw EmptyInput("NMI of an empty table");
    const bool single_u = nonzero_blocks(table.cluster_sizes) <= 1;
    const bool single_v = nonzero_blocks(table.class_sizes) <= 1;
    if (single_u || single_v) return single_u && single_v ? 1.0 : 0.0;
    if (perfect_agreement(table)) return 1.0;

    const double n = static_cast<double>(table.total);
    double mi_sum = 0.0;
    for (Index i = 0; i < table.counts.rows(); ++i) {
        for (Index j = 0; j < table.counts.cols(); ++j) {
            const std::int64_t nij = table.counts(i, j);
            if (nij == 0) continue;
            mi_sum += static_cast<double>(nij) *
                      std::log(n * static_cast<double>(nij) /
                               (static_cast<double>(table.cluster_sizes(i)) *
                                static_cast<double>(table.class_sizes(j))));
        }
    }
    double hu = 0.0;
    for (Index i = 0; i < table.cluster_sizes.size(); ++i) {
        const std::int64_t ni = table.cluster_sizes(i);
        if (ni > 0) hu += static_cast<double>(ni) * std::log(static_cast<double>(ni) / n);
    }
    double hv = 0.0;
    for (Index j = 0; j < table.class_sizes.size(); ++j) {
        const std::int64_t nj = table.class_sizes(j);
        if (nj > 0) hv += static_cast<double>(nj) * std::log(static_cast<double>(nj) / n);
    }

    const double value = mi_sum / std::sqrt(hu * hv);
    return std::clamp(value, 0.0, 1.0);
}

ConfusionResult confusion_after_assignment(const ContingencyTable& table) {
    const Index k = table.counts.rows();
    const Index c = table.counts.cols();
    ConfusionResult r;
    r.cluster_to_class = optimal_mapping(table);

    // matched clusters first, ordered by their class; then unmatched in
    // cluster-id order
    std::vector<int> order;
    for (Index j = 0; j < c; ++j) {
        for (Index i = 0; i < k; ++i) {
            if (r.cluster_to_class[static_cast<std::size_t>(i)] == j) {
                order.push_back(static_cast<int>(i));
            }
        }
    }
    for (Index i = 0; i < k; ++i) {
        if (r.cluster_to_class[static_cast<std::size_t>(i)] < 0) {
            order.push_back(static_cast<int>(i));
        }
    }

    r.matrix.resize(k, c);
    r.row_cluster = order;
    for (std::size_t row = 0; row < order.size(); ++row) {
        r.matrix.row(static_cast<Index>(row)) = table.counts.row(order[row]);
    }
    return r;
}

}  // namespace actembed::metrics
