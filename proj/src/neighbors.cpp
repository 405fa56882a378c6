#include "actembed/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numeric>

#include "actembed/csv.hpp"
#include "actembed/errors.hpp"

namespace actembed::neighbors {

std::vector<std::vector<int>> temporal_neighbors(const FeatureMatrix& matrix, int m) {
    if (m < 1) throw InvalidConfig("temporal neighbor count m must be >= 1");
    const std::vector<int> keys = session_keys(matrix);
    const int num_sessions = keys.empty() ? 0 : *std::max_element(keys.begin(), keys.end()) + 1;

    std::vector<std::vector<int>> by_session(static_cast<std::size_t>(num_sessions));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        by_session[static_cast<std::size_t>(keys[i])].push_back(static_cast<int>(i));
    }

    std::vector<std::vector<int>> out(matrix.meta.size());
    std::vector<int> candidates;
    for (const auto& rows : by_session) {
        for (const int i : rows) {
            candidates.clear();
            for (const int j : rows) {
                if (j != i) candidates.push_back(j);
            }
            const int self = matrix.meta[static_cast<std::size_t>(i)].segment_index;
            auto gap = [&](int j) {
                return std::abs(matrix.meta[static_cast<std::size_t>(j)].segment_index - self);
            };
            const auto keep = std::min(candidates.size(), static_cast<std::size_t>(m));
            std::partial_sort(candidates.begin(),
                              candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                              candidates.end(), [&](int a, int b) {
                                  const int ga = gap(a), gb = gap(b);
                                  return ga != gb ? ga < gb : a < b;
                              });
            candidates.resize(keep);
            out[static_cast<std::size_t>(i)] = candidates;
        }
    }
    return out;
}

std::vector<std::vector<int>> knn_feature_neighbors(const FeatureMatrix& matrix, int n) {
    if (n < 1) throw InvalidConfig("feature neighbor count n must be >= 1");
    const Index rows = matrix.rows();
    if (rows < 2) {
        throw DatasetTooSmall("feature kNN needs at least 2 rows, got " +
                              std::to_string(rows));
    }
    if (rows <= n) {
        std::cerr << "[actembed] warning: dataset of " << rows
                  << " rows is too small for n=" << n << " neighbors; using all "
                  << rows - 1 << " others per row\n";
    }

    std::vector<std::vector<int>> out(static_cast<std::size_t>(rows));
    Vector dist(rows);
    std::vector<int> order(static_cast<std::size_t>(rows));
    for (Index i = 0; i < rows; ++i) {
        dist = (matrix.values.rowwise() - matrix.values.row(i))
                   .rowwise()
                   .squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        order.erase(order.begin() + i);
        const auto keep = std::min(order.size(), static_cast<std::size_t>(n));
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                          order.end(), [&](int a, int b) {
                              return dist(a) != dist(b) ? dist(a) < dist(b) : a < b;
                          });
        order.resize(keep);
        out[static_cast<std::size_t>(i)] = order;
        order.resize(static_cast<std::size_t>(rows));
    }
    return out;
}

NeighborhoodIndex build_index(const FeatureMatrix& matrix, int m, int n) {
    NeighborhoodIndex index;
    index.temporal = temporal_neighbors(matrix, m);
    index.feature = knn_feature_neighbors(matrix, n);
    index.m = m;
    index.n = n;
    return index;
}

void dump_neighbors_csv(const NeighborhoodIndex& index, const FeatureMatrix& matrix,
                        const std::string& path) {
    csv::Writer w(path);
    w.row({"row_index", "kind", "neighbor_rank", "neighbor_index", "distance"});
    for (std::size_t i = 0; i < index.temporal.size(); ++i) {
        const int self = matrix.meta[i].segment_index;
        for (std::size_t rank = 0; rank < index.temporal[i].size(); ++rank) {
            const int j = index.temporal[i][rank];
            w.cell(static_cast<long long>(i));
            w.cell(std::string("temporal"));
            w.cell(static_cast<long long>(rank));
            w.cell(j);
            w.cell(static_cast<double>(
                std::abs(matrix.meta[static_cast<std::size_t>(j)].segment_index - self)));
            w.end_row();
        }
    }
    for (std::size_t i = 0; i < index.feature.size(); ++i) {
        for (std::size_t rank = 0; rank < index.feature[i].size(); ++rank) {
            const int j = index.feature[i][rank];
            w.cell(static_cast<long long>(i));
            w.cell(std::string("feature"));
            w.cell(static_cast<long long>(rank));
            w.cell(j);
            w.cell(std::sqrt((matrix.values.row(static_cast<Index>(i)) -
                              matrix.values.row(j))
                                 .squaredNorm()));
            w.end_row();
        }
    }
}

}  // namespace actembed::neighbors
