#pragma once

#include <string>
#include <vector>

#include "actembed/types.hpp"

namespace actembed::neighbors {

// Static per-row neighbor lists, computed once on a (training) matrix and
// frozen for all epochs. No list contains its own row. Temporal lists never
// cross a (subject, session) boundary; feature lists are sorted by ascending
// (distance, row index).
struct NeighborhoodIndex {
    std::vector<std::vector<int>> temporal;
    std::vector<std::vector<int>> feature;
    int m = 0;
    int n = 0;
};

// For row i: the m same-session rows nearest in |segment_index| difference,
// ties toward the smaller row index. Sessions with fewer than m+1 rows yield
// all available rows; a singleton session yields an empty list.
std::vector<std::vector<int>> temporal_neighbors(const FeatureMatrix& matrix, int m);

// For row i: the n rows minimizing Euclidean distance over all rows of the
// (standardized) matrix, ties toward the smaller row index. When the matrix
// has S <= n rows every other row is returned and a warning is printed.
std::vector<std::vector<int>> knn_feature_neighbors(const FeatureMatrix& matrix, int n);

NeighborhoodIndex build_index(const FeatureMatrix& matrix, int m, int n);

// row_index,kind,neighbor_rank,neighbor_index,distance
void dump_neighbors_csv(const NeighborhoodIndex& index, const FeatureMatrix& matrix,
                        const std::string& path);

}  // namespace actembed::neighbors
