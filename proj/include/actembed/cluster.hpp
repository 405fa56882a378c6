#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actembed/types.hpp"

namespace actembed::cluster {

struct ClusterModel {
    Matrix centroids;     // [k x dim]
    Scalar inertia = 0.0; // sum of squared distances to assigned centroids
    int k = 0;
    int restarts_run = 0;
};

struct ClusterAssignment {
    std::vector<int> labels;  // cluster id in [0, k) per row
};

// D^2 sampling: first centroid uniform, each next proportional to the squared
// distance to the nearest chosen one. Deterministic per seed. Requires k
// distinct points.
Matrix kmeans_pp_init(const Eigen::Ref<const Matrix>& points, int k, std::uint64_t seed);

struct KMeansResult {
    ClusterModel model;
    ClusterAssignment assignment;
};

// Lloyd iterations until the assignment is stable, the largest centroid
// displacement drops under tol, or max_iters. Assignment ties go to the
// lowest centroid id; an emptied centroid is reseeded to the point farthest
// from its assigned centroid. Restart r uses seed+r; the best (inertia,
// restart index) wins.
KMeansResult kmeans(const Eigen::Ref<const Matrix>& points, int k, int restarts = 10,
                    int max_iters = 300, Scalar tol = 1e-6, std::uint64_t seed = 0);

// row_index,cluster_id,distance_to_centroid
void dump_assignment_csv(const KMeansResult& result,
                         const Eigen::Ref<const Matrix>& points, const std::string& path);

}  // namespace actembed::cluster
