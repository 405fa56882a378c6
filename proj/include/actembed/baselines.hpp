#pragma once

#include "actembed/types.hpp"

namespace actembed::baselines {

struct PcaModel {
    Matrix components;           // [d_out x D], orthonormal rows
    Vector mean;                 // [D]
    Vector explained_variance;   // non-increasing
};

// Top principal directions of the mean-centered data via power iteration
// with deflation on the population covariance. The starting vector for each
// component cycles through the standard basis, so the fit is deterministic.
PcaModel pca_fit(const Eigen::Ref<const Matrix>& data, int d_out, Scalar tol = 1e-10,
                 int max_iters = 1000);

// (x - mean) projected onto the components, row-wise.
Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& data);

}  // namespace actembed::baselines
