#include "actembed/baselines.hpp"

#include <cmath>

#include "actembed/errors.hpp"
#include "actembed/rng.hpp"

namespace actembed::baselines {

PcaModel pca_fit(const Eigen::Ref<const Matrix>& data, int d_out, Scalar tol,
                 int max_iters) {
    const Index rows = data.rows();
    const Index dim = data.cols();
    if (rows == 0 || dim == 0) throw EmptyInput("PCA fit on an empty matrix");
    if (d_out < 1 || d_out > std::min(rows, dim)) {
        throw InvalidConfig("PCA output dimension " + std::to_string(d_out) +
                            " must lie in [1, min(rows, dim)]");
    }

    PcaModel model;
    model.mean = data.colwise().mean().transpose();
    const Matrix centered = data.rowwise() - model.mean.transpose();
    Matrix cov = centered.transpose() * centered / static_cast<Scalar>(rows);

    model.components.resize(d_out, dim);
    model.explained_variance.resize(d_out);

    for (int comp = 0; comp < d_out; ++comp) {
        // deterministic pseudo-random start; a basis start can sit exactly on
        // a non-dominant eigenvector of axis-aligned covariances
        Rng rng(derive_seed(0x50434131ULL, {static_cast<std::uint64_t>(comp)}));
        Vector v(dim);
        for (Index i = 0; i < dim; ++i) v(i) = rng.uniform(-1.0, 1.0);
        for (int prev = 0; prev < comp; ++prev) {
            v -= model.components.row(prev).dot(v) * model.components.row(prev).transpose();
        }
        v.normalize();

        bool converged = false;
        Scalar lambda = 0.0;
        for (int it = 0; it < max_iters; ++it) {
            Vector next = cov * v;
            for (int prev = 0; prev < comp; ++prev) {
                next -= model.components.row(prev).dot(next) *
                        model.components.row(prev).transpose();
            }
            const Scalar norm = next.norm();
            if (norm < 1e-300) {
                // remaining spectrum is (numerically) zero; v is already an
                // eigenvector of eigenvalue 0
                lambda = 0.0;
                converged = true;
                break;
            }
            next /= norm;
            if (next.dot(v) < 0) next = -next;
            const Scalar delta = (next - v).norm();
            v = std::move(next);
            if (delta < tol) {
                lambda = v.dot(cov * v);
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ConvergenceFailure("PCA power iteration did not converge for component " +
                                     std::to_string(comp));
        }

        // fix the sign so the fit is reproducible: largest-|entry| coordinate positive
        Index max_i = 0;
        v.cwiseAbs().maxCoeff(&max_i);
        if (v(max_i) < 0) v = -v;

        model.components.row(comp) = v.transpose();
        model.explained_variance(comp) = std::max(lambda, 0.0);
        cov -= model.explained_variance(comp) * v * v.transpose();
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Eigen::Ref<const Matrix>& data) {
    if (data.cols() != model.mean.size()) {
        throw DimMismatch("PCA transform: dim " + std::to_string(data.cols()) +
                          " vs model dim " + std::to_string(model.mean.size()));
    }
    return (data.rowwise() - model.mean.transpose()) * model.components.transpose();
}

}  // namespace actembed::baselines
