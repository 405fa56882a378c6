#include "actembed/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "actembed/csv.hpp"
#include "actembed/errors.hpp"
#include "actembed/rng.hpp"

namespace actembed::cluster {

namespace {

Index count_distinct_rows(const Eigen::Ref<const Matrix>& points) {
    std::vector<Index> order(static_cast<std::size_t>(points.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    auto row_less = [&](Index a, Index b) {
        for (Index d = 0; d < points.cols(); ++d) {
            if (points(a, d) != points(b, d)) return points(a, d) < points(b, d);
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    Index distinct = points.rows() > 0 ? 1 : 0;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (row_less(order[i - 1], order[i])) ++distinct;
    }
    return distinct;
}

std::vector<int> assign_nearest(const Eigen::Ref<const Matrix>& points,
                                const Matrix& centroids) {
    std::vector<int> assign(static_cast<std::size_t>(points.rows()));
    for (Index i = 0; i < points.rows(); ++i) {
        int best = 0;
        Scalar best_d = (points.row(i) - centroids.row(0)).squaredNorm();
        for (Index c = 1; c < centroids.rows(); ++c) {
            const Scalar d = (points.row(i) - centroids.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        assign[static_cast<std::size_t>(i)] = best;
    }
    return assign;
}

Scalar total_inertia(const Eigen::Ref<const Matrix>& points, const Matrix& centroids,
                     const std::vector<int>& assign) {
    Scalar inertia = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        inertia += (points.row(i) - centroids.row(assign[static_cast<std::size_t>(i)]))
                       .squaredNorm();
    }
    return inertia;
}

struct LloydResult {
    Matrix centroids;
    std::vector<int> assign;
    Scalar inertia = 0.0;
};

LloydResult lloyd(const Eigen::Ref<const Matrix>& points, Matrix centroids,
                  int max_iters, Scalar tol) {
    const int k = static_cast<int>(centroids.rows());
    std::vector<int> assign = assign_nearest(points, centroids);

    for (int it = 0; it < max_iters; ++it) {
        Matrix next = Matrix::Zero(k, points.cols());
        std::vector<Index> counts(static_cast<std::size_t>(k), 0);
        for (Index i = 0; i < points.rows(); ++i) {
            const int c = assign[static_cast<std::size_t>(i)];
            next.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                next.row(c) /= static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
            } else {
                next.row(c) = centroids.row(c);  // reseeded below
            }
        }

        // reseed each emptied centroid to the point farthest from its
        // assigned centroid, lowest point index on ties
        std::vector<bool> taken(static_cast<std::size_t>(points.rows()), false);
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Index far = -1;
            Scalar far_d = -1.0;
            for (Index i = 0; i < points.rows(); ++i) {
                if (taken[static_cast<std::size_t>(i)]) continue;
                const Scalar d =
                    (points.row(i) - next.row(assign[static_cast<std::size_t>(i)]))
                        .squaredNorm();
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far >= 0) {
                next.row(c) = points.row(far);
                taken[static_cast<std::size_t>(far)] = true;
            }
        }

        const Scalar shift = (next - centroids).rowwise().norm().maxCoeff();
        centroids = std::move(next);
        std::vector<int> next_assign = assign_nearest(points, centroids);
        const bool changed = next_assign != assign;
        assign = std::move(next_assign);
        if (!changed || shift < tol) break;
    }

    LloydResult r;
    r.inertia = total_inertia(points, centroids, assign);
    r.centroids = std::move(centroids);
    r.assign = std::move(assign);
    return r;
}

}  // namespace

Matrix kmeans_pp_init(const Eigen::Ref<const Matrix>& points, int k, std::uint64_t seed) {
    if (points.rows() == 0) throw EmptyInput("k-means++ on an empty point set");
    if (k < 1) throw InvalidConfig("k must be >= 1");
    if (count_distinct_rows(points) < k) {
        throw TooFewDistinctPoints("k=" + std::to_string(k) + " exceeds the number of distinct points");
    }

    Rng rng(seed);
    Matrix centroids(k, points.cols());
    const Index first = static_cast<Index>(rng.index(static_cast<std::size_t>(points.rows())));
    centroids.row(0) = points.row(first);

    Vector min_sq = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const Scalar total = min_sq.sum();
        Index chosen = points.rows() - 1;
        const Scalar target = rng.uniform() * total;
        Scalar cum = 0.0;
        for (Index i = 0; i < points.rows(); ++i) {
            cum += min_sq(i);
            if (cum > target) {
                chosen = i;
                break;
            }
        }
        centroids.row(c) = points.row(chosen);
        min_sq = min_sq.cwiseMin(
            (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }
    return centroids;
}

KMeansResult kmeans(const Eigen::Ref<const Matrix>& points, int k, int restarts,
                    int max_iters, Scalar tol, std::uint64_t seed) {
    if (points.rows() == 0) throw EmptyInput("k-means on an empty point set");
    if (k < 1) throw InvalidConfig("k must be >= 1");
    if (restarts < 1) throw InvalidConfig("restarts must be >= 1");

    LloydResult best;
    best.inertia = std::numeric_limits<Scalar>::infinity();
    for (int r = 0; r < restarts; ++r) {
        LloydResult cur = lloyd(points, kmeans_pp_init(points, k, seed + static_cast<std::uint64_t>(r)),
                                max_iters, tol);
        if (cur.inertia < best.inertia) best = std::move(cur);
    }

    KMeansResult out;
    out.model.centroids = std::move(best.centroids);
    out.model.inertia = best.inertia;
    out.model.k = k;
    out.model.restarts_run = restarts;
    out.assignment.labels = std::move(best.assign);
    return out;
}

void dump_assignment_csv(const KMeansResult& result,
                         const Eigen::Ref<const Matrix>& points, const std::string& path) {
    csv::Writer w(path);
    w.row({"row_index", "cluster_id", "distance_to_centroid"});
    for (Index i = 0; i < points.rows(); ++i) {
        const int c = result.assignment.labels[static_cast<std::size_t>(i)];
        w.cell(static_cast<long long>(i));
        w.cell(c);
        w.cell(std::sqrt((points.row(i) - result.model.centroids.row(c)).squaredNorm()));
        w.end_row();
    }
}

}  // namespace actembed::cluster
