#include "actembed/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "actembed/rng.hpp"

namespace actembed::autoencoder {

namespace {

constexpr Scalar kStep = 1e-5;
constexpr Scalar kAbsFloor = 1e-8;

struct CaseData {
    FeatureMatrix matrix;
    neighbors::NeighborhoodIndex nbr;
    std::vector<int> batch;
};

CaseData make_case(Index dim, std::uint64_t seed) {
    constexpr Index kRows = 8;
    Rng rng(seed);

    CaseData data;
    data.matrix.values.resize(kRows, dim);
    for (Index r = 0; r < kRows; ++r) {
        for (Index c = 0; c < dim; ++c) {
            data.matrix.values(r, c) = rng.uniform(-1.0, 1.0);
        }
        data.matrix.meta.push_back({"subj", "sess", static_cast<int>(r), 0});
        data.batch.push_back(static_cast<int>(r));
    }

    // random neighbor lists; the occasional empty temporal list exercises the
    // reconstruction fallback
    data.nbr.m = 3;
    data.nbr.n = 3;
    for (Index r = 0; r < kRows; ++r) {
        const std::size_t m = rng.index(4);  // 0..3
        const std::size_t n = 1 + rng.index(3);
        std::vector<int> others;
        for (Index j = 0; j < kRows; ++j) {
            if (j != r) others.push_back(static_cast<int>(j));
        }
        rng.shuffle(others);
        data.nbr.temporal.emplace_back(others.begin(),
                                       others.begin() + static_cast<std::ptrdiff_t>(m));
        rng.shuffle(others);
        data.nbr.feature.emplace_back(others.begin(),
                                      others.begin() + static_cast<std::ptrdiff_t>(n));
    }
    return data;
}

Scalar case_error(const CaseData& data, MlpParams params, const TrainingConfig& config) {
    const BackwardResult analytic = backward(params, data.matrix, data.batch, data.nbr, config);

    Scalar worst = 0.0;
    auto probe = [&](Scalar& param, Scalar analytic_grad) {
        const Scalar saved = param;
        param = saved + kStep;
        const Scalar up = batch_loss(params, data.matrix, data.batch, data.nbr, config);
        param = saved - kStep;
        const Scalar down = batch_loss(params, data.matrix, data.batch, data.nbr, config);
        param = saved;
        const Scalar numeric = (up - down) / (2.0 * kStep);
        const Scalar diff = std::abs(analytic_grad - numeric);
        if (diff <= kAbsFloor) return;
        const Scalar rel = diff / std::max(std::abs(analytic_grad), std::abs(numeric));
        worst = std::max(worst, rel);
    };

    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (Index r = 0; r < params.weights[l].rows(); ++r) {
            for (Index c = 0; c < params.weights[l].cols(); ++c) {
                probe(params.weights[l](r, c), analytic.gradients.weights[l](r, c));
            }
        }
        for (Index r = 0; r < params.biases[l].size(); ++r) {
            probe(params.biases[l](r), analytic.gradients.biases[l](r));
        }
    }
    return worst;
}

}  // namespace

GradCheckReport check_gradients(int num_networks, Scalar tolerance, std::uint64_t seed) {
    const std::vector<std::vector<Index>> shapes = {
        {14, 8, 4}, {10, 6, 3}, {14, 9, 4}, {12, 8, 5}, {16, 8, 4}, {9, 5, 2},
    };
    const Mode modes[] = {Mode::AeOnly, Mode::TcAe, Mode::LpAe, Mode::Joint};

    GradCheckReport report;
    report.passed = true;
    for (int net = 0; net < num_networks; ++net) {
        const std::vector<Index>& shape = shapes[static_cast<std::size_t>(net) % shapes.size()];
        const std::uint64_t net_seed = derive_seed(seed, {0x47434845ULL,
                                                          static_cast<std::uint64_t>(net)});
        const CaseData data = make_case(shape.front(), net_seed);
        const MlpParams params = init_network(shape, 0.01, splitmix64(net_seed));

        for (const Mode mode : modes) {
            TrainingConfig config;
            config.alpha = 0.3;
            config.beta = 0.25;
            config.mode = mode;

            GradCheckCase c;
            c.mode = mode;
            c.seed = net_seed;
            c.shape = shape;
            c.max_rel_error = case_error(data, params, config);
            c.passed = c.max_rel_error <= tolerance;
            report.worst = std::max(report.worst, c.max_rel_error);
            report.passed = report.passed && c.passed;
            report.cases.push_back(std::move(c));
        }
    }
    return report;
}

}  // namespace actembed::autoencoder
