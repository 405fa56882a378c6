#include "actembed/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "actembed/errors.hpp"
#include "actembed/rng.hpp"

namespace actembed::autoencoder {

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Joint: return "JOINT";
        case Mode::AeOnly: return "AE_ONLY";
        case Mode::TcAe: return "TC_AE";
        case Mode::LpAe: return "LP_AE";
    }
    return "JOINT";
}

Mode mode_from_string(const std::string& name) {
    if (name == "JOINT") return Mode::Joint;
    if (name == "AE_ONLY") return Mode::AeOnly;
    if (name == "TC_AE") return Mode::TcAe;
    if (name == "LP_AE") return Mode::LpAe;
    throw InvalidConfig("unknown mode \"" + name + "\"");
}

void TrainingConfig::validate() const {
    if (alpha < 0 || beta < 0 || alpha + beta > 1.0) {
        throw InvalidWeights("need alpha >= 0, beta >= 0 and alpha + beta <= 1 (got alpha=" +
                             std::to_string(alpha) + ", beta=" + std::to_string(beta) + ")");
    }
    if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) {
        throw InvalidConfig("learning_rate must be finite and >= 0");
    }
    if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
    if (max_epochs < 1) throw InvalidConfig("max_epochs must be >= 1");
    if (patience < 1) throw InvalidConfig("patience must be >= 1");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
        throw InvalidConfig("val_fraction must lie in (0, 1)");
    }
}

namespace {

// [D, h1, ..., hk, h_{k-1}, ..., h1, D]
std::vector<Index> full_dims(const std::vector<Index>& encoder_sizes) {
    std::vector<Index> dims = encoder_sizes;
    for (std::size_t i = encoder_sizes.size() - 1; i-- > 0;) {
        dims.push_back(encoder_sizes[i]);
    }
    return dims;
}

Matrix leaky(const Matrix& z, Scalar slope) {
    return z.unaryExpr([slope](Scalar v) { return v >= 0 ? v : slope * v; });
}

Matrix leaky_derivative(const Matrix& z, Scalar slope) {
    return z.unaryExpr([slope](Scalar v) { return v >= 0 ? Scalar{1} : slope; });
}

struct ForwardCache {
    std::vector<Matrix> activations;  // a[0] = X, ..., a[L] = reconstruction
    std::vector<Matrix> pre;          // z[l] for affine layer l
};

ForwardCache forward_cached(const MlpParams& params, const Eigen::Ref<const Matrix>& X) {
    if (X.cols() != params.input_dim()) {
        throw DimMismatch("input dim " + std::to_string(X.cols()) + " vs network dim " +
                          std::to_string(params.input_dim()));
    }
    ForwardCache cache;
    const std::size_t layers = params.total_layers();
    cache.activations.reserve(layers + 1);
    cache.pre.reserve(layers);
    cache.activations.push_back(X);
    for (std::size_t l = 0; l < layers; ++l) {
        Matrix z = (cache.activations.back() * params.weights[l].transpose()).rowwise() +
                   params.biases[l].transpose();
        if (l + 1 == layers) {
            cache.activations.push_back(z);  // linear reconstruction layer
        } else {
            cache.activations.push_back(leaky(z, params.leaky_slope));
        }
        cache.pre.push_back(std::move(z));
    }
    return cache;
}

// Per-sample neighbor means and loss bookkeeping for the auxiliary terms.
// An empty list falls back to the sample itself, which turns that term into
// the plain reconstruction loss for the row.
struct AuxTerm {
    Vector mean;        // mean of neighbor input rows
    Scalar mean_sq = 0; // mean of ||x_j||^2 over neighbors (for the exact loss)
};

AuxTerm aux_term(const FeatureMatrix& matrix, int row, const std::vector<int>& list) {
    AuxTerm t;
    if (list.empty()) {
        t.mean = matrix.values.row(row).transpose();
        t.mean_sq = t.mean.squaredNorm();
        return t;
    }
    t.mean = Vector::Zero(matrix.dim());
    for (const int j : list) {
        t.mean += matrix.values.row(j).transpose();
        t.mean_sq += matrix.values.row(j).squaredNorm();
    }
    t.mean /= static_cast<Scalar>(list.size());
    t.mean_sq /= static_cast<Scalar>(list.size());
    return t;
}

// mean_j ||x_j - r||^2 = ||r||^2 - 2 r.mean + mean_j ||x_j||^2
Scalar aux_loss(const AuxTerm& t, const Eigen::Ref<const Vector>& reconstruction) {
    return reconstruction.squaredNorm() - 2.0 * reconstruction.dot(t.mean) + t.mean_sq;
}

}  // namespace

MlpParams init_network(const std::vector<Index>& layer_sizes, Scalar leaky_slope,
                       std::uint64_t seed) {
    if (layer_sizes.size() < 2) {
        throw InvalidShape("encoder needs at least [input, embedding] layer sizes");
    }
    for (const Index s : layer_sizes) {
        if (s < 1) throw InvalidShape("layer sizes must be positive");
    }

    MlpParams params;
    params.layer_sizes = layer_sizes;
    params.leaky_slope = leaky_slope;

    const std::vector<Index> dims = full_dims(layer_sizes);
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const Index fan_in = dims[l];
        const Index fan_out = dims[l + 1];
        const Scalar half_width = 0.5 * std::sqrt(6.0 / static_cast<Scalar>(fan_in));
        Matrix w(fan_out, fan_in);
        for (Index r = 0; r < fan_out; ++r) {
            for (Index c = 0; c < fan_in; ++c) {
                w(r, c) = rng.uniform(-half_width, half_width);
            }
        }
        params.weights.push_back(std::move(w));
        params.biases.push_back(Vector::Zero(fan_out));
    }
    return params;
}

BatchForward forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& X) {
    const ForwardCache cache = forward_cached(params, X);
    BatchForward out;
    out.embedding = cache.activations[params.encoder_layers()];
    out.reconstruction = cache.activations.back();
    return out;
}

ForwardResult forward(const MlpParams& params, const Eigen::Ref<const Vector>& x) {
    const BatchForward b = forward_batch(params, x.transpose());
    return {b.embedding.row(0).transpose(), b.reconstruction.row(0).transpose()};
}

Scalar loss_ae(const Eigen::Ref<const Vector>& x,
               const Eigen::Ref<const Vector>& reconstruction) {
    if (x.size() != reconstruction.size()) {
        throw DimMismatch("loss_ae: vector sizes differ");
    }
    return (x - reconstruction).squaredNorm();
}

Scalar loss_tc(const Eigen::Ref<const Vector>& reconstruction,
               const Eigen::Ref<const Matrix>& neighbor_rows) {
    if (neighbor_rows.rows() == 0) throw EmptyInput("loss_tc: no neighbor rows");
    if (neighbor_rows.cols() != reconstruction.size()) {
        throw DimMismatch("loss_tc: neighbor dim mismatch");
    }
    return (neighbor_rows.rowwise() - reconstruction.transpose())
               .rowwise()
               .squaredNorm()
               .mean();
}

Scalar loss_lp(const Eigen::Ref<const Vector>& reconstruction,
               const Eigen::Ref<const Matrix>& neighbor_rows) {
    return loss_tc(reconstruction, neighbor_rows);
}

Scalar loss_joint(Scalar ae, Scalar tc, Scalar lp, Scalar alpha, Scalar beta) {
    if (alpha < 0 || beta < 0 || alpha + beta > 1.0) {
        throw InvalidWeights("loss_joint: invalid alpha/beta");
    }
    return (1.0 - alpha - beta) * ae + alpha * tc + beta * lp;
}

BackwardResult backward(const MlpParams& params, const FeatureMatrix& matrix,
                        const std::vector<int>& batch_rows,
                        const neighbors::NeighborhoodIndex& nbr,
                        const TrainingConfig& config) {
    if (batch_rows.empty()) throw EmptyBatch("backward on an empty batch");
    const Scalar alpha = config.effective_alpha();
    const Scalar beta = config.effective_beta();
    const Index batch = static_cast<Index>(batch_rows.size());
    const Index dim = matrix.dim();

    Matrix X(batch, dim);
    for (Index b = 0; b < batch; ++b) {
        X.row(b) = matrix.values.row(batch_rows[static_cast<std::size_t>(b)]);
    }

    const ForwardCache cache = forward_cached(params, X);
    const Matrix& recon = cache.activations.back();

    // output error of the batch-mean joint loss:
    // (2/B) [(1-a-b)(r - x) + a (r - mean_tc) + b (r - mean_lp)]
    Matrix delta(batch, dim);
    Scalar loss_sum = 0.0;
    for (Index b = 0; b < batch; ++b) {
        const int row = batch_rows[static_cast<std::size_t>(b)];
        const Vector r = recon.row(b).transpose();
        const Vector x = X.row(b).transpose();

        Vector d = (1.0 - alpha - beta) * (r - x);
        Scalar sample_loss = (1.0 - alpha - beta) * (r - x).squaredNorm();
        if (alpha != 0.0) {
            const AuxTerm t = aux_term(matrix, row, nbr.temporal[static_cast<std::size_t>(row)]);
            d += alpha * (r - t.mean);
            sample_loss += alpha * aux_loss(t, r);
        }
        if (beta != 0.0) {
            const AuxTerm t = aux_term(matrix, row, nbr.feature[static_cast<std::size_t>(row)]);
            d += beta * (r - t.mean);
            sample_loss += beta * aux_loss(t, r);
        }
        delta.row(b) = (2.0 / static_cast<Scalar>(batch)) * d.transpose();
        loss_sum += sample_loss;
    }

    BackwardResult out;
    out.loss = loss_sum / static_cast<Scalar>(batch);
    const std::size_t layers = params.total_layers();
    out.gradients.weights.resize(layers);
    out.gradients.biases.resize(layers);
    for (std::size_t l = layers; l-- > 0;) {
        out.gradients.weights[l] = delta.transpose() * cache.activations[l];
        out.gradients.biases[l] = delta.colwise().sum().transpose();
        if (l > 0) {
            delta = (delta * params.weights[l])
                        .cwiseProduct(leaky_derivative(cache.pre[l - 1], params.leaky_slope));
        }
    }
    return out;
}

Scalar batch_loss(const MlpParams& params, const FeatureMatrix& matrix,
                  const std::vector<int>& batch_rows,
                  const neighbors::NeighborhoodIndex& nbr,
                  const TrainingConfig& config) {
    if (batch_rows.empty()) throw EmptyBatch("loss of an empty batch");
    const Scalar alpha = config.effective_alpha();
    const Scalar beta = config.effective_beta();

    Matrix X(static_cast<Index>(batch_rows.size()), matrix.dim());
    for (std::size_t b = 0; b < batch_rows.size(); ++b) {
        X.row(static_cast<Index>(b)) = matrix.values.row(batch_rows[b]);
    }
    const BatchForward fwd = forward_batch(params, X);

    Scalar loss_sum = 0.0;
    for (std::size_t b = 0; b < batch_rows.size(); ++b) {
        const int row = batch_rows[b];
        const Vector r = fwd.reconstruction.row(static_cast<Index>(b)).transpose();
        Scalar sample = (1.0 - alpha - beta) *
                        (X.row(static_cast<Index>(b)).transpose() - r).squaredNorm();
        if (alpha != 0.0) {
            sample += alpha *
                      aux_loss(aux_term(matrix, row, nbr.temporal[static_cast<std::size_t>(row)]), r);
        }
        if (beta != 0.0) {
            sample += beta *
                      aux_loss(aux_term(matrix, row, nbr.feature[static_cast<std::size_t>(row)]), r);
        }
        loss_sum += sample;
    }
    return loss_sum / static_cast<Scalar>(batch_rows.size());
}

namespace {

struct ValSplit {
    std::vector<int> train_rows;
    std::vector<int> val_rows;
};

// All segments of one session land on the same side; falls back to a row
// split when the fold has fewer than 2 sessions.
ValSplit split_validation(const FeatureMatrix& matrix, Scalar val_fraction,
                          std::uint64_t seed) {
    const Index rows = matrix.rows();
    ValSplit split;
    const std::vector<int> keys = session_keys(matrix);
    const int num_sessions = keys.empty() ? 0 : *std::max_element(keys.begin(), keys.end()) + 1;

    Rng rng(seed);
    if (num_sessions >= 2) {
        std::vector<int> order(static_cast<std::size_t>(num_sessions));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);

        std::vector<Index> session_rows(static_cast<std::size_t>(num_sessions), 0);
        for (const int k : keys) ++session_rows[static_cast<std::size_t>(k)];

        const auto target = static_cast<Index>(
            std::llround(val_fraction * static_cast<Scalar>(rows)));
        std::vector<bool> in_val(static_cast<std::size_t>(num_sessions), false);
        Index val_count = 0;
        for (const int s : order) {
            if (val_count >= std::max<Index>(target, 1)) break;
            if (static_cast<int>(std::count(in_val.begin(), in_val.end(), false)) <= 1) break;
            in_val[static_cast<std::size_t>(s)] = true;
            val_count += session_rows[static_cast<std::size_t>(s)];
        }
        for (std::size_t i = 0; i < keys.size(); ++i) {
            (in_val[static_cast<std::size_t>(keys[i])] ? split.val_rows : split.train_rows)
                .push_back(static_cast<int>(i));
        }
    } else {
        std::vector<int> order(static_cast<std::size_t>(rows));
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        Index val_count = static_cast<Index>(
            std::llround(val_fraction * static_cast<Scalar>(rows)));
        val_count = std::clamp<Index>(val_count, rows > 1 ? 1 : 0, rows - 1);
        for (Index i = 0; i < rows; ++i) {
            (i < val_count ? split.val_rows : split.train_rows).push_back(order[static_cast<std::size_t>(i)]);
        }
        std::sort(split.val_rows.begin(), split.val_rows.end());
        std::sort(split.train_rows.begin(), split.train_rows.end());
    }
    return split;
}

void apply_update(MlpParams& params, const Gradients& grads, Scalar lr) {
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        params.weights[l] -= lr * grads.weights[l];
        params.biases[l] -= lr * grads.biases[l];
    }
}

}  // namespace

TrainedModel train(const FeatureMatrix& matrix, const neighbors::NeighborhoodIndex& nbr,
                   const TrainingConfig& config, const std::vector<Index>& encoder_sizes,
                   Scalar leaky_slope, features::Standardizer standardizer) {
    config.validate();
    if (matrix.rows() == 0) throw EmptyInput("training matrix is empty");
    if (encoder_sizes.empty() || encoder_sizes.front() != matrix.dim()) {
        throw InvalidShape("encoder input size must equal the feature dimension");
    }
    if (nbr.temporal.size() != static_cast<std::size_t>(matrix.rows()) ||
        nbr.feature.size() != static_cast<std::size_t>(matrix.rows())) {
        throw DimMismatch("neighborhood index does not cover the training matrix");
    }

    const ValSplit split =
        split_validation(matrix, config.val_fraction, derive_seed(config.seed, {0x5653504cULL}));

    TrainedModel model;
    model.standardizer = std::move(standardizer);
    model.config = config;
    model.params = init_network(encoder_sizes, leaky_slope,
                                derive_seed(config.seed, {0x494e4954ULL}));

    MlpParams best_params = model.params;
    Scalar best_val = std::numeric_limits<Scalar>::infinity();
    int best_epoch = 0;
    int stale_epochs = 0;
    constexpr Scalar kImprovement = 1e-6;

    std::vector<int> train_rows = split.train_rows;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(config.seed,
                                    {0x45504f43ULL, static_cast<std::uint64_t>(epoch)}));
        shuffle_rng.shuffle(train_rows);

        Scalar loss_weighted = 0.0;
        std::vector<int> batch;
        for (std::size_t start = 0; start < train_rows.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(train_rows.size(), start + static_cast<std::size_t>(config.batch_size));
            batch.assign(train_rows.begin() + static_cast<std::ptrdiff_t>(start),
                         train_rows.begin() + static_cast<std::ptrdiff_t>(end));
            const BackwardResult step = backward(model.params, matrix, batch, nbr, config);
            if (!std::isfinite(step.loss)) {
                throw Diverged("training loss is not finite at epoch " + std::to_string(epoch) +
                               " (learning_rate=" + std::to_string(config.learning_rate) + ")");
            }
            apply_update(model.params, step.gradients, config.learning_rate);
            loss_weighted += step.loss * static_cast<Scalar>(batch.size());
        }
        const Scalar train_loss = loss_weighted / static_cast<Scalar>(train_rows.size());

        const Scalar val_loss = split.val_rows.empty()
                                    ? train_loss
                                    : batch_loss(model.params, matrix, split.val_rows, nbr, config);
        if (!std::isfinite(val_loss)) {
            throw Diverged("validation loss is not finite at epoch " + std::to_string(epoch) +
                           " (learning_rate=" + std::to_string(config.learning_rate) + ")");
        }
        model.history.push_back({train_loss, val_loss});
        model.stopped_epoch = epoch;

        if (val_loss < best_val - kImprovement) {
            best_val = val_loss;
            best_params = model.params;
            best_epoch = epoch;
            stale_epochs = 0;
        } else {
            ++stale_epochs;
            if (stale_epochs >= config.patience) break;
        }
    }

    model.params = std::move(best_params);
    model.best_epoch = best_epoch;  // epoch 1 always improves on +inf
    return model;
}

Matrix encode(const MlpParams& params, const Eigen::Ref<const Matrix>& X) {
    if (X.cols() != params.input_dim()) {
        throw DimMismatch("encode: input dim " + std::to_string(X.cols()) +
                          " vs network dim " + std::to_string(params.input_dim()));
    }
    Matrix a = X;
    for (std::size_t l = 0; l < params.encoder_layers(); ++l) {
        Matrix z = (a * params.weights[l].transpose()).rowwise() +
                   params.biases[l].transpose();
        a = leaky(z, params.leaky_slope);
    }
    return a;
}

Matrix encode(const TrainedModel& model, const FeatureMatrix& matrix) {
    return encode(model.params, matrix.values);
}

}  // namespace actembed::autoencoder
