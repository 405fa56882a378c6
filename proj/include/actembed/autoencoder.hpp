#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actembed/features.hpp"
#include "actembed/neighbors.hpp"
#include "actembed/types.hpp"

namespace actembed::autoencoder {

// Which loss terms drive training. TcAe and LpAe are the single-auxiliary
// ablations; AeOnly is the plain reconstruction baseline.
enum class Mode { Joint, AeOnly, TcAe, LpAe };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

// Fully connected autoencoder. layer_sizes describes the encoder
// [D, h1, ..., hk]; the decoder mirrors it in reverse. Every affine layer is
// followed by LeakyReLU except the final decoder layer, which stays linear.
struct MlpParams {
    std::vector<Index> layer_sizes;
    Scalar leaky_slope = 0.01;
    std::vector<Matrix> weights;  // [out x in], encoder layers then decoder layers
    std::vector<Vector> biases;

    Index input_dim() const { return layer_sizes.front(); }
    Index embedding_dim() const { return layer_sizes.back(); }
    std::size_t encoder_layers() const { return layer_sizes.size() - 1; }
    std::size_t total_layers() const { return weights.size(); }
};

struct TrainingConfig {
    Scalar alpha = 0.3;
    Scalar beta = 0.3;
    Scalar learning_rate = 0.05;
    int batch_size = 32;
    int max_epochs = 500;
    int patience = 10;
    Scalar val_fraction = 0.15;
    std::uint64_t seed = 0;
    Mode mode = Mode::Joint;

    // loss weights actually applied under the selected mode
    Scalar effective_alpha() const {
        return (mode == Mode::Joint || mode == Mode::TcAe) ? alpha : 0.0;
    }
    Scalar effective_beta() const {
        return (mode == Mode::Joint || mode == Mode::LpAe) ? beta : 0.0;
    }

    void validate() const;
};

struct EpochStats {
    Scalar train_loss = 0.0;
    Scalar val_loss = 0.0;
};

struct TrainedModel {
    MlpParams params;
    features::Standardizer standardizer;  // statistics used at fit time
    TrainingConfig config;
    std::vector<EpochStats> history;
    int stopped_epoch = 0;  // last epoch run (1-based)
    int best_epoch = 0;     // epoch whose parameters are kept
};

// Weights uniform in +-0.5*sqrt(6/fan_in), biases zero; deterministic per seed.
MlpParams init_network(const std::vector<Index>& layer_sizes, Scalar leaky_slope,
                       std::uint64_t seed);

struct ForwardResult {
    Vector embedding;
    Vector reconstruction;
};
ForwardResult forward(const MlpParams& params, const Eigen::Ref<const Vector>& x);

struct BatchForward {
    Matrix embedding;       // [rows x h_k]
    Matrix reconstruction;  // [rows x D]
};
BatchForward forward_batch(const MlpParams& params, const Eigen::Ref<const Matrix>& X);

// ||x - reconstruction||^2, no averaging over dimensions
Scalar loss_ae(const Eigen::Ref<const Vector>& x,
               const Eigen::Ref<const Vector>& reconstruction);

// mean over neighbor rows of ||x_j - reconstruction||^2
Scalar loss_tc(const Eigen::Ref<const Vector>& reconstruction,
               const Eigen::Ref<const Matrix>& neighbor_rows);
Scalar loss_lp(const Eigen::Ref<const Vector>& reconstruction,
               const Eigen::Ref<const Matrix>& neighbor_rows);

// (1-alpha-beta)*ae + alpha*tc + beta*lp
Scalar loss_joint(Scalar ae, Scalar tc, Scalar lp, Scalar alpha, Scalar beta);

struct Gradients {
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
};

struct BackwardResult {
    Gradients gradients;  // of the batch-mean joint loss
    Scalar loss = 0.0;    // batch-mean joint loss at the evaluation point
};

// Exact analytic gradient of the batch-mean joint loss. Rows with an empty
// temporal (or feature) list fall back to the reconstruction term for that
// loss component.
BackwardResult backward(const MlpParams& params, const FeatureMatrix& matrix,
                        const std::vector<int>& batch_rows,
                        const neighbors::NeighborhoodIndex& nbr,
                        const TrainingConfig& config);

// Batch-mean joint loss only (no gradients); the finite-difference oracle
// drives this.
Scalar batch_loss(const MlpParams& params, const FeatureMatrix& matrix,
                  const std::vector<int>& batch_rows,
                  const neighbors::NeighborhoodIndex& nbr,
                  const TrainingConfig& config);

// Mini-batch SGD with a session-stratified validation split and early
// stopping on the validation joint loss; returns the best-epoch parameters.
TrainedModel train(const FeatureMatrix& matrix, const neighbors::NeighborhoodIndex& nbr,
                   const TrainingConfig& config, const std::vector<Index>& encoder_sizes,
                   Scalar leaky_slope, features::Standardizer standardizer);

Matrix encode(const TrainedModel& model, const FeatureMatrix& matrix);
Matrix encode(const MlpParams& params, const Eigen::Ref<const Matrix>& X);

}  // namespace actembed::autoencoder
