#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actembed/autoencoder.hpp"
#include "actembed/ingest.hpp"
#include "actembed/types.hpp"

namespace actembed::config {

enum class Method { Pca, AeOnly, TcAe, LpAe, Joint };

std::string to_string(Method method);
Method method_from_string(const std::string& name);
autoencoder::Mode mode_for(Method method);  // not valid for Pca

enum class DatasetSource { Synthetic, Csv, Pamap2 };

std::string to_string(DatasetSource source);

struct ExperimentConfig {
    // dataset
    DatasetSource source = DatasetSource::Synthetic;
    std::string path;
    Scalar sample_rate = 100.0;
    std::vector<int> channels;  // empty = all
    Scalar window_seconds = 5.12;
    Scalar step_seconds = 1.0;

    ingest::SynthConfig synth;  // used when source == Synthetic

    // neighborhoods
    int m = 5;
    int n = 5;

    // model: encoder layer sizes after the input layer (input is inferred)
    std::vector<Index> layer_sizes;
    Scalar leaky_slope = 0.01;

    autoencoder::TrainingConfig training;  // seed/mode assigned per run

    // clustering
    int kmeans_restarts = 10;
    int kmeans_max_iters = 300;
    Scalar kmeans_tol = 1e-6;

    // experiment sweep
    std::vector<Method> methods = {Method::Pca, Method::AeOnly, Method::TcAe,
                                   Method::LpAe, Method::Joint};
    std::vector<int> k_offsets = {0, 1, 2, 3};
    int folds = 5;
    std::uint64_t seed = 0;
    std::string out_dir = "actembed_out";
    bool score_all = false;
    std::vector<Scalar> alpha_grid;  // empty = {training.alpha}
    std::vector<Scalar> beta_grid;   // empty = {training.beta}

    // optional artifacts
    bool dump_neighbors = false;
    bool dump_assignments = false;
    bool dump_features = false;
    bool save_models = false;

    void validate() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Canonical INI serialization of every effective value; parse_config reads
// it back to an equal config.
std::string to_ini(const ExperimentConfig& config);

}  // namespace actembed::config
