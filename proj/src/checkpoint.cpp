#include "actembed/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "actembed/errors.hpp"

namespace actembed {

namespace {

using nlohmann::json;

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = r > 0 ? static_cast<Index>(rows[0].size()) : 0;
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<Scalar>();
    }
    return m;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const json& arr) {
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = arr[static_cast<std::size_t>(i)].get<Scalar>();
    return v;
}

}  // namespace

void save_checkpoint(const autoencoder::TrainedModel& model, const std::string& path) {
    json body;
    body["layer_sizes"] = model.params.layer_sizes;
    body["leaky_slope"] = model.params.leaky_slope;
    body["weights"] = json::array();
    body["biases"] = json::array();
    for (const auto& w : model.params.weights) body["weights"].push_back(to_json(w));
    for (const auto& b : model.params.biases) body["biases"].push_back(to_json(b));

    body["standardizer"] = {
        {"mean", to_json(model.standardizer.mean)},
        {"stddev", to_json(model.standardizer.stddev)},
        {"zero_variance", model.standardizer.zero_variance},
    };
    body["config"] = {
        {"alpha", model.config.alpha},
        {"beta", model.config.beta},
        {"learning_rate", model.config.learning_rate},
        {"batch_size", model.config.batch_size},
        {"max_epochs", model.config.max_epochs},
        {"patience", model.config.patience},
        {"val_fraction", model.config.val_fraction},
        {"seed", model.config.seed},
        {"mode", autoencoder::to_string(model.config.mode)},
    };
    json history = json::array();
    for (const auto& h : model.history) history.push_back({h.train_loss, h.val_loss});
    body["history"] = std::move(history);
    body["stopped_epoch"] = model.stopped_epoch;
    body["best_epoch"] = model.best_epoch;

    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << kCheckpointMagic << '\n' << body.dump() << '\n';
    if (!out) throw IoError("failed to write " + path);
}

autoencoder::TrainedModel load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != kCheckpointMagic) {
        throw DataError(path + ": not an " + std::string(kCheckpointMagic) + " checkpoint");
    }
    json body;
    try {
        in >> body;
    } catch (const json::exception& e) {
        throw DataError(path + ": malformed checkpoint body: " + e.what());
    }

    autoencoder::TrainedModel model;
    model.params.layer_sizes = body.at("layer_sizes").get<std::vector<Index>>();
    model.params.leaky_slope = body.at("leaky_slope").get<Scalar>();
    for (const auto& w : body.at("weights")) model.params.weights.push_back(matrix_from_json(w));
    for (const auto& b : body.at("biases")) model.params.biases.push_back(vector_from_json(b));

    const json& std_json = body.at("standardizer");
    model.standardizer.mean = vector_from_json(std_json.at("mean"));
    model.standardizer.stddev = vector_from_json(std_json.at("stddev"));
    model.standardizer.zero_variance = std_json.at("zero_variance").get<std::vector<bool>>();

    const json& cfg = body.at("config");
    model.config.alpha = cfg.at("alpha").get<Scalar>();
    model.config.beta = cfg.at("beta").get<Scalar>();
    model.config.learning_rate = cfg.at("learning_rate").get<Scalar>();
    model.config.batch_size = cfg.at("batch_size").get<int>();
    model.config.max_epochs = cfg.at("max_epochs").get<int>();
    model.config.patience = cfg.at("patience").get<int>();
    model.config.val_fraction = cfg.at("val_fraction").get<Scalar>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    model.config.mode = autoencoder::mode_from_string(cfg.at("mode").get<std::string>());

    for (const auto& h : body.at("history")) {
        model.history.push_back({h[0].get<Scalar>(), h[1].get<Scalar>()});
    }
    model.stopped_epoch = body.at("stopped_epoch").get<int>();
    model.best_epoch = body.at("best_epoch").get<int>();
    return model;
}

}  // namespace actembed
