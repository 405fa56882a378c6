#include "actembed/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "actembed/csv.hpp"
#include "actembed/errors.hpp"

namespace actembed::config {

std::string to_string(Method method) {
    switch (method) {
        case Method::Pca: return "PCA";
        case Method::AeOnly: return "AE_ONLY";
        case Method::TcAe: return "TC_AE";
        case Method::LpAe: return "LP_AE";
        case Method::Joint: return "JOINT";
    }
    return "JOINT";
}

Method method_from_string(const std::string& name) {
    if (name == "PCA") return Method::Pca;
    if (name == "AE_ONLY") return Method::AeOnly;
    if (name == "TC_AE") return Method::TcAe;
    if (name == "LP_AE") return Method::LpAe;
    if (name == "JOINT") return Method::Joint;
    throw ConfigTypeError("unknown method \"" + name + "\"");
}

autoencoder::Mode mode_for(Method method) {
    switch (method) {
        case Method::AeOnly: return autoencoder::Mode::AeOnly;
        case Method::TcAe: return autoencoder::Mode::TcAe;
        case Method::LpAe: return autoencoder::Mode::LpAe;
        case Method::Joint: return autoencoder::Mode::Joint;
        case Method::Pca: break;
    }
    throw InvalidConfig("PCA has no training mode");
}

std::string to_string(DatasetSource source) {
    switch (source) {
        case DatasetSource::Synthetic: return "synthetic";
        case DatasetSource::Csv: return "csv";
        case DatasetSource::Pamap2: return "pamap2";
    }
    return "synthetic";
}

namespace {

struct IniValue {
    std::string value;
    std::size_t line = 0;
    bool consumed = false;
};

using IniSection = std::map<std::string, IniValue>;

struct IniFile {
    std::string origin;
    std::map<std::string, IniSection> sections;
};

IniFile parse_ini(const std::string& text, const std::string& origin) {
    IniFile file;
    file.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = csv::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigTypeError(origin + ":" + std::to_string(line_no) +
                                      ": malformed section header");
            }
            section = csv::trim(t.substr(1, t.size() - 2));
            file.sections[section];  // a section may be empty
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigTypeError(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
        }
        const std::string key = csv::trim(t.substr(0, eq));
        const std::string value = csv::trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigTypeError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        auto [it, inserted] = file.sections[section].emplace(key, IniValue{value, line_no, false});
        if (!inserted) {
            throw ConfigTypeError(origin + ":" + std::to_string(line_no) +
                                  ": duplicate key \"" + key + "\"");
        }
    }
    return file;
}

class SectionReader {
public:
    SectionReader(IniFile& file, const std::string& name) : file_(file), name_(name) {
        const auto it = file.sections.find(name);
        section_ = it == file.sections.end() ? nullptr : &it->second;
    }

    bool present() const { return section_ != nullptr; }

    bool has(const std::string& key) const {
        return section_ && section_->count(key) > 0;
    }

    std::string where(const std::string& key) const {
        const auto& v = section_->at(key);
        return file_.origin + ":" + std::to_string(v.line) + ": [" + name_ + "] " + key;
    }

    std::string raw(const std::string& key) {
        IniValue& v = section_->at(key);
        v.consumed = true;
        return v.value;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        return has(key) ? raw(key) : fallback;
    }

    std::string require_string(const std::string& key) {
        if (!has(key)) {
            throw MissingRequired("missing required key \"" + key + "\" in [" + name_ +
                                  "] of " + file_.origin);
        }
        return raw(key);
    }

    double get_double(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        return parse_double_at(key, raw(key));
    }

    int get_int(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        return parse_int_at(key, raw(key));
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const std::string s = raw(key);
        try {
            return std::stoull(s);
        } catch (...) {
            throw ConfigTypeError(where(key) + ": expected an unsigned integer, got \"" + s + "\"");
        }
    }

    bool get_bool(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const std::string s = raw(key);
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw ConfigTypeError(where(key) + ": expected a boolean, got \"" + s + "\"");
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        std::vector<double> out;
        for (const auto& tok : split_list(raw(key))) out.push_back(parse_double_at(key, tok));
        return out;
    }

    std::vector<int> get_ints(const std::string& key, std::vector<int> fallback) {
        if (!has(key)) return fallback;
        std::vector<int> out;
        for (const auto& tok : split_list(raw(key))) out.push_back(parse_int_at(key, tok));
        return out;
    }

    std::vector<std::string> get_strings(const std::string& key,
                                         std::vector<std::string> fallback) {
        if (!has(key)) return fallback;
        return split_list(raw(key));
    }

private:
    static std::vector<std::string> split_list(const std::string& value) {
        std::vector<std::string> out;
        if (csv::trim(value).empty()) return out;
        for (const auto& tok : csv::split(value)) out.push_back(csv::trim(tok));
        return out;
    }

    double parse_double_at(const std::string& key, const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size()) {
            throw ConfigTypeError(where(key) + ": expected a number, got \"" + s + "\"");
        }
        return v;
    }

    int parse_int_at(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (...) {
            throw ConfigTypeError(where(key) + ": expected an integer, got \"" + s + "\"");
        }
    }

    IniFile& file_;
    std::string name_;
    IniSection* section_;
};

const std::vector<std::string> kKnownSections = {
    "dataset", "synth", "neighbors", "model", "training", "cluster", "experiment"};

void reject_unconsumed(const IniFile& file) {
    for (const auto& [section, keys] : file.sections) {
        if (std::find(kKnownSections.begin(), kKnownSections.end(), section) ==
            kKnownSections.end()) {
            throw UnknownKey(file.origin + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : keys) {
            if (!value.consumed) {
                throw UnknownKey(file.origin + ":" + std::to_string(value.line) +
                                 ": unknown key \"" + key + "\" in [" + section + "]");
            }
        }
    }
}

ingest::SynthConfig parse_synth(SectionReader& synth) {
    ingest::SynthConfig out;
    out.channel_count = synth.get_int("channels", out.channel_count);
    out.sample_rate = synth.get_double("sample_rate", out.sample_rate);
    out.session_seconds = synth.get_double("session_seconds", out.session_seconds);
    out.sessions_per_subject = synth.get_int("sessions_per_subject", out.sessions_per_subject);
    out.min_bout_seconds = synth.get_double("min_bout_seconds", out.min_bout_seconds);
    out.max_bout_seconds = synth.get_double("max_bout_seconds", out.max_bout_seconds);
    out.noise_std = synth.get_double("noise_std", out.noise_std);
    out.subject_offsets = synth.get_doubles("subject_offsets", {});

    for (int k = 0;; ++k) {
        const std::string amp_key = "class" + std::to_string(k) + "_amp";
        const std::string freq_key = "class" + std::to_string(k) + "_freq";
        if (!synth.has(amp_key) && !synth.has(freq_key)) break;
        ingest::SynthClass cls;
        for (const double a : synth.get_doubles(amp_key, {})) cls.amplitudes.push_back(a);
        for (const double f : synth.get_doubles(freq_key, {})) cls.frequencies.push_back(f);
        if (cls.amplitudes.size() != cls.frequencies.size()) {
            throw InvalidConfig("[synth] " + amp_key + " and " + freq_key +
                                " must list one value per channel");
        }
        out.classes.push_back(std::move(cls));
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (source != DatasetSource::Synthetic && path.empty()) {
        throw MissingRequired("dataset path is required for source " + to_string(source));
    }
    if (source == DatasetSource::Synthetic) {
        if (synth.classes.size() < 2) {
            throw InvalidConfig("synthetic experiments need at least 2 classes");
        }
    }
    if (sample_rate <= 0) throw InvalidConfig("sample_rate must be positive");
    if (window_seconds <= 0 || step_seconds <= 0) {
        throw InvalidConfig("window_seconds and step_seconds must be positive");
    }
    if (m < 1 || n < 1) throw InvalidConfig("neighbor counts m and n must be >= 1");
    if (layer_sizes.empty()) {
        throw MissingRequired("model layer_sizes is required");
    }
    for (const Index s : layer_sizes) {
        if (s < 1) throw InvalidConfig("layer sizes must be positive");
    }
    training.validate();
    if (kmeans_restarts < 1) throw InvalidConfig("kmeans restarts must be >= 1");
    if (kmeans_max_iters < 1) throw InvalidConfig("kmeans max_iters must be >= 1");
    if (!(kmeans_tol >= 0)) throw InvalidConfig("kmeans tol must be >= 0");
    if (methods.empty()) throw InvalidConfig("at least one method is required");
    if (k_offsets.empty()) throw InvalidConfig("at least one k offset is required");
    for (const int off : k_offsets) {
        if (off < 0) throw InvalidConfig("k_offsets must be >= 0");
    }
    if (folds < 2) throw InvalidConfig("folds must be >= 2");
    for (const Scalar a : alpha_grid) {
        if (a < 0 || a > 1) throw InvalidConfig("alpha_grid values must lie in [0, 1]");
    }
    for (const Scalar b : beta_grid) {
        if (b < 0 || b > 1) throw InvalidConfig("beta_grid values must lie in [0, 1]");
    }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    IniFile file = parse_ini(text, origin);
    ExperimentConfig out;

    SectionReader dataset(file, "dataset");
    if (!dataset.present()) throw MissingRequired(origin + ": missing [dataset] section");
    const std::string source = dataset.require_string("source");
    if (source == "synthetic") {
        out.source = DatasetSource::Synthetic;
    } else if (source == "csv") {
        out.source = DatasetSource::Csv;
    } else if (source == "pamap2") {
        out.source = DatasetSource::Pamap2;
    } else {
        throw ConfigTypeError(dataset.where("source") + ": unknown source \"" + source + "\"");
    }
    out.path = dataset.get_string("path", out.path);
    out.sample_rate = dataset.get_double("sample_rate", out.sample_rate);
    out.channels = dataset.get_ints("channels", out.channels);
    out.window_seconds = dataset.get_double("window_seconds", out.window_seconds);
    out.step_seconds = dataset.get_double("step_seconds", out.step_seconds);

    SectionReader synth(file, "synth");
    if (synth.present()) {
        out.synth = parse_synth(synth);
    } else if (out.source == DatasetSource::Synthetic) {
        throw MissingRequired(origin + ": source = synthetic needs a [synth] section");
    }

    SectionReader nbr(file, "neighbors");
    out.m = nbr.present() ? nbr.get_int("m", out.m) : out.m;
    out.n = nbr.present() ? nbr.get_int("n", out.n) : out.n;

    SectionReader model(file, "model");
    if (!model.present() || !model.has("layer_sizes")) {
        throw MissingRequired(origin + ": [model] layer_sizes is required");
    }
    for (const int s : model.get_ints("layer_sizes", {})) {
        out.layer_sizes.push_back(static_cast<Index>(s));
    }
    out.leaky_slope = model.get_double("leaky_slope", out.leaky_slope);

    SectionReader training(file, "training");
    if (training.present()) {
        out.training.alpha = training.get_double("alpha", out.training.alpha);
        out.training.beta = training.get_double("beta", out.training.beta);
        out.training.learning_rate =
            training.get_double("learning_rate", out.training.learning_rate);
        out.training.batch_size = training.get_int("batch_size", out.training.batch_size);
        out.training.max_epochs = training.get_int("max_epochs", out.training.max_epochs);
        out.training.patience = training.get_int("patience", out.training.patience);
        out.training.val_fraction =
            training.get_double("val_fraction", out.training.val_fraction);
    }

    SectionReader cluster(file, "cluster");
    if (cluster.present()) {
        out.kmeans_restarts = cluster.get_int("restarts", out.kmeans_restarts);
        out.kmeans_max_iters = cluster.get_int("max_iters", out.kmeans_max_iters);
        out.kmeans_tol = cluster.get_double("tol", out.kmeans_tol);
    }

    SectionReader experiment(file, "experiment");
    if (experiment.present()) {
        if (experiment.has("methods")) {
            out.methods.clear();
            for (const auto& name : experiment.get_strings("methods", {})) {
                out.methods.push_back(method_from_string(name));
            }
        }
        out.k_offsets = experiment.get_ints("k_offsets", out.k_offsets);
        out.folds = experiment.get_int("folds", out.folds);
        out.seed = experiment.get_u64("seed", out.seed);
        out.out_dir = experiment.get_string("out_dir", out.out_dir);
        out.score_all = experiment.get_bool("score_all", out.score_all);
        out.alpha_grid = experiment.get_doubles("alpha_grid", out.alpha_grid);
        out.beta_grid = experiment.get_doubles("beta_grid", out.beta_grid);
        out.dump_neighbors = experiment.get_bool("dump_neighbors", out.dump_neighbors);
        out.dump_assignments = experiment.get_bool("dump_assignments", out.dump_assignments);
        out.dump_features = experiment.get_bool("dump_features", out.dump_features);
        out.save_models = experiment.get_bool("save_models", out.save_models);
    }

    reject_unconsumed(file);
    out.validate();
    return out;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += csv::format_double(values[i]);
    }
    return out;
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

}  // namespace

std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[dataset]\n";
    out << "source = " << to_string(c.source) << "\n";
    if (!c.path.empty()) out << "path = " << c.path << "\n";
    out << "sample_rate = " << csv::format_double(c.sample_rate) << "\n";
    if (!c.channels.empty()) out << "channels = " << join_ints(c.channels) << "\n";
    out << "window_seconds = " << csv::format_double(c.window_seconds) << "\n";
    out << "step_seconds = " << csv::format_double(c.step_seconds) << "\n";

    if (c.source == DatasetSource::Synthetic || !c.synth.classes.empty()) {
        out << "\n[synth]\n";
        out << "channels = " << c.synth.channel_count << "\n";
        out << "sample_rate = " << csv::format_double(c.synth.sample_rate) << "\n";
        out << "session_seconds = " << csv::format_double(c.synth.session_seconds) << "\n";
        out << "sessions_per_subject = " << c.synth.sessions_per_subject << "\n";
        out << "min_bout_seconds = " << csv::format_double(c.synth.min_bout_seconds) << "\n";
        out << "max_bout_seconds = " << csv::format_double(c.synth.max_bout_seconds) << "\n";
        out << "noise_std = " << csv::format_double(c.synth.noise_std) << "\n";
        out << "subject_offsets = " << join_doubles(c.synth.subject_offsets) << "\n";
        for (std::size_t k = 0; k < c.synth.classes.size(); ++k) {
            out << "class" << k << "_amp = " << join_doubles(c.synth.classes[k].amplitudes)
                << "\n";
            out << "class" << k << "_freq = " << join_doubles(c.synth.classes[k].frequencies)
                << "\n";
        }
    }

    out << "\n[neighbors]\n";
    out << "m = " << c.m << "\n";
    out << "n = " << c.n << "\n";

    out << "\n[model]\n";
    std::vector<int> sizes;
    for (const Index s : c.layer_sizes) sizes.push_back(static_cast<int>(s));
    out << "layer_sizes = " << join_ints(sizes) << "\n";
    out << "leaky_slope = " << csv::format_double(c.leaky_slope) << "\n";

    out << "\n[training]\n";
    out << "alpha = " << csv::format_double(c.training.alpha) << "\n";
    out << "beta = " << csv::format_double(c.training.beta) << "\n";
    out << "learning_rate = " << csv::format_double(c.training.learning_rate) << "\n";
    out << "batch_size = " << c.training.batch_size << "\n";
    out << "max_epochs = " << c.training.max_epochs << "\n";
    out << "patience = " << c.training.patience << "\n";
    out << "val_fraction = " << csv::format_double(c.training.val_fraction) << "\n";

    out << "\n[cluster]\n";
    out << "restarts = " << c.kmeans_restarts << "\n";
    out << "max_iters = " << c.kmeans_max_iters << "\n";
    out << "tol = " << csv::format_double(c.kmeans_tol) << "\n";

    out << "\n[experiment]\n";
    out << "methods = ";
    for (std::size_t i = 0; i < c.methods.size(); ++i) {
        if (i) out << ",";
        out << to_string(c.methods[i]);
    }
    out << "\n";
    out << "k_offsets = " << join_ints(c.k_offsets) << "\n";
    out << "folds = " << c.folds << "\n";
    out << "seed = " << c.seed << "\n";
    out << "out_dir = " << c.out_dir << "\n";
    out << "score_all = " << (c.score_all ? "true" : "false") << "\n";
    if (!c.alpha_grid.empty()) out << "alpha_grid = " << join_doubles(c.alpha_grid) << "\n";
    if (!c.beta_grid.empty()) out << "beta_grid = " << join_doubles(c.beta_grid) << "\n";
    out << "dump_neighbors = " << (c.dump_neighbors ? "true" : "false") << "\n";
    out << "dump_assignments = " << (c.dump_assignments ? "true" : "false") << "\n";
    out << "dump_features = " << (c.dump_features ? "true" : "false") << "\n";
    out << "save_models = " << (c.save_models ? "true" : "false") << "\n";
    return out.str();
}

}  // namespace actembed::config
