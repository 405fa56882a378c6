#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "actembed/config.hpp"
#include "actembed/errors.hpp"
#include "actembed/experiment.hpp"
#include "actembed/gradient_check.hpp"
#include "actembed/ingest.hpp"
#include "actembed/rng.hpp"
#include "actembed/version.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                bool has_seed, std::uint64_t seed, bool score_all) {
    actembed::config::ExperimentConfig config = actembed::config::parse_config(config_path);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (has_seed) config.seed = seed;
    if (score_all) config.score_all = true;

    const actembed::experiment::RunReport report = actembed::experiment::run_experiment(config);
    actembed::experiment::emit_report(report, config.out_dir);

    std::cout << "wrote " << report.rows.size() << " runs to " << config.out_dir
              << " (tn=" << report.tn << ")\n";
    for (const auto& agg : report.aggregates) {
        std::cout << "  " << actembed::config::to_string(agg.method) << " alpha="
                  << agg.alpha << " beta=" << agg.beta << " k=" << agg.k
                  << "  acc=" << agg.mean_acc << " ari=" << agg.mean_ari
                  << " nmi=" << agg.mean_nmi << "\n";
    }
    return 0;
}

int synth_command(const std::string& config_path, const std::string& out_csv,
                  bool has_seed, std::uint64_t seed) {
    const actembed::config::ExperimentConfig config =
        actembed::config::parse_config(config_path);
    if (config.synth.classes.empty()) {
        throw actembed::MissingRequired("config has no [synth] section to generate from");
    }
    const std::uint64_t master = has_seed ? seed : config.seed;
    const actembed::SessionSet set = actembed::ingest::generate_synthetic(
        config.synth, actembed::derive_seed(master, {0x44415441ULL}));
    actembed::ingest::write_canonical_csv(set, out_csv);
    std::cout << "wrote " << set.total_records() << " records ("
              << set.sessions.size() << " sessions, " << set.channel_count
              << " channels) to " << out_csv << "\n";
    return 0;
}

int check_gradients_command(std::uint64_t seed) {
    const actembed::autoencoder::GradCheckReport report =
        actembed::autoencoder::check_gradients(5, 1e-5, seed);
    for (const auto& c : report.cases) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << "mode="
                  << actembed::autoencoder::to_string(c.mode) << " shape=";
        for (std::size_t i = 0; i < c.shape.size(); ++i) {
            std::cout << (i ? "-" : "") << c.shape[i];
        }
        std::cout << " max_rel_error=" << c.max_rel_error << "\n";
    }
    std::cout << (report.passed ? "gradient check passed" : "gradient check FAILED")
              << " (worst " << report.worst << ")\n";
    return report.passed ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"activity-embedding pipeline"};
    app.set_version_flag("--version", std::string("actembed ") + actembed::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string out_csv;
    std::uint64_t seed = 0;
    bool score_all = false;

    CLI::App* run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("--config", config_path, "experiment config (INI)")->required();
    run->add_option("--out", out_dir, "output directory (overrides the config)");
    CLI::Option* run_seed = run->add_option("--seed", seed, "master seed (overrides the config)");
    run->add_flag("--score-all", score_all,
                  "score every labeled row instead of the test fold only");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset as canonical CSV");
    synth->add_option("--config", config_path, "config with a [synth] section")->required();
    synth->add_option("--out", out_csv, "output CSV path")->required();
    CLI::Option* synth_seed = synth->add_option("--seed", seed, "master seed");

    CLI::App* grad = app.add_subcommand("check-gradients",
                                        "compare analytic gradients with finite differences");
    grad->add_option("--seed", seed, "base seed for the random networks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return run_command(config_path, out_dir, run_seed->count() > 0, seed, score_all);
        }
        if (synth->parsed()) {
            return synth_command(config_path, out_csv, synth_seed->count() > 0, seed);
        }
        if (grad->parsed()) {
            return check_gradients_command(seed == 0 ? 1 : seed);
        }
    } catch (const actembed::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
