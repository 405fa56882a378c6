#include "actembed/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "actembed/baselines.hpp"
#include "actembed/checkpoint.hpp"
#include "actembed/cluster.hpp"
#include "actembed/csv.hpp"
#include "actembed/errors.hpp"
#include "actembed/features.hpp"
#include "actembed/ingest.hpp"
#include "actembed/neighbors.hpp"
#include "actembed/rng.hpp"
#include "actembed/version.hpp"

namespace actembed::experiment {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// stage tags for the splitmix seed tree
constexpr std::uint64_t kTagData = 0x44415441ULL;    // dataset generation
constexpr std::uint64_t kTagFolds = 0x464f4c44ULL;   // cross-validation deal
constexpr std::uint64_t kTagTrain = 0x5452414eULL;   // per-run training
constexpr std::uint64_t kTagKmeans = 0x4b4d4e53ULL;  // per-run clustering

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int thread_budget(int jobs) {
    int budget = 0;
    if (const char* env = std::getenv("ACTEMBED_THREADS")) {
        budget = std::atoi(env);
        if (budget < 0) budget = 0;
    }
    if (budget == 0) {
        budget = static_cast<int>(std::thread::hardware_concurrency());
        if (budget == 0) budget = 1;
    }
    return std::clamp(budget, 1, std::max(jobs, 1));
}

struct GridPoint {
    Scalar alpha = 0.0;
    Scalar beta = 0.0;
};

// Sweep weights only where the mode uses them, so the default singleton grid
// yields exactly one run per (fold, method, k).
std::vector<GridPoint> grid_for(config::Method method, const config::ExperimentConfig& c) {
    const std::vector<Scalar> alphas =
        c.alpha_grid.empty() ? std::vector<Scalar>{c.training.alpha} : c.alpha_grid;
    const std::vector<Scalar> betas =
        c.beta_grid.empty() ? std::vector<Scalar>{c.training.beta} : c.beta_grid;
    switch (method) {
        case config::Method::Pca:
        case config::Method::AeOnly:
            return {{0.0, 0.0}};
        case config::Method::TcAe: {
            std::vector<GridPoint> out;
            for (const Scalar a : alphas) out.push_back({a, 0.0});
            return out;
        }
        case config::Method::LpAe: {
            std::vector<GridPoint> out;
            for (const Scalar b : betas) out.push_back({0.0, b});
            return out;
        }
        case config::Method::Joint: {
            std::vector<GridPoint> out;
            for (const Scalar a : alphas) {
                for (const Scalar b : betas) {
                    if (a + b <= 1.0) out.push_back({a, b});
                }
            }
            if (out.empty()) throw InvalidConfig("alpha/beta grid leaves no point with alpha + beta <= 1");
            return out;
        }
    }
    return {{0.0, 0.0}};
}

SessionSet load_dataset(const config::ExperimentConfig& c) {
    switch (c.source) {
        case config::DatasetSource::Synthetic: {
            SessionSet set = ingest::generate_synthetic(c.synth, derive_seed(c.seed, {kTagData}));
            ingest::select_channels(set, c.channels);
            return set;
        }
        case config::DatasetSource::Csv: {
            SessionSet set = ingest::load_canonical_csv(c.path, {}, c.sample_rate);
            ingest::select_channels(set, c.channels);
            return set;
        }
        case config::DatasetSource::Pamap2:
            return ingest::load_pamap2(c.path, c.sample_rate, c.channels);
    }
    throw InvalidConfig("unhandled dataset source");
}

std::string format_weight(Scalar v) { return csv::format_double(v); }

std::string make_run_id(int fold, config::Method method, const GridPoint& g, int k) {
    return "f" + std::to_string(fold) + "_" + config::to_string(method) + "_a" +
           format_weight(g.alpha) + "_b" + format_weight(g.beta) + "_k" + std::to_string(k);
}

struct FoldContext {
    const config::ExperimentConfig& config;
    const FeatureMatrix& matrix;
    int tn = 0;
    int num_classes = 0;
    std::string out_dir;
};

std::vector<RunRow> run_fold(const FoldContext& ctx, int fold, const FoldSplit& split) {
    const config::ExperimentConfig& c = ctx.config;

    const features::Standardizer standardizer =
        features::fit_standardizer(ctx.matrix, split.train_rows);
    const FeatureMatrix all_std = features::apply_standardizer(standardizer, ctx.matrix);
    const FeatureMatrix train_std = select_rows(all_std, split.train_rows);
    const neighbors::NeighborhoodIndex nbr = neighbors::build_index(train_std, c.m, c.n);

    if (c.dump_neighbors) {
        neighbors::dump_neighbors_csv(nbr, train_std,
                                      ctx.out_dir + "/neighbors_f" + std::to_string(fold) + ".csv");
    }

    // rows eligible for scoring: labeled, and test-side unless score_all
    std::vector<int> candidate;
    if (c.score_all) {
        candidate.resize(static_cast<std::size_t>(ctx.matrix.rows()));
        std::iota(candidate.begin(), candidate.end(), 0);
    } else {
        candidate = split.test_rows;
    }
    std::vector<int> score_rows;
    for (const int r : candidate) {
        if (ctx.matrix.meta[static_cast<std::size_t>(r)].label >= 0) score_rows.push_back(r);
    }
    if (score_rows.empty()) {
        throw DataError("fold " + std::to_string(fold) + " has no labeled rows to score");
    }

    std::vector<RunRow> rows;
    for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
        const config::Method method = c.methods[mi];
        const std::vector<GridPoint> grid = grid_for(method, c);
        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const GridPoint& g = grid[gi];
            const auto method_start = Clock::now();

            Matrix embeddings;
            int epochs = 0;
            try {
                if (method == config::Method::Pca) {
                    const int d_out = static_cast<int>(c.layer_sizes.back());
                    const baselines::PcaModel pca =
                        baselines::pca_fit(train_std.values, d_out, 1e-9, 1000);
                    embeddings = baselines::pca_transform(pca, all_std.values);
                } else {
                    autoencoder::TrainingConfig tc = c.training;
                    tc.alpha = g.alpha;
                    tc.beta = g.beta;
                    tc.mode = config::mode_for(method);
                    tc.seed = derive_seed(c.seed, {kTagTrain, static_cast<std::uint64_t>(fold),
                                                   static_cast<std::uint64_t>(method),
                                                   static_cast<std::uint64_t>(gi)});
                    std::vector<Index> encoder_sizes = {ctx.matrix.dim()};
                    encoder_sizes.insert(encoder_sizes.end(), c.layer_sizes.begin(),
                                         c.layer_sizes.end());
                    const autoencoder::TrainedModel model = autoencoder::train(
                        train_std, nbr, tc, encoder_sizes, c.leaky_slope, standardizer);
                    epochs = model.stopped_epoch;
                    embeddings = autoencoder::encode(model, all_std);
                    if (c.save_models) {
                        save_checkpoint(model, ctx.out_dir + "/model_" +
                                                   config::to_string(method) + "_f" +
                                                   std::to_string(fold) + "_g" +
                                                   std::to_string(gi) + ".actembed");
                    }
                }
            } catch (const Error& e) {
                throw AnnotatedError(e, "fold " + std::to_string(fold) + ", method " +
                                            config::to_string(method));
            }
            const double embed_ms = ms_since(method_start);

            for (const int offset : c.k_offsets) {
                const int k = ctx.tn + offset;
                const auto row_start = Clock::now();
                RunRow row;
                row.fold = fold;
                row.method = method;
                row.alpha = g.alpha;
                row.beta = g.beta;
                row.k = k;
                row.run_id = make_run_id(fold, method, g, k);
                row.epochs = epochs;
                try {
                    const cluster::KMeansResult km = cluster::kmeans(
                        embeddings, k, c.kmeans_restarts, c.kmeans_max_iters, c.kmeans_tol,
                        derive_seed(c.seed, {kTagKmeans, static_cast<std::uint64_t>(fold),
                                             static_cast<std::uint64_t>(method),
                                             static_cast<std::uint64_t>(gi),
                                             static_cast<std::uint64_t>(offset)}));
                    row.inertia = km.model.inertia;

                    std::vector<int> pred;
                    std::vector<int> truth;
                    pred.reserve(score_rows.size());
                    truth.reserve(score_rows.size());
                    for (const int r : score_rows) {
                        pred.push_back(km.assignment.labels[static_cast<std::size_t>(r)]);
                        truth.push_back(ctx.matrix.meta[static_cast<std::size_t>(r)].label);
                    }
                    const metrics::ContingencyTable table =
                        metrics::contingency(pred, truth, k, ctx.num_classes);
                    row.acc = metrics::acc(table);
                    row.ari = metrics::ari(table);
                    row.nmi = metrics::nmi(table);
                    row.confusion = metrics::confusion_after_assignment(table);

                    if (c.dump_assignments) {
                        cluster::dump_assignment_csv(
                            km, embeddings, ctx.out_dir + "/assignments_" + row.run_id + ".csv");
                    }
                } catch (const Error& e) {
                    throw AnnotatedError(e, "fold " + std::to_string(fold) + ", method " +
                                                config::to_string(method) + ", k " +
                                                std::to_string(k));
                }
                row.wall_ms = embed_ms + ms_since(row_start);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<RunRow>& rows) {
    struct Key {
        config::Method method;
        Scalar alpha, beta;
        int k;
        bool operator<(const Key& o) const {
            if (method != o.method) return method < o.method;
            if (alpha != o.alpha) return alpha < o.alpha;
            if (beta != o.beta) return beta < o.beta;
            return k < o.k;
        }
    };
    std::map<Key, std::vector<const RunRow*>> groups;
    for (const RunRow& r : rows) groups[{r.method, r.alpha, r.beta, r.k}].push_back(&r);

    auto mean_std = [](const std::vector<const RunRow*>& g, double RunRow::*field) {
        double mean = 0.0;
        for (const RunRow* r : g) mean += r->*field;
        mean /= static_cast<double>(g.size());
        double var = 0.0;
        for (const RunRow* r : g) var += (r->*field - mean) * (r->*field - mean);
        var /= static_cast<double>(g.size());
        return std::make_pair(mean, std::sqrt(var));
    };

    std::vector<AggregateRow> out;
    for (const auto& [key, g] : groups) {
        AggregateRow a;
        a.method = key.method;
        a.alpha = key.alpha;
        a.beta = key.beta;
        a.k = key.k;
        std::tie(a.mean_acc, a.std_acc) = mean_std(g, &RunRow::acc);
        std::tie(a.mean_ari, a.std_ari) = mean_std(g, &RunRow::ari);
        std::tie(a.mean_nmi, a.std_nmi) = mean_std(g, &RunRow::nmi);
        a.folds = static_cast<int>(g.size());
        out.push_back(a);
    }
    return out;
}

}  // namespace

std::vector<FoldSplit> crossval_split(const FeatureMatrix& matrix, int folds,
                                      std::uint64_t seed) {
    if (folds < 2) throw InvalidConfig("folds must be >= 2");
    const std::vector<int> keys = session_keys(matrix);
    const int num_sessions = keys.empty() ? 0 : *std::max_element(keys.begin(), keys.end()) + 1;
    if (num_sessions < folds) {
        throw TooFewSessions(std::to_string(num_sessions) + " sessions cannot fill " +
                             std::to_string(folds) + " folds");
    }

    std::vector<int> order(static_cast<std::size_t>(num_sessions));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<int> fold_of_session(static_cast<std::size_t>(num_sessions));
    for (std::size_t i = 0; i < order.size(); ++i) {
        fold_of_session[static_cast<std::size_t>(order[i])] = static_cast<int>(i) % folds;
    }

    std::vector<FoldSplit> splits(static_cast<std::size_t>(folds));
    for (std::size_t row = 0; row < keys.size(); ++row) {
        const int f = fold_of_session[static_cast<std::size_t>(keys[row])];
        for (int other = 0; other < folds; ++other) {
            auto& split = splits[static_cast<std::size_t>(other)];
            (other == f ? split.test_rows : split.train_rows).push_back(static_cast<int>(row));
        }
    }
    return splits;
}

RunReport run_experiment(const config::ExperimentConfig& config) {
    config.validate();

    RunReport report;
    report.config = config;

    const SessionSet raw = load_dataset(config);
    const SessionSet repaired = ingest::repair_missing(raw);
    report.class_names = repaired.class_names;

    int skipped = 0;
    const FeatureMatrix matrix =
        features::extract_dataset(repaired, config.window_seconds, config.step_seconds, &skipped);
    if (skipped > 0) {
        std::cerr << "[actembed] warning: " << skipped
                  << " session(s) shorter than one window were skipped\n";
    }

    std::set<int> labels;
    int max_label = -1;
    for (const auto& meta : matrix.meta) {
        if (meta.label >= 0) {
            labels.insert(meta.label);
            max_label = std::max(max_label, meta.label);
        }
    }
    if (labels.empty()) throw DataError("dataset has no labeled windows");
    report.tn = static_cast<int>(labels.size());

    if (config.dump_features) {
        fs::create_directories(config.out_dir);
        features::write_feature_csv(matrix, config.out_dir + "/features.csv");
    }

    const std::vector<FoldSplit> splits =
        crossval_split(matrix, config.folds, derive_seed(config.seed, {kTagFolds}));

    if (config.dump_neighbors || config.dump_assignments || config.save_models) {
        fs::create_directories(config.out_dir);
    }

    FoldContext ctx{config, matrix, report.tn, max_label + 1, config.out_dir};

    std::vector<std::vector<RunRow>> fold_rows(splits.size());
    std::vector<std::exception_ptr> failures(splits.size());
    const int workers = thread_budget(static_cast<int>(splits.size()));
    if (workers <= 1) {
        for (std::size_t f = 0; f < splits.size(); ++f) {
            fold_rows[f] = run_fold(ctx, static_cast<int>(f), splits[f]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t f = next.fetch_add(1);
                if (f >= splits.size()) return;
                try {
                    fold_rows[f] = run_fold(ctx, static_cast<int>(f), splits[f]);
                } catch (...) {
                    failures[f] = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
        for (const auto& failure : failures) {
            if (failure) std::rethrow_exception(failure);
        }
    }

    for (auto& rows : fold_rows) {
        for (auto& row : rows) report.rows.push_back(std::move(row));
    }
    report.aggregates = aggregate(report.rows);
    return report;
}

void emit_report(const RunReport& report, const std::string& out_dir) {
    if (report.rows.empty()) throw EmptyReport("refusing to emit an empty report");
    fs::create_directories(out_dir);

    {
        csv::Writer runs(out_dir + "/runs.csv");
        runs.row({"run_id", "fold", "method", "alpha", "beta", "k", "acc", "ari", "nmi",
                  "inertia", "epochs"});
        for (const RunRow& r : report.rows) {
            runs.cell(r.run_id);
            runs.cell(r.fold);
            runs.cell(config::to_string(r.method));
            runs.cell(r.alpha);
            runs.cell(r.beta);
            runs.cell(r.k);
            runs.cell(r.acc);
            runs.cell(r.ari);
            runs.cell(r.nmi);
            runs.cell(r.inertia);
            runs.cell(r.epochs);
            runs.end_row();
        }
    }
    {
        // wall times vary run to run; they live outside runs.csv so reports
        // stay byte-identical under a fixed seed
        csv::Writer timings(out_dir + "/timings.csv");
        timings.row({"run_id", "wall_ms"});
        for (const RunRow& r : report.rows) {
            timings.cell(r.run_id);
            timings.cell(r.wall_ms);
            timings.end_row();
        }
    }
    {
        csv::Writer agg(out_dir + "/aggregate.csv");
        agg.row({"method", "alpha", "beta", "k", "mean_acc", "std_acc", "mean_ari", "std_ari",
                 "mean_nmi", "std_nmi", "folds"});
        for (const AggregateRow& a : report.aggregates) {
            agg.cell(config::to_string(a.method));
            agg.cell(a.alpha);
            agg.cell(a.beta);
            agg.cell(a.k);
            agg.cell(a.mean_acc);
            agg.cell(a.std_acc);
            agg.cell(a.mean_ari);
            agg.cell(a.std_ari);
            agg.cell(a.mean_nmi);
            agg.cell(a.std_nmi);
            agg.cell(a.folds);
            agg.end_row();
        }
    }

    const bool tag_weights = report.config.alpha_grid.size() > 1 ||
                             report.config.beta_grid.size() > 1;
    for (const RunRow& r : report.rows) {
        std::string name = out_dir + "/confusion_" + config::to_string(r.method);
        if (tag_weights) {
            name += "_a" + csv::format_double(r.alpha) + "_b" + csv::format_double(r.beta);
        }
        name += "_f" + std::to_string(r.fold) + "_k" + std::to_string(r.k) + ".csv";
        csv::Writer w(name);
        w.cell(std::string("cluster"));
        w.cell(std::string("mapped_class"));
        for (const auto& cls : report.class_names) w.cell(cls);
        w.end_row();
        for (Index i = 0; i < r.confusion.matrix.rows(); ++i) {
            const int cluster_id = r.confusion.row_cluster[static_cast<std::size_t>(i)];
            const int mapped = r.confusion.cluster_to_class[static_cast<std::size_t>(cluster_id)];
            w.cell("cluster_" + std::to_string(cluster_id));
            w.cell(mapped < 0 ? std::string("")
                              : report.class_names[static_cast<std::size_t>(mapped)]);
            for (Index j = 0; j < r.confusion.matrix.cols(); ++j) {
                w.cell(static_cast<long long>(r.confusion.matrix(i, j)));
            }
            w.end_row();
        }
    }

    std::ofstream manifest(out_dir + "/run_manifest.ini");
    if (!manifest) throw IoError("cannot write run manifest");
    manifest << "# actembed " << kVersion << "\n";
    manifest << "# master seed " << report.config.seed << "\n";
    manifest << "# tn " << report.tn << "\n";
    manifest << config::to_ini(report.config);
    if (!manifest) throw IoError("failed writing run manifest");
}

}  // namespace actembed::experiment
