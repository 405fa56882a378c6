#include "actembed/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "actembed/csv.hpp"
#include "actembed/errors.hpp"
#include "actembed/rng.hpp"

namespace actembed::ingest {

namespace {

namespace fs = std::filesystem;

bool is_nan_token(const std::string& s) {
    if (s.size() != 3) return false;
    return (s[0] == 'n' || s[0] == 'N') && (s[1] == 'a' || s[1] == 'A') &&
           (s[2] == 'n' || s[2] == 'N');
}

// numeric cell: finite value, NaN token, or MalformedRow
Scalar parse_cell(const std::string& raw, std::size_t line_no, const std::string& what) {
    const std::string t = csv::trim(raw);
    if (is_nan_token(t)) return missing_value();
    if (t.empty()) throw MalformedRow("row " + std::to_string(line_no) + ": empty " + what);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw MalformedRow("row " + std::to_string(line_no) + ": non-numeric " + what +
                           " \"" + t + "\"");
    }
    return v;
}

struct SessionBuilder {
    std::string subject_id;
    std::string session_id;
    std::vector<Scalar> timestamps;
    std::vector<Scalar> values;  // row-major [records x channels]
    std::vector<int> labels;
};

Session finish_session(SessionBuilder&& b, Index channels, Scalar sample_rate) {
    Session s;
    s.subject_id = std::move(b.subject_id);
    s.session_id = std::move(b.session_id);
    s.sample_rate = sample_rate;
    const Index n = static_cast<Index>(b.timestamps.size());
    s.timestamps = Eigen::Map<const Vector>(b.timestamps.data(), n);
    s.values = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>(b.values.data(), n, channels);
    s.labels = std::move(b.labels);

    // records ordered by timestamp; stable so equal stamps keep file order
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index c) { return s.timestamps(a) < s.timestamps(c); });
    if (!std::is_sorted(order.begin(), order.end())) {
        Session sorted = s;
        for (Index i = 0; i < n; ++i) {
            const Index src = order[static_cast<std::size_t>(i)];
            sorted.timestamps(i) = s.timestamps(src);
            sorted.values.row(i) = s.values.row(src);
            sorted.labels[static_cast<std::size_t>(i)] =
                s.labels[static_cast<std::size_t>(src)];
        }
        return sorted;
    }
    return s;
}

int dense_label(std::vector<std::string>& class_names,
                std::map<std::string, int>& ids, const std::string& name) {
    auto [it, inserted] = ids.emplace(name, static_cast<int>(class_names.size()));
    if (inserted) class_names.push_back(name);
    return it->second;
}

}  // namespace

SessionSet load_canonical_csv(const std::string& path, const CsvSchema& schema,
                              Scalar sample_rate) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    if (sample_rate <= 0) throw InvalidConfig("sample_rate must be positive");

    std::string header;
    if (!std::getline(in, header)) throw EmptyFile(path + " is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const std::vector<std::string> columns = csv::split(header);
    auto find_column = [&](const std::string& name) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (csv::trim(columns[i]) == name) return static_cast<int>(i);
        }
        throw MissingColumn(path + ": missing column \"" + name + "\"");
    };

    const int ts_col = find_column(schema.timestamp);
    const int subj_col = find_column(schema.subject);
    const int sess_col = find_column(schema.session);
    const int label_col = find_column(schema.label);

    std::vector<int> channel_cols;
    if (schema.channels.empty()) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            const int c = static_cast<int>(i);
            if (c != ts_col && c != subj_col && c != sess_col && c != label_col) {
                channel_cols.push_back(c);
            }
        }
    } else {
        for (const auto& name : schema.channels) channel_cols.push_back(find_column(name));
    }
    if (channel_cols.empty()) throw MissingColumn(path + ": no channel columns");
    const Index channels = static_cast<Index>(channel_cols.size());

    SessionSet set;
    set.channel_count = channels;
    std::map<std::string, int> label_ids;
    std::map<std::pair<std::string, std::string>, std::size_t> session_slot;
    std::vector<SessionBuilder> builders;

    std::string line;
    std::size_t line_no = 1;
    std::size_t data_rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (csv::trim(line).empty()) continue;
        const std::vector<std::string> cells = csv::split(line);
        if (cells.size() != columns.size()) {
            throw MalformedRow("row " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns.size()) + " cells, got " +
                               std::to_string(cells.size()));
        }
        ++data_rows;

        const Scalar ts = parse_cell(cells[static_cast<std::size_t>(ts_col)], line_no,
                                     "timestamp");
        if (is_missing(ts)) {
            throw MalformedRow("row " + std::to_string(line_no) + ": missing timestamp");
        }
        const std::string subject = csv::trim(cells[static_cast<std::size_t>(subj_col)]);
        const std::string session = csv::trim(cells[static_cast<std::size_t>(sess_col)]);
        const std::string label_raw = csv::trim(cells[static_cast<std::size_t>(label_col)]);
        const int label = (label_raw.empty() || is_nan_token(label_raw))
                              ? kMissingLabel
                              : dense_label(set.class_names, label_ids, label_raw);

        const auto key = std::make_pair(subject, session);
        auto [slot_it, inserted] = session_slot.emplace(key, builders.size());
        if (inserted) {
            builders.push_back({subject, session, {}, {}, {}});
        }
        SessionBuilder& b = builders[slot_it->second];
        b.timestamps.push_back(ts);
        b.labels.push_back(label);
        for (const int c : channel_cols) {
            b.values.push_back(parse_cell(cells[static_cast<std::size_t>(c)], line_no,
                                          "channel value"));
        }
    }
    if (data_rows == 0) throw EmptyFile(path + " has no data rows");

    set.sessions.reserve(builders.size());
    for (auto& b : builders) {
        set.sessions.push_back(finish_session(std::move(b), channels, sample_rate));
    }
    return set;
}

SessionSet load_pamap2(const std::string& directory, Scalar sample_rate,
                       const std::vector<int>& channel_selection) {
    if (sample_rate <= 0) throw InvalidConfig("sample_rate must be positive");
    std::vector<fs::path> files;
    if (!fs::is_directory(directory)) throw EmptyDirectory(directory + " is not a directory");
    for (const auto& entry : fs::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".dat") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) throw EmptyDirectory(directory + " contains no .dat files");
    std::sort(files.begin(), files.end());

    SessionSet set;
    set.channel_count = -1;
    std::map<std::string, int> label_ids;

    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw IoError("cannot open " + file.string());
        const std::string subject = file.stem().string();

        int span = 0;
        SessionBuilder builder;
        Index channels = -1;
        auto flush_span = [&]() {
            if (builder.timestamps.empty()) return;
            builder.subject_id = subject;
            builder.session_id = subject + "_s" + std::to_string(span++);
            set.sessions.push_back(
                finish_session(std::move(builder), set.channel_count, sample_rate));
            builder = SessionBuilder{};
        };

        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (csv::trim(line).empty()) {
                flush_span();
                continue;
            }
            std::istringstream row(line);
            std::vector<std::string> tokens;
            std::string tok;
            while (row >> tok) tokens.push_back(tok);
            if (tokens.size() < 3) {
                throw MalformedRow(file.string() + " row " + std::to_string(line_no) +
                                   ": fewer than 3 columns");
            }
            const Index row_channels = static_cast<Index>(tokens.size()) - 2;
            if (channels < 0) {
                channels = row_channels;
                const Index selected = channel_selection.empty()
                                           ? channels
                                           : static_cast<Index>(channel_selection.size());
                if (set.channel_count < 0) {
                    set.channel_count = selected;
                } else if (set.channel_count != selected) {
                    throw MalformedRow(file.string() + ": channel count " +
                                       std::to_string(selected) + " differs from " +
                                       std::to_string(set.channel_count));
                }
            } else if (channels != row_channels) {
                throw MalformedRow(file.string() + " row " + std::to_string(line_no) +
                                   ": inconsistent column count");
            }

            const Scalar ts = parse_cell(tokens[0], line_no, "timestamp");
            const Scalar activity_raw = parse_cell(tokens[1], line_no, "activity id");
            if (is_missing(ts) || is_missing(activity_raw)) {
                throw MalformedRow(file.string() + " row " + std::to_string(line_no) +
                                   ": missing timestamp or activity id");
            }
            const int activity = static_cast<int>(std::lround(activity_raw));
            if (activity == 0) {  // transient, breaks the span
                flush_span();
                continue;
            }

            builder.timestamps.push_back(ts);
            builder.labels.push_back(
                dense_label(set.class_names, label_ids, std::to_string(activity)));
            if (channel_selection.empty()) {
                for (Index c = 0; c < channels; ++c) {
                    builder.values.push_back(
                        parse_cell(tokens[static_cast<std::size_t>(c) + 2], line_no,
                                   "channel value"));
                }
            } else {
                for (const int c : channel_selection) {
                    if (c < 0 || c >= channels) {
                        throw InvalidConfig("channel index " + std::to_string(c) +
                                            " out of range (file has " +
                                            std::to_string(channels) + " channels)");
                    }
                    builder.values.push_back(
                        parse_cell(tokens[static_cast<std::size_t>(c) + 2], line_no,
                                   "channel value"));
                }
            }
        }
        flush_span();
    }
    if (set.channel_count < 0) set.channel_count = 0;
    return set;
}

void select_channels(SessionSet& set, const std::vector<int>& channels) {
    if (channels.empty()) return;
    for (const int c : channels) {
        if (c < 0 || c >= set.channel_count) {
            throw InvalidConfig("channel index " + std::to_string(c) + " out of range");
        }
    }
    for (auto& session : set.sessions) {
        Matrix picked(session.size(), static_cast<Index>(channels.size()));
        for (std::size_t i = 0; i < channels.size(); ++i) {
            picked.col(static_cast<Index>(i)) = session.values.col(channels[i]);
        }
        session.values = std::move(picked);
    }
    set.channel_count = static_cast<Index>(channels.size());
}

Session repair_missing(const Session& session) {
    if (session.size() == 0) throw EmptyInput("cannot repair an empty session");
    Session out = session;
    const Index n = out.size();
    for (Index c = 0; c < out.channel_count(); ++c) {
        auto col = out.values.col(c);
        Index prev_known = -1;
        for (Index i = 0; i < n; ++i) {
            if (is_missing(col(i))) continue;
            if (prev_known < 0) {
                // leading gap: extend the first known value backwards
                for (Index j = 0; j < i; ++j) col(j) = col(i);
            } else if (prev_known + 1 < i) {
                const Scalar lo = col(prev_known);
                const Scalar hi = col(i);
                const Scalar span = static_cast<Scalar>(i - prev_known);
                for (Index j = prev_known + 1; j < i; ++j) {
                    col(j) = lo + (hi - lo) * static_cast<Scalar>(j - prev_known) / span;
                }
            }
            prev_known = i;
        }
        if (prev_known < 0) {
            throw AllMissingChannel("channel " + std::to_string(c) +
                                    " of session " + out.session_id + " is entirely missing");
        }
        for (Index j = prev_known + 1; j < n; ++j) col(j) = col(prev_known);
    }
    return out;
}

SessionSet repair_missing(const SessionSet& set) {
    SessionSet out = set;
    for (auto& s : out.sessions) s = repair_missing(s);
    return out;
}

std::vector<WindowSpan> enumerate_windows(const Session& session,
                                          Scalar window_seconds, Scalar step_seconds) {
    if (window_seconds <= 0 || step_seconds <= 0) {
        throw InvalidConfig("window and step must be positive");
    }
    const Index window = static_cast<Index>(std::llround(window_seconds * session.sample_rate));
    const Index step = static_cast<Index>(std::llround(step_seconds * session.sample_rate));
    if (window <= 0 || step <= 0) {
        throw InvalidConfig("window/step shorter than one sample at rate " +
                            std::to_string(session.sample_rate));
    }
    if (session.values.hasNaN()) {
        throw DataError("session " + session.session_id +
                        " contains missing samples; repair_missing must run first");
    }

    std::vector<WindowSpan> spans;
    const Index n = session.size();
    std::vector<Index> votes;
    for (Index start = 0; start + window <= n; start += step) {
        WindowSpan span;
        span.start = start;
        span.length = window;
        span.start_time = session.timestamps(start);

        votes.assign(votes.size(), 0);
        int best = kMissingLabel;
        Index best_count = 0;
        for (Index i = start; i < start + window; ++i) {
            const int label = session.labels[static_cast<std::size_t>(i)];
            if (label < 0) continue;
            if (static_cast<std::size_t>(label) >= votes.size()) {
                votes.resize(static_cast<std::size_t>(label) + 1, 0);
            }
            const Index count = ++votes[static_cast<std::size_t>(label)];
            // strict majority update keeps the smaller class id on ties
            if (count > best_count || (count == best_count && label < best)) {
                best = label;
                best_count = count;
            }
        }
        span.label = best;
        spans.push_back(span);
    }
    return spans;
}

std::vector<Segment> segment_sliding_window(const Session& session,
                                            Scalar window_seconds, Scalar step_seconds) {
    const std::vector<WindowSpan> spans =
        enumerate_windows(session, window_seconds, step_seconds);
    std::vector<Segment> segments;
    segments.reserve(spans.size());
    int index = 0;
    for (const WindowSpan& span : spans) {
        Segment seg;
        seg.segment_index = index++;
        seg.session_ref = session.ref();
        seg.start_time = span.start_time;
        seg.samples = session.values.middleRows(span.start, span.length);
        seg.label = span.label;
        segments.push_back(std::move(seg));
    }
    return segments;
}

namespace {

void validate_synth(const SynthConfig& c) {
    if (c.channel_count < 1) throw InvalidConfig("synth: channel_count must be >= 1");
    if (c.sample_rate <= 0) throw InvalidConfig("synth: sample_rate must be positive");
    if (c.session_seconds <= 0) throw InvalidConfig("synth: session_seconds must be positive");
    if (c.sessions_per_subject < 1) {
        throw InvalidConfig("synth: sessions_per_subject must be >= 1");
    }
    if (c.min_bout_seconds <= 0 || c.max_bout_seconds < c.min_bout_seconds) {
        throw InvalidConfig("synth: need 0 < min_bout_seconds <= max_bout_seconds");
    }
    if (c.noise_std < 0) throw InvalidConfig("synth: noise_std must be >= 0");
    if (c.subject_offsets.empty()) throw InvalidConfig("synth: at least one subject offset");
    if (c.classes.empty()) throw InvalidConfig("synth: at least one class");
    for (std::size_t k = 0; k < c.classes.size(); ++k) {
        const auto& cls = c.classes[k];
        if (cls.amplitudes.size() != static_cast<std::size_t>(c.channel_count) ||
            cls.frequencies.size() != static_cast<std::size_t>(c.channel_count)) {
            throw InvalidConfig("synth: class " + std::to_string(k) +
                                " needs one amplitude and one frequency per channel");
        }
        for (const Scalar f : cls.frequencies) {
            if (f < 0) throw InvalidConfig("synth: frequencies must be >= 0");
        }
    }
}

}  // namespace

SessionSet generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
    validate_synth(config);

    SessionSet set;
    set.channel_count = config.channel_count;
    for (std::size_t k = 0; k < config.classes.size(); ++k) {
        set.class_names.push_back("class_" + std::to_string(k));
    }

    const Index target = static_cast<Index>(
        std::llround(config.session_seconds * config.sample_rate));
    for (std::size_t s = 0; s < config.subject_offsets.size(); ++s) {
        for (int q = 0; q < config.sessions_per_subject; ++q) {
            Rng rng(derive_seed(seed, {0x53594e54ULL, s, static_cast<std::uint64_t>(q)}));

            // bout plan first, then the noise stream, so the bout layout does
            // not depend on noise_std
            struct Bout { int cls; Index samples; };
            std::vector<Bout> bouts;
            Index total = 0;
            while (total < target) {
                const int cls = static_cast<int>(rng.index(config.classes.size()));
                const Scalar len =
                    rng.uniform(config.min_bout_seconds, config.max_bout_seconds);
                const Index samples =
                    std::max<Index>(1, static_cast<Index>(std::llround(len * config.sample_rate)));
                bouts.push_back({cls, samples});
                total += samples;
            }

            Session session;
            session.subject_id = "subj_" + std::to_string(s);
            session.session_id = session.subject_id + "_sess_" + std::to_string(q);
            session.sample_rate = config.sample_rate;
            session.timestamps.resize(total);
            session.values.resize(total, config.channel_count);
            session.labels.resize(static_cast<std::size_t>(total));

            const Scalar offset = config.subject_offsets[s];
            Index row = 0;
            Scalar bout_start = 0.0;
            for (const Bout& bout : bouts) {
                const SynthClass& cls = config.classes[static_cast<std::size_t>(bout.cls)];
                for (Index i = 0; i < bout.samples; ++i, ++row) {
                    const Scalar t = static_cast<Scalar>(row) / config.sample_rate;
                    session.timestamps(row) = t;
                    session.labels[static_cast<std::size_t>(row)] = bout.cls;
                    for (Index c = 0; c < config.channel_count; ++c) {
                        const Scalar amp = cls.amplitudes[static_cast<std::size_t>(c)];
                        const Scalar freq = cls.frequencies[static_cast<std::size_t>(c)];
                        const Scalar phase =
                            2.0 * std::numbers::pi * freq * (t - bout_start);
                        session.values(row, c) = amp * std::cos(phase) + offset +
                                                 config.noise_std * rng.gaussian();
                    }
                }
                bout_start += static_cast<Scalar>(bout.samples) / config.sample_rate;
            }
            set.sessions.push_back(std::move(session));
        }
    }
    return set;
}

void write_canonical_csv(const SessionSet& set, const std::string& path) {
    csv::Writer w(path);
    w.cell(std::string("timestamp"));
    w.cell(std::string("subject"));
    w.cell(std::string("session"));
    w.cell(std::string("label"));
    for (Index c = 0; c < set.channel_count; ++c) w.cell("ch" + std::to_string(c));
    w.end_row();
    for (const auto& session : set.sessions) {
        for (Index i = 0; i < session.size(); ++i) {
            w.cell(session.timestamps(i));
            w.cell(session.subject_id);
            w.cell(session.session_id);
            const int label = session.labels[static_cast<std::size_t>(i)];
            w.cell(label == kMissingLabel ? std::string("nan")
                                          : set.class_names[static_cast<std::size_t>(label)]);
            for (Index c = 0; c < set.channel_count; ++c) {
                const Scalar v = session.values(i, c);
                if (is_missing(v)) {
                    w.cell(std::string("nan"));
                } else {
                    w.cell(v);
                }
            }
            w.end_row();
        }
    }
}

}  // namespace actembed::ingest
