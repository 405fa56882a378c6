#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actembed/types.hpp"

namespace actembed::ingest {

struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string subject = "subject";
    std::string session = "session";
    std::string label = "label";
    // Channel column names; empty selects every remaining column in header order.
    std::vector<std::string> channels;
};

// Canonical CSV: header required, comma separated, case-insensitive "nan"
// marks a missing cell. One Session per distinct (subject, session) pair in
// first-appearance order; records sorted by timestamp; label strings mapped
// to dense ids in first-appearance order.
SessionSet load_canonical_csv(const std::string& path, const CsvSchema& schema = {},
                              Scalar sample_rate = 100.0);

// PAMAP2 layout: whitespace-separated .dat files, one per subject
// (column 1 timestamp, column 2 activity id, the rest sensor channels).
// Transient rows (activity 0) are dropped; each contiguous run of retained
// rows becomes one session. The effective rate comes from configuration.
SessionSet load_pamap2(const std::string& directory, Scalar sample_rate = 100.0,
                       const std::vector<int>& channel_selection = {});

// Keeps only the listed channel indices, in the given order. Empty keeps all.
void select_channels(SessionSet& set, const std::vector<int>& channels);

// Missing cells filled by linear interpolation between the nearest known
// values of the same channel; leading/trailing gaps take the nearest value.
Session repair_missing(const Session& session);
SessionSet repair_missing(const SessionSet& set);

struct WindowSpan {
    Index start = 0;        // sample offset in the session
    Index length = 0;       // samples
    int label = kMissingLabel;
    Scalar start_time = 0.0;
};

// Window starts at sample offsets 0, step, 2*step, ...; a trailing partial
// window is discarded. Window label is the majority class among covered
// samples (missing labels do not vote; ties go to the smaller class id).
std::vector<WindowSpan> enumerate_windows(const Session& session,
                                          Scalar window_seconds, Scalar step_seconds);

std::vector<Segment> segment_sliding_window(const Session& session,
                                            Scalar window_seconds, Scalar step_seconds);

struct SynthClass {
    std::vector<Scalar> amplitudes;   // one per channel
    std::vector<Scalar> frequencies;  // Hz, one per channel; 0 = constant level
};

struct SynthConfig {
    int channel_count = 3;
    Scalar sample_rate = 32.0;
    Scalar session_seconds = 120.0;
    int sessions_per_subject = 1;
    Scalar min_bout_seconds = 10.0;
    Scalar max_bout_seconds = 20.0;
    Scalar noise_std = 0.1;
    std::vector<Scalar> subject_offsets;  // one per subject, added to every channel
    std::vector<SynthClass> classes;
};

// Activity-bout generator: each session is a sequence of bouts, each at least
// min_bout_seconds long, with per-sample labels. Channel c during a bout of
// class k reads amp[k][c]*cos(2*pi*freq[k][c]*(t - bout_start)) + subject
// offset + Gaussian noise. Output depends only on (config, seed).
SessionSet generate_synthetic(const SynthConfig& config, std::uint64_t seed);

void write_canonical_csv(const SessionSet& set, const std::string& path);

}  // namespace actembed::ingest
