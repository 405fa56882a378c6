#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace actembed {

using Scalar = double;
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

inline constexpr int kMissingLabel = -1;

// Missing channel cells are stored as quiet NaN until repaired.
inline Scalar missing_value() { return std::numeric_limits<Scalar>::quiet_NaN(); }
inline bool is_missing(Scalar v) { return std::isnan(v); }

struct SessionRef {
    std::string subject_id;
    std::string session_id;

    bool operator==(const SessionRef&) const = default;
};

// One contiguous recording of one subject. Storage is columnar: row i of
// `values` is the i-th sample across all channels. Timestamps are
// non-decreasing; missing cells are NaN until repair_missing runs.
struct Session {
    std::string subject_id;
    std::string session_id;
    Scalar sample_rate = 0.0;  // Hz, > 0
    Vector timestamps;         // seconds
    Matrix values;             // [samples x channels]
    std::vector<int> labels;   // class id per sample, kMissingLabel if absent

    Index size() const { return timestamps.size(); }
    Index channel_count() const { return values.cols(); }
    SessionRef ref() const { return {subject_id, session_id}; }
};

// Fixed-length window cut from a session. Samples contain no missing cells.
struct Segment {
    int segment_index = 0;
    SessionRef session_ref;
    Scalar start_time = 0.0;
    Matrix samples;  // [window_length x channels]
    int label = kMissingLabel;
};

struct SessionSet {
    std::vector<Session> sessions;
    Index channel_count = 0;
    std::vector<std::string> class_names;  // dense class id -> name

    Index total_records() const {
        Index n = 0;
        for (const auto& s : sessions) n += s.size();
        return n;
    }
};

struct RowMeta {
    std::string subject_id;
    std::string session_id;
    int segment_index = 0;
    int label = kMissingLabel;
};

// Feature rows in dataset order: sessions in load order, segments by index.
struct FeatureMatrix {
    Matrix values;              // [rows x dim]
    std::vector<RowMeta> meta;  // one entry per row

    Index rows() const { return values.rows(); }
    Index dim() const { return values.cols(); }
};

FeatureMatrix select_rows(const FeatureMatrix& m, const std::vector<int>& rows);

// Dense id per row identifying its (subject, session) pair, in first-appearance order.
std::vector<int> session_keys(const FeatureMatrix& m);

}  // namespace actembed
