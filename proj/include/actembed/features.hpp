#pragma once

#include <string>
#include <vector>

#include "actembed/types.hpp"

namespace actembed::features {

// Per-channel statistic block, in this order.
inline constexpr int kStatsPerChannel = 7;  // mean, var, std, median, max, min, iqr

struct QuartileSet {
    Scalar q1 = 0.0;
    Scalar q2 = 0.0;  // median
    Scalar q3 = 0.0;
};

// Linear-interpolation quantiles on (N-1) spacing over a sorted copy:
// h = p*(N-1), value = v[floor(h)] + frac(h)*(v[floor(h)+1] - v[floor(h)]).
QuartileSet quartiles(const std::vector<Scalar>& series);

// Statistics of one window: for each channel, in column order,
// [mean, var, std, median, max, min, iqr]. Variance is the population form.
Vector window_features(const Eigen::Ref<const Matrix>& samples);

struct FeatureVector {
    Vector values;
    SessionRef session;
    int segment_index = 0;
    int label = kMissingLabel;
};

FeatureVector extract_features(const Segment& segment);

// Per-dimension z-scoring statistics estimated on a training subset only.
// stddev is clamped below at kStdEpsilon; dimensions whose raw deviation is
// under the clamp standardize to exactly 0.
struct Standardizer {
    Vector mean;
    Vector stddev;
    std::vector<bool> zero_variance;

    static constexpr Scalar kStdEpsilon = 1e-12;

    Index dim() const { return mean.size(); }
};

Standardizer fit_standardizer(const FeatureMatrix& matrix,
                              const std::vector<int>& row_subset);

FeatureMatrix apply_standardizer(const Standardizer& std, const FeatureMatrix& matrix);

// feat_0..feat_{D-1},label,subject,session,segment_index
void write_feature_csv(const FeatureMatrix& matrix, const std::string& path);

// Windows every session and extracts features without materializing
// segments (matches segment_sliding_window + extract_features row for row).
// Sessions shorter than one window contribute nothing and are counted in
// *skipped_sessions when given.
FeatureMatrix extract_dataset(const SessionSet& set, Scalar window_seconds,
                              Scalar step_seconds, int* skipped_sessions = nullptr);

}  // namespace actembed::features
