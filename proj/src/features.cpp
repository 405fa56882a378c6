#include "actembed/features.hpp"

#include <algorithm>
#include <cmath>

#include "actembed/csv.hpp"
#include "actembed/errors.hpp"
#include "actembed/ingest.hpp"

namespace actembed::features {

namespace {

Scalar interpolated_quantile(const std::vector<Scalar>& sorted, Scalar p) {
    const auto n = sorted.size();
    if (n == 1) return sorted[0];
    const Scalar h = p * static_cast<Scalar>(n - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted[n - 1];
    const Scalar frac = h - static_cast<Scalar>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

QuartileSet quartiles(const std::vector<Scalar>& series) {
    if (series.empty()) throw EmptySeries("quartiles of an empty series");
    std::vector<Scalar> sorted(series);
    std::sort(sorted.begin(), sorted.end());
    return {interpolated_quantile(sorted, 0.25),
            interpolated_quantile(sorted, 0.5),
            interpolated_quantile(sorted, 0.75)};
}

Vector window_features(const Eigen::Ref<const Matrix>& samples) {
    const Index n = samples.rows();
    const Index channels = samples.cols();
    if (n == 0 || channels == 0) throw EmptySegment("window has no samples");

    Vector out(kStatsPerChannel * channels);
    std::vector<Scalar> column(static_cast<std::size_t>(n));
    for (Index c = 0; c < channels; ++c) {
        const auto col = samples.col(c);
        const Scalar mean = col.mean();
        const Scalar var = (col.array() - mean).square().sum() / static_cast<Scalar>(n);
        for (Index i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = col(i);
        const QuartileSet q = quartiles(column);

        Scalar* block = out.data() + kStatsPerChannel * c;
        block[0] = mean;
        block[1] = var;
        block[2] = std::sqrt(var);
        block[3] = q.q2;
        block[4] = col.maxCoeff();
        block[5] = col.minCoeff();
        block[6] = q.q3 - q.q1;
    }
    return out;
}

FeatureVector extract_features(const Segment& segment) {
    if (segment.samples.rows() == 0) throw EmptySegment("segment has no samples");
    FeatureVector fv;
    fv.values = window_features(segment.samples);
    fv.session = segment.session_ref;
    fv.segment_index = segment.segment_index;
    fv.label = segment.label;
    return fv;
}

Standardizer fit_standardizer(const FeatureMatrix& matrix,
                              const std::vector<int>& row_subset) {
    if (row_subset.empty()) throw EmptySubset("standardizer fit needs at least one row");
    const Index dim = matrix.dim();
    Vector mean = Vector::Zero(dim);
    for (const int r : row_subset) {
        if (r < 0 || r >= matrix.rows()) throw DimMismatch("row index out of range");
        mean += matrix.values.row(r).transpose();
    }
    mean /= static_cast<Scalar>(row_subset.size());

    Vector var = Vector::Zero(dim);
    for (const int r : row_subset) {
        var += (matrix.values.row(r).transpose() - mean).array().square().matrix();
    }
    var /= static_cast<Scalar>(row_subset.size());

    Standardizer s;
    s.mean = std::move(mean);
    s.stddev.resize(dim);
    s.zero_variance.resize(static_cast<std::size_t>(dim));
    for (Index d = 0; d < dim; ++d) {
        const Scalar sd = std::sqrt(var(d));
        s.zero_variance[static_cast<std::size_t>(d)] = sd < Standardizer::kStdEpsilon;
        s.stddev(d) = std::max(sd, Standardizer::kStdEpsilon);
    }
    return s;
}

FeatureMatrix apply_standardizer(const Standardizer& std_, const FeatureMatrix& matrix) {
    if (std_.dim() != matrix.dim()) {
        throw DimMismatch("standardizer dim " + std::to_string(std_.dim()) +
                          " vs matrix dim " + std::to_string(matrix.dim()));
    }
    FeatureMatrix out;
    out.meta = matrix.meta;
    out.values = (matrix.values.rowwise() - std_.mean.transpose()).array().rowwise() /
                 std_.stddev.transpose().array();
    for (Index d = 0; d < matrix.dim(); ++d) {
        if (std_.zero_variance[static_cast<std::size_t>(d)]) out.values.col(d).setZero();
    }
    return out;
}

FeatureMatrix extract_dataset(const SessionSet& set, Scalar window_seconds,
                              Scalar step_seconds, int* skipped_sessions) {
    std::vector<std::vector<ingest::WindowSpan>> spans;
    spans.reserve(set.sessions.size());
    Index total = 0;
    int skipped = 0;
    for (const auto& session : set.sessions) {
        spans.push_back(ingest::enumerate_windows(session, window_seconds, step_seconds));
        if (spans.back().empty()) ++skipped;
        total += static_cast<Index>(spans.back().size());
    }
    if (skipped_sessions) *skipped_sessions = skipped;
    if (total == 0) throw EmptyInput("no session is long enough for one window");

    FeatureMatrix matrix;
    matrix.meta.reserve(static_cast<std::size_t>(total));
    Index row = 0;
    for (std::size_t s = 0; s < set.sessions.size(); ++s) {
        const Session& session = set.sessions[s];
        int segment_index = 0;
        for (const auto& span : spans[s]) {
            const Vector feats =
                window_features(session.values.middleRows(span.start, span.length));
            if (matrix.values.size() == 0) matrix.values.resize(total, feats.size());
            matrix.values.row(row++) = feats.transpose();
            matrix.meta.push_back(
                {session.subject_id, session.session_id, segment_index++, span.label});
        }
    }
    return matrix;
}

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path) {
    csv::Writer w(path);
    for (Index d = 0; d < matrix.dim(); ++d) w.cell("feat_" + std::to_string(d));
    w.cell(std::string("label"));
    w.cell(std::string("subject"));
    w.cell(std::string("session"));
    w.cell(std::string("segment_index"));
    w.end_row();
    for (Index r = 0; r < matrix.rows(); ++r) {
        for (Index d = 0; d < matrix.dim(); ++d) w.cell(matrix.values(r, d));
        const auto& m = matrix.meta[static_cast<std::size_t>(r)];
        w.cell(m.label);
        w.cell(m.subject_id);
        w.cell(m.session_id);
        w.cell(m.segment_index);
        w.end_row();
    }
}

}  // namespace actembed::features
