#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "actembed/errors.hpp"
#include "actembed/features.hpp"
#include "actembed/rng.hpp"

using namespace actembed;
using namespace actembed::features;

namespace {

Segment make_segment(const Matrix& samples) {
    Segment s;
    s.samples = samples;
    s.session_ref = {"subj", "sess"};
    s.segment_index = 0;
    s.label = 1;
    return s;
}

FeatureMatrix make_matrix(const Matrix& values) {
    FeatureMatrix m;
    m.values = values;
    for (Index r = 0; r < values.rows(); ++r) {
        m.meta.push_back({"subj", "sess", static_cast<int>(r), 0});
    }
    return m;
}

}  // namespace

TEST_CASE("quartiles of odd-length series") {
    const QuartileSet q = quartiles({1, 2, 3, 4, 5});
    CHECK(q.q1 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q.q2 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(q.q3 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("quartiles of a single element") {
    const QuartileSet q = quartiles({7});
    CHECK(q.q1 == 7.0);
    CHECK(q.q2 == 7.0);
    CHECK(q.q3 == 7.0);
}

TEST_CASE("quartiles interpolate on even-length series") {
    const QuartileSet q = quartiles({1, 2, 3, 4});
    CHECK(q.q1 == doctest::Approx(1.75).epsilon(1e-12));
    CHECK(q.q2 == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(q.q3 == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("quartiles reject an empty series") {
    CHECK_THROWS_AS(quartiles({}), EmptySeries);
}

TEST_CASE("feature block of a simple channel") {
    Matrix samples(3, 1);
    samples << 1, 2, 3;
    const FeatureVector fv = extract_features(make_segment(samples));
    REQUIRE(fv.values.size() == 7);
    CHECK(fv.values(0) == doctest::Approx(2.0));           // mean
    CHECK(fv.values(1) == doctest::Approx(2.0 / 3.0));     // population variance
    CHECK(fv.values(2) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(fv.values(3) == doctest::Approx(2.0));           // median
    CHECK(fv.values(4) == doctest::Approx(3.0));           // max
    CHECK(fv.values(5) == doctest::Approx(1.0));           // min
    CHECK(fv.values(6) == doctest::Approx(1.0));           // iqr
}

TEST_CASE("constant channel collapses the spread statistics") {
    Matrix samples(4, 1);
    samples << 5, 5, 5, 5;
    const FeatureVector fv = extract_features(make_segment(samples));
    CHECK(fv.values(1) == 0.0);
    CHECK(fv.values(2) == 0.0);
    CHECK(fv.values(6) == 0.0);
    CHECK(fv.values(3) == 5.0);
    CHECK(fv.values(4) == 5.0);
    CHECK(fv.values(5) == 5.0);
}

TEST_CASE("two channels produce channel-major blocks") {
    Matrix samples(3, 2);
    samples << 1, 10, 2, 20, 3, 30;
    const FeatureVector fv = extract_features(make_segment(samples));
    REQUIRE(fv.values.size() == 14);
    CHECK(fv.values(0) == doctest::Approx(2.0));   // channel 0 mean first
    CHECK(fv.values(7) == doctest::Approx(20.0));  // channel 1 mean second
}

TEST_CASE("empty segment is rejected") {
    Segment s;
    s.samples.resize(0, 2);
    CHECK_THROWS_AS(extract_features(s), EmptySegment);
}

TEST_CASE("feature block is invariant to sample order") {
    Rng rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.index(30));
        Matrix samples(n, 2);
        for (Index i = 0; i < n; ++i) {
            samples(i, 0) = rng.uniform(-10, 10);
            samples(i, 1) = rng.uniform(-1, 1);
        }
        const Vector base = window_features(samples);

        Matrix shuffled = samples;
        for (Index c = 0; c < 2; ++c) {
            std::vector<Scalar> col(static_cast<std::size_t>(n));
            for (Index i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = shuffled(i, c);
            rng.shuffle(col);
            for (Index i = 0; i < n; ++i) shuffled(i, c) = col[static_cast<std::size_t>(i)];
        }
        const Vector perm = window_features(shuffled);
        for (Index d = 0; d < base.size(); ++d) {
            CHECK(base(d) == doctest::Approx(perm(d)).epsilon(1e-12));
        }
    }
}

TEST_CASE("per-segment statistic invariants hold on random windows") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const Index n = 1 + static_cast<Index>(rng.index(40));
        Matrix samples(n, 1);
        for (Index i = 0; i < n; ++i) samples(i, 0) = rng.uniform(-100, 100);
        const Vector f = window_features(samples);
        const Scalar var = f(1), stddev = f(2), median = f(3), mx = f(4), mn = f(5), iqr = f(6);
        CHECK(stddev * stddev == doctest::Approx(var).epsilon(1e-9));
        CHECK(mn <= median);
        CHECK(median <= mx);
        CHECK(iqr >= 0.0);
    }
}

TEST_CASE("standardizer on rows 0 and 2 of a 1-dim matrix") {
    Matrix values(3, 1);
    values << 0, 100, 2;
    const FeatureMatrix m = make_matrix(values);
    const Standardizer s = fit_standardizer(m, {0, 2});
    CHECK(s.mean(0) == doctest::Approx(1.0));
    CHECK(s.stddev(0) == doctest::Approx(1.0));  // population std

    // excluded row does not influence the statistics
    Matrix values2 = values;
    values2(1, 0) = -999.0;
    const Standardizer s2 = fit_standardizer(make_matrix(values2), {0, 2});
    CHECK(s2.mean(0) == s.mean(0));
    CHECK(s2.stddev(0) == s.stddev(0));
}

TEST_CASE("single-row fit clamps and standardizes to zero") {
    Matrix values(1, 3);
    values << 4, -2, 0.5;
    const FeatureMatrix m = make_matrix(values);
    const Standardizer s = fit_standardizer(m, {0});
    for (Index d = 0; d < 3; ++d) {
        CHECK(s.stddev(d) >= Standardizer::kStdEpsilon);
        CHECK(s.zero_variance[static_cast<std::size_t>(d)]);
    }
    const FeatureMatrix out = apply_standardizer(s, m);
    CHECK(out.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardizing the fitting rows centers them") {
    Rng rng(3);
    Matrix values(20, 4);
    for (Index r = 0; r < 20; ++r) {
        for (Index c = 0; c < 4; ++c) values(r, c) = rng.uniform(-5, 5) * (c + 1);
    }
    const FeatureMatrix m = make_matrix(values);
    std::vector<int> all(20);
    for (int i = 0; i < 20; ++i) all[static_cast<std::size_t>(i)] = i;
    const Standardizer s = fit_standardizer(m, all);
    const FeatureMatrix out = apply_standardizer(s, m);
    for (Index c = 0; c < 4; ++c) {
        CHECK(std::abs(out.values.col(c).mean()) < 1e-9);
    }
}

TEST_CASE("identity standardizer leaves the matrix unchanged") {
    Matrix values(2, 2);
    values << 1, 2, 3, 4;
    Standardizer s;
    s.mean = Vector::Zero(2);
    s.stddev = Vector::Ones(2);
    s.zero_variance = {false, false};
    const FeatureMatrix out = apply_standardizer(s, make_matrix(values));
    CHECK(out.values == values);
}

TEST_CASE("standardize then unstandardize round-trips") {
    Rng rng(9);
    Matrix values(15, 3);
    for (Index r = 0; r < 15; ++r) {
        for (Index c = 0; c < 3; ++c) values(r, c) = rng.uniform(-3, 3) + 10.0 * (c + 1);
    }
    const FeatureMatrix m = make_matrix(values);
    std::vector<int> all(15);
    for (int i = 0; i < 15; ++i) all[static_cast<std::size_t>(i)] = i;
    const Standardizer s = fit_standardizer(m, all);
    const FeatureMatrix z = apply_standardizer(s, m);
    const Matrix back =
        (z.values.array().rowwise() * s.stddev.transpose().array()).rowwise() +
        s.mean.transpose().array();
    for (Index r = 0; r < 15; ++r) {
        for (Index c = 0; c < 3; ++c) {
            CHECK(back(r, c) == doctest::Approx(values(r, c)).epsilon(1e-9));
        }
    }
}

TEST_CASE("standardizer errors") {
    Matrix values(2, 2);
    values << 1, 2, 3, 4;
    const FeatureMatrix m = make_matrix(values);
    CHECK_THROWS_AS(fit_standardizer(m, {}), EmptySubset);

    Standardizer s = fit_standardizer(m, {0, 1});
    Matrix narrow(2, 1);
    narrow << 1, 2;
    CHECK_THROWS_AS(apply_standardizer(s, make_matrix(narrow)), DimMismatch);
}
