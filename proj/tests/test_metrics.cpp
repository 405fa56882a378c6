#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "actembed/errors.hpp"
#include "actembed/metrics.hpp"
#include "actembed/rng.hpp"

using namespace actembed;
using namespace actembed::metrics;

namespace {

ContingencyTable table_from(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    CountMatrix m(static_cast<Index>(rows.size()),
                  static_cast<Index>(rows.begin()->size()));
    Index i = 0;
    for (const auto& row : rows) {
        Index j = 0;
        for (const std::int64_t v : row) m(i, j++) = v;
        ++i;
    }
    return make_table(std::move(m));
}

// exhaustive best injective mapping of the smaller side into the larger
std::int64_t best_matching_bruteforce(const CountMatrix& counts) {
    const Index k = counts.rows();
    const Index c = counts.cols();
    const bool rows_small = k <= c;
    const Index small = rows_small ? k : c;
    const Index large = rows_small ? c : k;

    std::int64_t best = 0;
    std::vector<bool> used(static_cast<std::size_t>(large), false);
    std::int64_t current = 0;
    auto recurse = [&](auto&& self, Index s) -> void {
        if (s == small) {
            best = std::max(best, current);
            return;
        }
        // leaving s unmatched is never better, but keeps the search exhaustive
        self(self, s + 1);
        for (Index l = 0; l < large; ++l) {
            if (used[static_cast<std::size_t>(l)]) continue;
            used[static_cast<std::size_t>(l)] = true;
            current += rows_small ? counts(s, l) : counts(l, s);
            self(self, s + 1);
            current -= rows_small ? counts(s, l) : counts(l, s);
            used[static_cast<std::size_t>(l)] = false;
        }
    };
    recurse(recurse, 0);
    return best;
}

// pair-counting route: an algebraically independent ARI evaluation
double ari_paircount(const ContingencyTable& t) {
    auto comb2 = [](std::int64_t x) { return 0.5 * double(x) * double(x - 1); };
    double a = 0.0;
    for (Index i = 0; i < t.counts.rows(); ++i) {
        for (Index j = 0; j < t.counts.cols(); ++j) a += comb2(t.counts(i, j));
    }
    double same_u = 0.0;
    for (Index i = 0; i < t.cluster_sizes.size(); ++i) same_u += comb2(t.cluster_sizes(i));
    double same_v = 0.0;
    for (Index j = 0; j < t.class_sizes.size(); ++j) same_v += comb2(t.class_sizes(j));
    const double total = comb2(t.total);
    const double b = same_u - a;
    const double c = same_v - a;
    const double d = total - a - b - c;
    const double denom = (a + b) * (b + d) + (a + c) * (c + d);
    if (denom == 0.0) return 1.0;
    return 2.0 * (a * d - b * c) / denom;
}

// entropy/MI route for NMI
double nmi_entropy(const ContingencyTable& t) {
    const double n = static_cast<double>(t.total);
    double mi = 0.0;
    for (Index i = 0; i < t.counts.rows(); ++i) {
        for (Index j = 0; j < t.counts.cols(); ++j) {
            if (t.counts(i, j) == 0) continue;
            const double pij = double(t.counts(i, j)) / n;
            const double pi = double(t.cluster_sizes(i)) / n;
            const double pj = double(t.class_sizes(j)) / n;
            mi += pij * std::log(pij / (pi * pj));
        }
    }
    double hu = 0.0;
    for (Index i = 0; i < t.cluster_sizes.size(); ++i) {
        if (t.cluster_sizes(i) == 0) continue;
        const double p = double(t.cluster_sizes(i)) / n;
        hu -= p * std::log(p);
    }
    double hv = 0.0;
    for (Index j = 0; j < t.class_sizes.size(); ++j) {
        if (t.class_sizes(j) == 0) continue;
        const double p = double(t.class_sizes(j)) / n;
        hv -= p * std::log(p);
    }
    return mi / std::sqrt(hu * hv);
}

bool single_block_partition(const ContingencyTable& t) {
    int nzu = 0, nzv = 0;
    for (Index i = 0; i < t.cluster_sizes.size(); ++i) nzu += t.cluster_sizes(i) > 0;
    for (Index j = 0; j < t.class_sizes.size(); ++j) nzv += t.class_sizes(j) > 0;
    return nzu <= 1 || nzv <= 1;
}

CountMatrix random_counts(Rng& rng, Index k, Index c, std::int64_t max_cell) {
    CountMatrix m(k, c);
    for (Index i = 0; i < k; ++i) {
        for (Index j = 0; j < c; ++j) {
            m(i, j) = static_cast<std::int64_t>(rng.index(static_cast<std::size_t>(max_cell)));
        }
    }
    if (m.sum() == 0) m(0, 0) = 1;
    return m;
}

}  // namespace

TEST_CASE("contingency counts cluster-class co-occurrences") {
    const ContingencyTable diag = contingency({0, 0, 1}, {0, 0, 1});
    CHECK(diag.counts(0, 0) == 2);
    CHECK(diag.counts(0, 1) == 0);
    CHECK(diag.counts(1, 0) == 0);
    CHECK(diag.counts(1, 1) == 1);

    const ContingencyTable cell = contingency({0, 0}, {1, 1});
    CHECK(cell.counts.rows() == 1);
    CHECK(cell.counts.cols() == 2);
    CHECK(cell.counts(0, 1) == 2);

    const ContingencyTable cross = contingency({0, 1, 0, 1}, {0, 0, 1, 1});
    CHECK(cross.counts(0, 0) == 1);
    CHECK(cross.counts(0, 1) == 1);
    CHECK(cross.counts(1, 0) == 1);
    CHECK(cross.counts(1, 1) == 1);
}

TEST_CASE("contingency errors") {
    CHECK_THROWS_AS(contingency({0, 1}, {0}), LengthMismatch);
    CHECK_THROWS_AS(contingency({}, {}), EmptyInput);
}

TEST_CASE("accuracy of a perfect diagonal table") {
    CHECK(acc(table_from({{3, 0}, {0, 2}})) == 1.0);
}

TEST_CASE("accuracy is invariant to cluster relabeling") {
    const ContingencyTable t = contingency({0, 0, 1, 1}, {1, 1, 0, 0});
    CHECK(acc(t) == 1.0);
}

TEST_CASE("accuracy picks the best assignment") {
    CHECK(acc(table_from({{5, 1}, {2, 4}})) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("assignment accuracy equals exhaustive search on random tables") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const Index k = 1 + static_cast<Index>(rng.index(5));
        const Index c = 1 + static_cast<Index>(rng.index(5));
        const ContingencyTable t = make_table(random_counts(rng, k, c, 9));
        const double expected =
            static_cast<double>(best_matching_bruteforce(t.counts)) /
            static_cast<double>(t.total);
        CHECK(acc(t) == doctest::Approx(expected).epsilon(1e-15));
    }
}

TEST_CASE("ARI of identical partitions is exactly 1") {
    CHECK(ari(table_from({{3, 0}, {0, 4}})) == 1.0);
    CHECK(ari(table_from({{0, 3}, {4, 0}})) == 1.0);  // relabeled
    CHECK(ari(table_from({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})) == 1.0);  // all singletons
    CHECK(ari(table_from({{5}})) == 1.0);  // both single-block
}

TEST_CASE("ARI of the independent 2x2 table") {
    // paper formula by hand: [0 - (2*2)/6] / [(2+2)/2 - (2*2)/6] = -1/2
    CHECK(ari(table_from({{1, 1}, {1, 1}})) == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("ARI depends only on counts, not labels") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const Index k = 2 + static_cast<Index>(rng.index(4));
        const Index c = 2 + static_cast<Index>(rng.index(4));
        CountMatrix m = random_counts(rng, k, c, 7);
        const double base = ari(make_table(m));

        // permute rows
        std::vector<Index> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        CountMatrix permuted(k, c);
        for (Index i = 0; i < k; ++i) permuted.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
        CHECK(ari(make_table(permuted)) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("ARI agrees with the pair-counting identity") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const Index k = 1 + static_cast<Index>(rng.index(5));
        const Index c = 1 + static_cast<Index>(rng.index(5));
        const ContingencyTable t = make_table(random_counts(rng, k, c, 9));
        if (t.total < 2) continue;
        CHECK(ari(t) == doctest::Approx(ari_paircount(t)).epsilon(1e-9));
    }
}

TEST_CASE("ARI needs two samples") {
    CHECK_THROWS_AS(ari(table_from({{1}})), TooFewSamples);
}

TEST_CASE("NMI of identical balanced partitions is exactly 1") {
    CHECK(nmi(table_from({{2, 0}, {0, 2}})) == 1.0);
}

TEST_CASE("NMI of a statistically independent table is 0") {
    CHECK(nmi(table_from({{1, 1}, {1, 1}})) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("NMI of the mixed 2x2 table") {
    // geometric normalization of the paper formula, evaluated by hand
    const double expected = 0.34559202994421135;
    CHECK(nmi(table_from({{2, 0}, {1, 1}})) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(nmi(table_from({{2, 0}, {1, 1}})) == doctest::Approx(0.3456).epsilon(1e-3));
}

TEST_CASE("NMI single-block conventions") {
    CHECK(nmi(table_from({{4}})) == 1.0);        // both single-block
    CHECK(nmi(table_from({{2, 2}})) == 0.0);     // one cluster, two classes
    CHECK(nmi(table_from({{2}, {2}})) == 0.0);   // two clusters, one class
}

TEST_CASE("NMI agrees with the entropy route") {
    Rng rng(78);
    for (int trial = 0; trial < 200; ++trial) {
        const Index k = 2 + static_cast<Index>(rng.index(4));
        const Index c = 2 + static_cast<Index>(rng.index(4));
        const ContingencyTable t = make_table(random_counts(rng, k, c, 9));
        if (single_block_partition(t)) continue;
        CHECK(nmi(t) == doctest::Approx(nmi_entropy(t)).epsilon(1e-9));
    }
}

TEST_CASE("metrics are invariant under relabeling both sides") {
    Rng rng(91);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 6 + rng.index(20);
        std::vector<int> pred(n), truth(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = static_cast<int>(rng.index(3));
            truth[i] = static_cast<int>(rng.index(3));
        }
        const ContingencyTable base = contingency(pred, truth);

        const int pred_perm[3] = {2, 0, 1};
        const int truth_perm[3] = {1, 2, 0};
        std::vector<int> pred2(n), truth2(n);
        for (std::size_t i = 0; i < n; ++i) {
            pred2[i] = pred_perm[pred[i]];
            truth2[i] = truth_perm[truth[i]];
        }
        const ContingencyTable moved = contingency(pred2, truth2);
        CHECK(acc(moved) == doctest::Approx(acc(base)).epsilon(1e-12));
        CHECK(ari(moved) == doctest::Approx(ari(base)).epsilon(1e-12));
        CHECK(nmi(moved) == doctest::Approx(nmi(base)).epsilon(1e-12));
    }
}

TEST_CASE("confusion reordering puts matched classes on the diagonal") {
    const ConfusionResult perfect = confusion_after_assignment(table_from({{0, 2}, {3, 0}}));
    CHECK(perfect.matrix(0, 0) == 3);
    CHECK(perfect.matrix(1, 1) == 2);

    const ConfusionResult mixed = confusion_after_assignment(table_from({{5, 1}, {2, 4}}));
    CHECK(mixed.matrix(0, 0) == 5);
    CHECK(mixed.matrix(1, 1) == 4);

    const ConfusionResult extra =
        confusion_after_assignment(table_from({{4, 0}, {0, 3}, {1, 1}}));
    CHECK(extra.matrix.rows() == 3);
    CHECK(extra.matrix.cols() == 2);
    CHECK(extra.row_cluster.size() == 3);
    CHECK(extra.cluster_to_class[2] == -1);  // third cluster is unmatched
}

TEST_CASE("hungarian solver on a known cost matrix") {
    CountMatrix cost(3, 3);
    cost << 4, 1, 3,
            2, 0, 5,
            3, 2, 2;
    const std::vector<int> cols = solve_assignment(cost);
    // optimal total cost 5: (0,1), (1,0), (2,2)
    std::int64_t total = 0;
    for (int i = 0; i < 3; ++i) total += cost(i, cols[static_cast<std::size_t>(i)]);
    CHECK(total == 5);
}
