#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "amrec/baseline_cf.hpp"
#include "amrec/error.hpp"
#include "amrec/graph.hpp"

using namespace amrec;

namespace {

RelationMatrix matrix_of(std::size_t m, std::size_t n, const std::vector<std::pair<int, int>>& cells) {
    std::vector<std::string> t, me;
    for (std::size_t i = 0; i < m; ++i) t.push_back("t" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) me.push_back("m" + std::to_string(j));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto [i, j] : cells) pairs.emplace_back(t[static_cast<std::size_t>(i)], me[static_cast<std::size_t>(j)]);
    return RelationMatrix::from_pairs(t, me, pairs);
}

// t0: m0 m1   t1: m0 m2   t2: m1 m2 m3   t3: m3
RelationMatrix four_by_four() { return matrix_of(4, 4, {{0, 0}, {0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 2}, {2, 3}, {3, 3}}); }

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("cosine similarity examples") {
    // m0 and m1 share both tasks, m2 shares none with m0, m3 shares one of two with m0.
    const auto R = matrix_of(3, 4, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}, {0, 3}});
    const auto sim = build_similarity(R);
    CHECK(sim(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sim(0, 2) == 0.0);
    CHECK(sim(3, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(sim(2, 2) == 1.0);
}

TEST_CASE("scores on a four-by-four matrix") {
    const auto R = four_by_four();
    const auto sim = build_similarity(R);
    // every method has two tasks, so each shared task contributes 1/2
    CHECK(sim(0, 1) == doctest::Approx(0.5));
    CHECK(sim(0, 3) == 0.0);
    CHECK(sim(2, 3) == doctest::Approx(0.5));

    const auto s0 = cf_score(sim, R, 0);
    CHECK(s0[0] == kNegInf);
    CHECK(s0[1] == kNegInf);
    CHECK(s0[2] == doctest::Approx(1.0));
    CHECK(s0[3] == doctest::Approx(0.5));

    const auto s3 = cf_score(sim, R, 3);
    CHECK(s3[0] == 0.0);
    CHECK(s3[1] == doctest::Approx(0.5));
    CHECK(s3[2] == doctest::Approx(0.5));
    CHECK(s3[3] == kNegInf);
}

TEST_CASE("single training method scores by that method's similarity row") {
    const auto R = four_by_four();
    const auto sim = build_similarity(R);
    const std::vector<std::size_t> one{2};
    const auto agg = cf_aggregate(sim, one);
    for (std::size_t j = 0; j < 4; ++j) CHECK(agg[j] == sim(j, 2));
}

TEST_CASE("similarity is symmetric and aggregation is additive") {
    std::mt19937_64 rng(17);
    std::bernoulli_distribution coin(0.25);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<int, int>> cells;
        for (int i = 0; i < 15; ++i) {
            for (int j = 0; j < 20; ++j) {
                if (coin(rng)) cells.emplace_back(i, j);
            }
        }
        if (cells.empty()) continue;
        const auto R = matrix_of(15, 20, cells);
        const auto sim = build_similarity(R);
        for (std::size_t a = 0; a < R.cols(); ++a) {
            for (std::size_t b = 0; b < R.cols(); ++b) {
                CHECK(sim(a, b) == sim(b, a));
                // brute-force cosine
                double shared = 0, da = 0, db = 0;
                for (std::size_t i = 0; i < R.rows(); ++i) {
                    shared += R.contains(i, a) && R.contains(i, b);
                    da += R.contains(i, a);
                    db += R.contains(i, b);
                }
                const double expected = a == b ? (da > 0 ? 1.0 : 0.0) : (shared > 0 ? shared / std::sqrt(da * db) : 0.0);
                CHECK(sim(a, b) == doctest::Approx(expected).epsilon(1e-14));
            }
        }
        const std::vector<std::size_t> A{0, 3, 7}, B{11, 19}, AB{0, 3, 7, 11, 19};
        const auto sa = cf_aggregate(sim, A), sb = cf_aggregate(sim, B), sab = cf_aggregate(sim, AB);
        for (std::size_t j = 0; j < R.cols(); ++j) CHECK(sab[j] == doctest::Approx(sa[j] + sb[j]).epsilon(1e-14));
    }
}

TEST_CASE("pruning drops small off-diagonal similarities") {
    const auto R = matrix_of(3, 4, {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 2}, {0, 3}});
    const auto sim = build_similarity(R, 0.9);
    CHECK(sim(0, 1) == doctest::Approx(1.0));
    CHECK(sim(0, 3) == 0.0);
    CHECK(sim(3, 3) == 1.0);
}

TEST_CASE("unknown task index is a cold start") {
    const auto R = four_by_four();
    const auto sim = build_similarity(R);
    CHECK_THROWS_AS(cf_score(sim, R, 4), ColdStartError);
}
