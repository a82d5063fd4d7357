#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"

#include "amrec/error.hpp"
#include "amrec/factor.hpp"
#include "amrec/recommend.hpp"

using namespace amrec;

namespace {

RelationMatrix tiny_matrix() {
    const std::vector<std::pair<std::string, std::string>> pairs{{"t0", "m0"}, {"t1", "m1"}};
    return RelationMatrix::from_pairs({"t0", "t1"}, {"m0", "m1"}, pairs);
}

}  // namespace

TEST_CASE("scores are dot products") {
    FactorModel model;
    model.hp.k = 2;
    model.tasks.resize(1, 2);
    model.tasks << 1.0, 2.0;
    model.methods.resize(2, 2);
    model.methods << 0.0, 1.0, 2.0, 2.0;
    const auto s = score_task(model, 0);
    REQUIRE(s.size() == 2);
    CHECK(s[0] == 2.0);
    CHECK(s[1] == 6.0);
}

TEST_CASE("scores match an explicit loop") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    FactorModel model;
    model.hp.k = 5;
    model.tasks.resize(4, 5);
    model.methods.resize(9, 5);
    for (Eigen::Index i = 0; i < model.tasks.size(); ++i) model.tasks.data()[i] = g(rng);
    for (Eigen::Index i = 0; i < model.methods.size(); ++i) model.methods.data()[i] = g(rng);
    for (std::size_t t = 0; t < 4; ++t) {
        const auto s = score_task(model, t);
        for (Eigen::Index j = 0; j < 9; ++j) {
            double dot = 0.0;
            for (Eigen::Index c = 0; c < 5; ++c) dot += model.tasks(static_cast<Eigen::Index>(t), c) * model.methods(j, c);
            CHECK(s[static_cast<std::size_t>(j)] == doctest::Approx(dot).epsilon(1e-14));
        }
    }
}

TEST_CASE("unknown tasks are cold starts") {
    const auto R = tiny_matrix();
    FactorModel model;
    model.hp.k = 1;
    model.tasks = FactorMatrix::Ones(2, 1);
    model.methods = FactorMatrix::Ones(2, 1);
    CHECK_THROWS_AS(score_task(model, 2), ColdStartError);
    CHECK_THROWS_AS(score_task(model, R, "t9"), ColdStartError);
    CHECK(score_task(model, R, "t1").size() == 2);
}

TEST_CASE("top two of three") {
    const std::vector<double> s{0.9, 0.1, 0.5};
    const auto list = top_n(s, {}, 2);
    REQUIRE(list.items.size() == 2);
    CHECK(list.items[0].method == 0);
    CHECK(list.items[1].method == 2);
}

TEST_CASE("excluded methods never appear") {
    const std::vector<double> s{0.9, 0.1, 0.5};
    const std::vector<std::size_t> ex{0};
    const auto list = top_n(s, ex, 2);
    REQUIRE(list.items.size() == 2);
    CHECK(list.items[0].method == 2);
    CHECK(list.items[1].method == 1);
    const std::vector<std::size_t> all{0, 1, 2};
    CHECK(top_n(s, all, 5).items.empty());
}

TEST_CASE("ties go to the lower index") {
    const std::vector<double> s{0.5, 0.7, 0.5, 0.7};
    const auto list = top_n(s, {}, 4);
    std::vector<std::size_t> order;
    for (const auto& it : list.items) order.push_back(it.method);
    CHECK(order == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("N of zero is rejected and large N returns everything") {
    const std::vector<double> s{0.2, 0.1};
    CHECK_THROWS_AS(top_n(s, {}, 0), ValidationError);
    const auto list = top_n(s, {}, 100);
    CHECK(list.items.size() == 2);
    CHECK(list.truncation == 100);
}

TEST_CASE("ranked lists are sorted, unique and respect exclusions") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> level(0, 5);
    std::bernoulli_distribution coin(0.3);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> s(40);
        for (auto& v : s) v = level(rng) * 0.25;
        std::vector<std::size_t> ex;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (coin(rng)) ex.push_back(j);
        }
        const auto list = top_n(s, ex, 15);
        std::set<std::size_t> seen;
        for (std::size_t r = 0; r < list.items.size(); ++r) {
            const auto& it = list.items[r];
            CHECK(std::find(ex.begin(), ex.end(), it.method) == ex.end());
            CHECK(seen.insert(it.method).second);
            if (r > 0) {
                const auto& prev = list.items[r - 1];
                CHECK((prev.score > it.score || (prev.score == it.score && prev.method < it.method)));
            }
        }
        // anything left out scores no higher than the last item kept
        if (!list.items.empty()) {
            const auto& last = list.items.back();
            for (std::size_t j = 0; j < s.size(); ++j) {
                if (seen.contains(j) || std::find(ex.begin(), ex.end(), j) != ex.end()) continue;
                CHECK((s[j] < last.score || (s[j] == last.score && j > last.method)));
            }
        }
    }
}

TEST_CASE("raising one score never lowers its rank") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(20);
        for (auto& v : s) v = u(rng);
        auto rank_of = [](const RankedList& l, std::size_t j) {
            for (std::size_t r = 0; r < l.items.size(); ++r) {
                if (l.items[r].method == j) return r;
            }
            return l.items.size();
        };
        const std::size_t j = static_cast<std::size_t>(trial % 20);
        const auto before = rank_of(top_n(s, {}, 20), j);
        s[j] += u(rng);
        CHECK(rank_of(top_n(s, {}, 20), j) <= before);
    }
}

TEST_CASE("recommendations exclude training methods and are written by id") {
    const auto R = tiny_matrix();
    FactorModel model;
    model.hp.k = 1;
    model.hp.variant = Variant::MF;
    model.tasks = FactorMatrix::Ones(2, 1);
    model.methods.resize(2, 1);
    model.methods << 0.25, 0.5;
    const FactorScorer scorer(model);
    CHECK(scorer.name() == "MF");
    const auto list = recommend(scorer, R, 0, 10);
    REQUIRE(list.items.size() == 1);
    CHECK(list.items[0].method == 1);
    CHECK(list.task == "t0");
    std::ostringstream out;
    const std::vector<RankedList> lists{list};
    write_recommendations(out, lists, R);
    CHECK(out.str() == "t0\t1\tm1\t0.5\n");
    CHECK_THROWS_AS(recommend(scorer, R, 2, 10), ColdStartError);
}
