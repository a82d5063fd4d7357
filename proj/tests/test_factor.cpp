#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"

#include "amrec/corpus.hpp"
#include "amrec/error.hpp"
#include "amrec/factor.hpp"
#include "amrec/graph.hpp"
#include "amrec/synth.hpp"

using namespace amrec;
using testing::close_rel;

namespace {

RelationMatrix matrix_of(std::size_t m, std::size_t n, std::initializer_list<std::pair<int, int>> cells) {
    std::vector<std::string> t, me;
    for (std::size_t i = 0; i < m; ++i) t.push_back("t" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) me.push_back("m" + std::to_string(j));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto [i, j] : cells) pairs.emplace_back(t[static_cast<std::size_t>(i)], me[static_cast<std::size_t>(j)]);
    return RelationMatrix::from_pairs(t, me, pairs);
}

SimRankWeights empty_weights(const RelationMatrix& R) {
    SimRankWeights w;
    w.tasks.resize(R.rows());
    w.methods.resize(R.cols());
    return w;
}

FactorModel model_with(std::size_t k, FactorMatrix T, FactorMatrix M) {
    FactorModel model;
    model.hp.k = k;
    model.tasks = std::move(T);
    model.methods = std::move(M);
    return model;
}

bool bitwise_equal(const FactorMatrix& a, const FactorMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (std::memcmp(&a.data()[i], &b.data()[i], sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("objective of a perfect single-cell fit is the penalty only") {
    const auto R = matrix_of(1, 1, {{0, 0}});
    auto model = model_with(1, FactorMatrix::Ones(1, 1), FactorMatrix::Ones(1, 1));
    model.hp.variant = Variant::MF;
    CHECK(objective(model, R, empty_weights(R)) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("unobserved cells are weighted by w0") {
    const auto R = matrix_of(1, 2, {{0, 0}});
    FactorMatrix M(2, 1);
    M << 1.0, 2.0;
    auto model = model_with(1, FactorMatrix::Ones(1, 1), M);
    model.hp.variant = Variant::MF;
    model.hp.lambda_t = model.hp.lambda_m = 0.0;
    // 1/2 * (1 * (1-1)^2 + 0.01 * (0-2)^2)
    CHECK(objective(model, R, empty_weights(R)) == doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("relation term on a three-task chain") {
    const auto R = matrix_of(3, 1, {{0, 0}, {1, 0}, {2, 0}});
    FactorMatrix T(3, 1);
    T << 1.0, 2.0, 4.0;
    auto model = model_with(1, T, FactorMatrix::Ones(1, 1));
    model.hp.variant = Variant::MF_TRR;
    SimRankWeights w = empty_weights(R);
    w.tasks[0] = {{1, 1.0}};
    w.tasks[1] = {{0, 0.5}, {2, 0.5}};
    w.tasks[2] = {{1, 1.0}};
    // (1-2)^2 + (2-2.5)^2 + (4-2)^2
    CHECK(xrr_term(model, w) == doctest::Approx(5.25).epsilon(1e-15));
    model.hp.variant = Variant::MF_MRR;
    CHECK(xrr_term(model, w) == 0.0);
    model.hp.variant = Variant::MF;
    CHECK(xrr_term(model, w) == 0.0);
}

TEST_CASE("objective matches the triple-loop oracle") {
    for (auto variant : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            const auto inst = testing::random_instance(seed, variant);
            const double got = objective(inst.model, inst.R, inst.weights);
            const double ref = testing::naive_objective(inst.model, inst.R, inst.weights);
            CHECK(close_rel(got, ref, 1e-10, 1e-12));
        }
    }
}

TEST_CASE("analytic gradient matches central differences") {
    for (auto variant : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) {
        for (std::uint64_t seed = 100; seed < 125; ++seed) {
            const auto inst = testing::random_instance(seed, variant);
            const auto g = gradient(inst.model, inst.R, inst.weights);
            const auto fd = testing::finite_difference_gradient(inst.model, inst.R, inst.weights);
            for (Eigen::Index i = 0; i < g.tasks.size(); ++i) CHECK(close_rel(g.tasks.data()[i], fd.tasks.data()[i], 1e-5));
            for (Eigen::Index i = 0; i < g.methods.size(); ++i)
                CHECK(close_rel(g.methods.data()[i], fd.methods.data()[i], 1e-5));
        }
    }
}

TEST_CASE("single-cell sweep solves the one-dimensional normal equation") {
    const auto R = matrix_of(1, 1, {{0, 0}});
    FactorMatrix M(1, 1);
    M << 0.5;
    auto model = model_with(1, FactorMatrix::Zero(1, 1), M);
    model.hp.variant = Variant::MF;
    model.hp.lambda_t = model.hp.lambda_m = 0.0;
    const auto next = als_sweep(model, R, empty_weights(R));
    CHECK(next.tasks(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(next.methods(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("unregularized sweep agrees with dense per-row solves") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto inst = testing::random_instance(seed, Variant::MF);
        const auto got = als_sweep(inst.model, inst.R, inst.weights);
        testing::naive_wmf_sweep(inst.model, inst.R);
        for (Eigen::Index i = 0; i < got.tasks.size(); ++i)
            CHECK(close_rel(got.tasks.data()[i], inst.model.tasks.data()[i], 1e-9, 1e-9));
        for (Eigen::Index i = 0; i < got.methods.size(); ++i)
            CHECK(close_rel(got.methods.data()[i], inst.model.methods.data()[i], 1e-9, 1e-9));
    }
}

TEST_CASE("each sweep does not increase the objective") {
    for (auto variant : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) {
        for (auto mode : {UpdateMode::GaussSeidel, UpdateMode::Jacobi}) {
            for (std::uint64_t seed = 1; seed <= 15; ++seed) {
                auto inst = testing::random_instance(seed, variant);
                inst.model.hp.update_mode = mode;
                double prev = objective(inst.model, inst.R, inst.weights);
                for (int s = 0; s < 10; ++s) {
                    inst.model = als_sweep(std::move(inst.model), inst.R, inst.weights);
                    const double cur = objective(inst.model, inst.R, inst.weights);
                    if (mode == UpdateMode::GaussSeidel) CHECK(cur <= prev * (1 + 1e-12));
                    prev = cur;
                }
            }
        }
    }
}

TEST_CASE("zero beta makes the regularized variants identical to plain MF") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = testing::random_instance(seed, Variant::MF);
        Hyperparams hp = inst.model.hp;
        hp.beta = 0.0;
        hp.max_sweeps = 15;
        const auto mf = train(inst.R, inst.weights, hp);
        for (auto variant : {Variant::MF_TRR, Variant::MF_MRR}) {
            hp.variant = variant;
            const auto other = train(inst.R, inst.weights, hp);
            CHECK(bitwise_equal(mf.tasks, other.tasks));
            CHECK(bitwise_equal(mf.methods, other.methods));
            CHECK(mf.objective_trace == other.objective_trace);
        }
        hp.variant = Variant::MF;
    }
}

TEST_CASE("swapping tasks and methods swaps the learned factors") {
    for (auto variant : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) {
        for (std::uint64_t seed = 1; seed <= 8; ++seed) {
            const auto inst = testing::random_instance(seed, variant);
            Hyperparams hp = inst.model.hp;
            hp.max_sweeps = 20;
            hp.rel_tol = 0.0;
            const auto a = train(inst.R, inst.weights, hp, inst.model);

            Hyperparams hpt = hp;
            std::swap(hpt.lambda_t, hpt.lambda_m);
            if (variant == Variant::MF_TRR) hpt.variant = Variant::MF_MRR;
            if (variant == Variant::MF_MRR) hpt.variant = Variant::MF_TRR;
            hpt.methods_first = true;
            FactorModel start;
            start.tasks = inst.model.methods;
            start.methods = inst.model.tasks;
            const SimRankWeights wt{inst.weights.methods, inst.weights.tasks};
            const auto b = train(inst.R.transposed(), wt, hpt, start);

            CHECK((a.tasks - b.methods).cwiseAbs().maxCoeff() <= 1e-9);
            CHECK((a.methods - b.tasks).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("rank-one data is reconstructed") {
    std::initializer_list<std::pair<int, int>> cells{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {1, 2},
                                                     {2, 0}, {2, 1}, {2, 2}, {3, 0}, {3, 1}, {3, 2}};
    const auto R = matrix_of(4, 3, cells);
    Hyperparams hp;
    hp.k = 1;
    hp.variant = Variant::MF;
    const auto model = train(R, empty_weights(R), hp);
    const FactorMatrix pred = model.tasks * model.methods.transpose();
    CHECK(pred.minCoeff() >= 0.5);
}

TEST_CASE("two planted blocks separate observed from unobserved cells") {
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) cells.emplace_back(i, j);
    }
    for (int i = 5; i < 10; ++i) {
        for (int j = 5; j < 10; ++j) cells.emplace_back(i, j);
    }
    std::vector<std::string> t, me;
    for (int i = 0; i < 10; ++i) {
        t.push_back("t" + std::to_string(i));
        me.push_back("m" + std::to_string(i));
    }
    std::vector<std::pair<std::string, std::string>> pairs;
    for (auto [i, j] : cells) pairs.emplace_back(t[static_cast<std::size_t>(i)], me[static_cast<std::size_t>(j)]);
    const auto R = RelationMatrix::from_pairs(t, me, pairs);
    Hyperparams hp;
    hp.k = 2;
    hp.variant = Variant::MF;
    const auto model = train(R, empty_weights(R), hp);
    const FactorMatrix pred = model.tasks * model.methods.transpose();
    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            if (R.contains(i, j)) CHECK(pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) >= 0.5);
            else CHECK(pred(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) < 0.5);
        }
    }
}

TEST_CASE("gradient vanishes at an ALS fixed point") {
    for (auto variant : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const auto inst = testing::random_instance(seed, variant);
            Hyperparams hp = inst.model.hp;
            hp.max_sweeps = 3000;
            hp.rel_tol = 1e-15;
            const auto model = train(inst.R, inst.weights, hp);
            const auto g = gradient(model, inst.R, inst.weights);
            const double obj = model.objective_trace.back();
            const double worst = std::max(g.tasks.cwiseAbs().maxCoeff(), g.methods.cwiseAbs().maxCoeff());
            CHECK(worst <= 1e-6 * (1.0 + obj));
        }
    }
}

TEST_CASE("default-size synthetic corpus converges within 50 sweeps") {
    SynthConfig cfg;
    cfg.seed = 1;
    const auto corpus = generate(cfg);
    const auto ds = temporal_split(corpus.relations, cfg.cutoff_year, corpus.concepts);
    const auto R = build_matrix(ds.train);
    const auto ns = build_neighbor_sets(ds.train, R);
    Hyperparams hp;
    hp.k = 16;
    hp.max_sweeps = 50;
    const auto model = train(R, SimRankWeights::uniform(ns), hp);
    const auto& trace = model.objective_trace;
    const double last_decrease = (trace[trace.size() - 2] - trace.back()) / trace[trace.size() - 2];
    CHECK(last_decrease < hp.rel_tol);
}

TEST_CASE("thread count and update mode bookkeeping are deterministic") {
    const auto inst = testing::random_instance(3, Variant::MF_TRR);
    for (auto mode : {UpdateMode::GaussSeidel, UpdateMode::Jacobi}) {
        Hyperparams hp = inst.model.hp;
        hp.update_mode = mode;
        hp.max_sweeps = 10;
        const auto one = train(inst.R, inst.weights, hp);
        hp.threads = 4;
        const auto four = train(inst.R, inst.weights, hp);
        CHECK(bitwise_equal(one.tasks, four.tasks));
        CHECK(bitwise_equal(one.methods, four.methods));
    }
}

TEST_CASE("singular systems are reported") {
    const auto R = matrix_of(2, 2, {{0, 0}, {1, 1}});
    Hyperparams hp;
    hp.k = 4;
    hp.variant = Variant::MF;
    hp.lambda_t = hp.lambda_m = 0.0;
    CHECK_THROWS_AS(train(R, empty_weights(R), hp), NumericalError);
}

TEST_CASE("invalid hyperparameters are rejected") {
    const auto R = matrix_of(1, 1, {{0, 0}});
    Hyperparams hp;
    hp.k = 0;
    CHECK_THROWS_AS(train(R, empty_weights(R), hp), ValidationError);
    hp = {};
    hp.confidence_w0 = 0.0;
    CHECK_THROWS_AS(train(R, empty_weights(R), hp), ValidationError);
}

TEST_CASE("initialization is seeded and bounded") {
    const auto inst = testing::random_instance(4, Variant::MF);
    Hyperparams hp = inst.model.hp;
    const auto a = initialize(inst.R, hp);
    const auto b = initialize(inst.R, hp);
    CHECK(bitwise_equal(a.tasks, b.tasks));
    CHECK(bitwise_equal(a.methods, b.methods));
    const double bound = 1.0 / std::sqrt(static_cast<double>(hp.k));
    CHECK(a.tasks.minCoeff() >= 0.0);
    CHECK(a.tasks.maxCoeff() <= bound);
    hp.seed += 1;
    CHECK_FALSE(bitwise_equal(initialize(inst.R, hp).tasks, a.tasks));
}

TEST_CASE("model file round trip is exact") {
    const auto inst = testing::random_instance(12, Variant::MF_MRR);
    Hyperparams hp = inst.model.hp;
    hp.max_sweeps = 5;
    const auto model = train(inst.R, inst.weights, hp);
    std::stringstream buf;
    save_model(buf, model);
    const auto back = load_model(buf);
    CHECK(bitwise_equal(model.tasks, back.tasks));
    CHECK(bitwise_equal(model.methods, back.methods));
    CHECK(back.hp.variant == Variant::MF_MRR);
    CHECK(back.hp.k == hp.k);
    CHECK(back.hp.beta == hp.beta);
    CHECK(back.hp.confidence_w0 == hp.confidence_w0);
    CHECK(back.hp.seed == hp.seed);
}

TEST_CASE("damaged model files are rejected") {
    const auto inst = testing::random_instance(12, Variant::MF);
    std::ostringstream out;
    save_model(out, inst.model);
    const auto text = out.str();

    std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    CHECK_THROWS_AS(load_model(truncated), ParseError);
    std::istringstream wrong("something else\n");
    CHECK_THROWS_AS(load_model(wrong), ParseError);
    std::string bad = text;
    bad[bad.find("\nT\t0\t") + 5] = 'x';
    std::istringstream corrupted(bad);
    CHECK_THROWS_AS(load_model(corrupted), ParseError);
}

TEST_CASE("variant and update mode names parse back") {
    for (auto v : {Variant::MF, Variant::MF_TRR, Variant::MF_MRR}) CHECK(parse_variant(to_string(v)) == v);
    CHECK(parse_variant("mf_trr") == Variant::MF_TRR);
    CHECK_FALSE(parse_variant("svd").has_value());
    for (auto u : {UpdateMode::GaussSeidel, UpdateMode::Jacobi}) CHECK(parse_update_mode(to_string(u)) == u);
}
