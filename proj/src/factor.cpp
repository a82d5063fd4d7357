#include "amrec/factor.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

#include "amrec/error.hpp"
#include "parallel.hpp"

namespace amrec {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::MF: return "MF";
        case Variant::MF_TRR: return "MF-TRR";
        case Variant::MF_MRR: return "MF-MRR";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view token) {
    std::string t;
    for (char c : token) t.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "mf") return Variant::MF;
    if (t == "mf-trr") return Variant::MF_TRR;
    if (t == "mf-mrr") return Variant::MF_MRR;
    return std::nullopt;
}

std::string_view to_string(UpdateMode mode) {
    return mode == UpdateMode::GaussSeidel ? "gauss-seidel" : "jacobi";
}

std::optional<UpdateMode> parse_update_mode(std::string_view token) {
    if (token == "gauss-seidel" || token == "gs") return UpdateMode::GaussSeidel;
    if (token == "jacobi") return UpdateMode::Jacobi;
    return std::nullopt;
}

void Hyperparams::validate() const {
    if (k < 1) throw ValidationError("k must be >= 1");
    if (!(lambda_t >= 0.0) || !(lambda_m >= 0.0)) throw ValidationError("lambda penalties must be >= 0");
    if (!(beta >= 0.0)) throw ValidationError("beta must be >= 0");
    if (!(confidence_w0 > 0.0 && confidence_w0 <= 1.0)) throw ValidationError("w0 must be in (0, 1]");
    if (max_sweeps < 0) throw ValidationError("max_sweeps must be >= 0");
    if (!(rel_tol >= 0.0)) throw ValidationError("rel_tol must be >= 0");
}

namespace {

using Entries = std::vector<std::vector<SimRankWeights::Entry>>;

// The weight lists of the side `variant` regularizes, or nullptr.
const Entries* regularized(const Hyperparams& hp, const SimRankWeights& weights, bool task_side, std::size_t rows) {
    if (hp.effective_beta() == 0.0) return nullptr;
    if (task_side != (hp.variant == Variant::MF_TRR)) return nullptr;
    const Entries& side = task_side ? weights.tasks : weights.methods;
    if (side.empty()) return nullptr;
    if (side.size() != rows) throw ConsistencyError("relation weights do not match the factor dimensions");
    for (const auto& list : side) {
        for (const auto& e : list) {
            if (e.neighbor >= rows) throw ConsistencyError("relation weight names an out-of-range neighbor");
        }
    }
    return &side;
}

// For each i, the pairs (p, weig(p, i)) with i in C(p).
Entries incoming(const Entries& out) {
    Entries in(out.size());
    for (std::size_t p = 0; p < out.size(); ++p) {
        for (const auto& e : out[p]) in[e.neighbor].push_back({p, e.weight});
    }
    return in;
}

void check_dims(const FactorModel& model, const RelationMatrix& R) {
    const auto k = static_cast<Eigen::Index>(model.hp.k);
    if (model.tasks.rows() != static_cast<Eigen::Index>(R.rows()) ||
        model.methods.rows() != static_cast<Eigen::Index>(R.cols()) || model.tasks.cols() != k ||
        model.methods.cols() != k) {
        throw ValidationError("factor dimensions do not match the relation matrix");
    }
}

double side_xrr(const FactorMatrix& X, const Entries& out) {
    double total = 0.0;
    Eigen::RowVectorXd r(X.cols());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].empty()) continue;
        r = X.row(static_cast<Eigen::Index>(i));
        for (const auto& e : out[i]) r -= e.weight * X.row(static_cast<Eigen::Index>(e.neighbor));
        total += r.squaredNorm();
    }
    return total;
}

// Gradient of 1/2 sum_ij C_ij (R_ij - x_i . y_j)^2 + lambda/2 ||X||^2 with respect to X.
template <typename Adjacency>
FactorMatrix data_gradient(const FactorMatrix& X, const FactorMatrix& Y, Adjacency&& adj, double lambda, double w0) {
    const Eigen::MatrixXd gram = Y.transpose() * Y;
    FactorMatrix g = w0 * (X * gram) + lambda * X;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (auto j : adj(static_cast<std::size_t>(i))) {
            const auto yj = Y.row(static_cast<Eigen::Index>(j));
            const double pred = X.row(i).dot(yj);
            g.row(i) += ((1.0 - w0) * pred - 1.0) * yj;
        }
    }
    return g;
}

void add_xrr_gradient(FactorMatrix& g, const FactorMatrix& X, const Entries& out, double beta) {
    Eigen::RowVectorXd r(X.cols());
    for (std::size_t p = 0; p < out.size(); ++p) {
        if (out[p].empty()) continue;
        r = X.row(static_cast<Eigen::Index>(p));
        for (const auto& e : out[p]) r -= e.weight * X.row(static_cast<Eigen::Index>(e.neighbor));
        g.row(static_cast<Eigen::Index>(p)) += beta * r;
        for (const auto& e : out[p]) g.row(static_cast<Eigen::Index>(e.neighbor)) -= beta * e.weight * r;
    }
}

struct HalfSweep {
    FactorMatrix& own;
    const FactorMatrix& other;
    double lambda;
    double w0;
    double beta;
    const Entries* reg_out;  // nullptr when this side is unregularized
    const char* label;
};

// Solves A_i x = b_i for row i, reading neighbor vectors from `src`.
template <typename Adjacency>
Eigen::VectorXd solve_row(const HalfSweep& hs, const Eigen::MatrixXd& base, const FactorMatrix& src,
                          const Entries* reg_in, std::size_t i, Adjacency&& adj) {
    const Eigen::Index k = hs.own.cols();
    Eigen::MatrixXd A = base;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (auto j : adj(i)) {
        const auto yj = hs.other.row(static_cast<Eigen::Index>(j)).transpose();
        A.noalias() += (1.0 - hs.w0) * yj * yj.transpose();
        b += yj;
    }

    if (hs.reg_out && !(*hs.reg_out)[i].empty()) {
        const auto& out = *hs.reg_out;
        double diag = 1.0;
        for (const auto& in : (*reg_in)[i]) diag += in.weight * in.weight;
        A.diagonal().array() += hs.beta * diag;

        for (const auto& e : out[i]) b += hs.beta * e.weight * src.row(static_cast<Eigen::Index>(e.neighbor)).transpose();
        Eigen::VectorXd v(k);
        for (const auto& in : (*reg_in)[i]) {
            v = src.row(static_cast<Eigen::Index>(in.neighbor)).transpose();
            for (const auto& e : out[in.neighbor]) {
                if (e.neighbor != i) v -= e.weight * src.row(static_cast<Eigen::Index>(e.neighbor)).transpose();
            }
            b += hs.beta * in.weight * v;
        }
    }

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NumericalError(std::string("singular ALS system at ") + hs.label + " row " + std::to_string(i));
    }
    return llt.solve(b);
}

template <typename Adjacency>
void update_side(const HalfSweep& hs, UpdateMode mode, unsigned threads, Adjacency&& adj) {
    const std::size_t rows = static_cast<std::size_t>(hs.own.rows());
    Eigen::MatrixXd base = hs.w0 * (hs.other.transpose() * hs.other);
    base.diagonal().array() += hs.lambda;

    if (!hs.reg_out) {
        // Rows are independent given the other side.
        detail::parallel_blocks(rows, threads, [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                hs.own.row(static_cast<Eigen::Index>(i)) = solve_row(hs, base, hs.own, nullptr, i, adj).transpose();
            }
        });
        return;
    }

    const Entries reg_in = incoming(*hs.reg_out);
    if (mode == UpdateMode::GaussSeidel) {
        for (std::size_t i = 0; i < rows; ++i) {
            hs.own.row(static_cast<Eigen::Index>(i)) = solve_row(hs, base, hs.own, &reg_in, i, adj).transpose();
        }
        return;
    }
    const FactorMatrix snapshot = hs.own;
    detail::parallel_blocks(rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            hs.own.row(static_cast<Eigen::Index>(i)) = solve_row(hs, base, snapshot, &reg_in, i, adj).transpose();
        }
    });
}

}  // namespace

double xrr_term(const FactorModel& model, const SimRankWeights& weights) {
    switch (model.hp.variant) {
        case Variant::MF: return 0.0;
        case Variant::MF_TRR: return weights.tasks.empty() ? 0.0 : side_xrr(model.tasks, weights.tasks);
        case Variant::MF_MRR: return weights.methods.empty() ? 0.0 : side_xrr(model.methods, weights.methods);
    }
    return 0.0;
}

double objective(const FactorModel& model, const RelationMatrix& R, const SimRankWeights& weights) {
    check_dims(model, R);
    const auto& hp = model.hp;
    const auto& T = model.tasks;
    const auto& M = model.methods;
    const double w0 = hp.confidence_w0;

    // sum over all cells of w0 * pred^2, corrected on observed cells.
    const Eigen::MatrixXd gram = M.transpose() * M;
    double data = w0 * (T * gram).cwiseProduct(T).sum();
    for (std::size_t i = 0; i < R.rows(); ++i) {
        for (auto j : R.methods_of(i)) {
            const double pred = T.row(static_cast<Eigen::Index>(i)).dot(M.row(static_cast<Eigen::Index>(j)));
            data += (1.0 - pred) * (1.0 - pred) - w0 * pred * pred;
        }
    }

    double value = 0.5 * data + 0.5 * hp.lambda_t * T.squaredNorm() + 0.5 * hp.lambda_m * M.squaredNorm();
    const double beta = hp.effective_beta();
    if (beta != 0.0) {
        // Validates the weight lists against the factor dimensions.
        regularized(hp, weights, hp.variant == Variant::MF_TRR,
                    hp.variant == Variant::MF_TRR ? R.rows() : R.cols());
        value += 0.5 * beta * xrr_term(model, weights);
    }
    return value;
}

FactorGradient gradient(const FactorModel& model, const RelationMatrix& R, const SimRankWeights& weights) {
    check_dims(model, R);
    const auto& hp = model.hp;
    FactorGradient g;
    g.tasks = data_gradient(model.tasks, model.methods, [&](std::size_t i) { return R.methods_of(i); },
                            hp.lambda_t, hp.confidence_w0);
    g.methods = data_gradient(model.methods, model.tasks, [&](std::size_t j) { return R.tasks_of(j); },
                              hp.lambda_m, hp.confidence_w0);
    const double beta = hp.effective_beta();
    if (const auto* out = regularized(hp, weights, true, R.rows())) add_xrr_gradient(g.tasks, model.tasks, *out, beta);
    if (const auto* out = regularized(hp, weights, false, R.cols()))
        add_xrr_gradient(g.methods, model.methods, *out, beta);
    return g;
}

FactorModel als_sweep(FactorModel model, const RelationMatrix& R, const SimRankWeights& weights) {
    check_dims(model, R);
    const auto& hp = model.hp;
    const double beta = hp.effective_beta();

    auto tasks_half = [&] {
        HalfSweep hs{model.tasks, model.methods, hp.lambda_t, hp.confidence_w0, beta,
                     regularized(hp, weights, true, R.rows()), "task"};
        update_side(hs, hp.update_mode, hp.threads, [&](std::size_t i) { return R.methods_of(i); });
    };
    auto methods_half = [&] {
        HalfSweep hs{model.methods, model.tasks, hp.lambda_m, hp.confidence_w0, beta,
                     regularized(hp, weights, false, R.cols()), "method"};
        update_side(hs, hp.update_mode, hp.threads, [&](std::size_t j) { return R.tasks_of(j); });
    };
    if (hp.methods_first) {
        methods_half();
        tasks_half();
    } else {
        tasks_half();
        methods_half();
    }
    return model;
}

FactorModel initialize(const RelationMatrix& R, const Hyperparams& hp) {
    hp.validate();
    FactorModel model;
    model.hp = hp;
    const auto k = static_cast<Eigen::Index>(hp.k);
    model.tasks.resize(static_cast<Eigen::Index>(R.rows()), k);
    model.methods.resize(static_cast<Eigen::Index>(R.cols()), k);

    std::mt19937_64 rng(hp.seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hp.k));
    // 53 random bits mapped to [0, 1); portable across standard libraries.
    auto draw = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * scale; };
    for (Eigen::Index i = 0; i < model.tasks.size(); ++i) model.tasks.data()[i] = draw();
    for (Eigen::Index i = 0; i < model.methods.size(); ++i) model.methods.data()[i] = draw();
    return model;
}

FactorModel train(const RelationMatrix& R, const SimRankWeights& weights, const Hyperparams& hp) {
    return train(R, weights, hp, initialize(R, hp));
}

FactorModel train(const RelationMatrix& R, const SimRankWeights& weights, const Hyperparams& hp,
                  FactorModel start) {
    hp.validate();
    if (R.nnz() == 0) throw ValidationError("no training interactions");
    start.hp = hp;
    start.objective_trace.clear();
    check_dims(start, R);

    double prev = objective(start, R, weights);
    if (!std::isfinite(prev)) throw NumericalError("non-finite objective at initialization");
    start.objective_trace.push_back(prev);

    for (int sweep = 1; sweep <= hp.max_sweeps; ++sweep) {
        start = als_sweep(std::move(start), R, weights);
        const double cur = objective(start, R, weights);
        if (!std::isfinite(cur)) throw NumericalError("non-finite objective at sweep " + std::to_string(sweep));
        start.objective_trace.push_back(cur);
        const double rel = (prev - cur) / std::max(std::abs(prev), 1e-300);
        prev = cur;
        if (hp.rel_tol > 0.0 && rel < hp.rel_tol) break;
    }
    return start;
}

}  // namespace amrec
