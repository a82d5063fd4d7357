#pragma once

// Relation-regularized weighted matrix factorization.
//
//   L(T, M) = 1/2 sum_ij C_ij (R_ij - T_i . M_j)^2
//           + lambda_t/2 ||T||_F^2 + lambda_m/2 ||M||_F^2 + beta/2 xRR
//
// with C_ij = 1 on observed cells and confidence_w0 elsewhere, and
//
//   xRR = sum_i || T_i - sum_{k in C_T(i)} weig(i,k) T_k ||^2     (MF-TRR)
//   xRR = sum_j || M_j - sum_{k in C_M(j)} weig(j,k) M_k ||^2     (MF-MRR)
//
// where concepts with an empty neighbor set contribute nothing. Trained by
// exact block-coordinate ALS: each latent vector is the solution of a k x k
// SPD system with everything else held fixed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "amrec/graph.hpp"
#include "amrec/simrank.hpp"

namespace amrec {

enum class Variant { MF, MF_TRR, MF_MRR };

// Gauss-Seidel reads the newest neighbor vectors inside a half-sweep; Jacobi
// reads a snapshot taken at the start of the half-sweep.
enum class UpdateMode { GaussSeidel, Jacobi };

std::string_view to_string(Variant v);
// Accepts "mf", "mf-trr", "mf-mrr" in any case, with '-' or '_'.
std::optional<Variant> parse_variant(std::string_view token);
std::string_view to_string(UpdateMode mode);
std::optional<UpdateMode> parse_update_mode(std::string_view token);

struct Hyperparams {
    std::size_t k = 32;
    double lambda_t = 0.1;
    double lambda_m = 0.1;
    double beta = 0.01;
    double confidence_w0 = 0.01;
    Variant variant = Variant::MF_TRR;
    int max_sweeps = 100;
    double rel_tol = 1e-4;
    std::uint64_t seed = 1;
    UpdateMode update_mode = UpdateMode::GaussSeidel;
    // Update method vectors before task vectors within a sweep.
    bool methods_first = false;
    unsigned threads = 1;

    // Throws ValidationError on out-of-range values.
    void validate() const;
    // beta is ignored for plain MF.
    double effective_beta() const noexcept { return variant == Variant::MF ? 0.0 : beta; }
};

using FactorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct FactorModel {
    FactorMatrix tasks;    // m x k, row i is T_i
    FactorMatrix methods;  // n x k, row j is M_j
    Hyperparams hp;
    std::vector<double> objective_trace;  // initial objective, then one value per sweep
};

struct FactorGradient {
    FactorMatrix tasks;
    FactorMatrix methods;
};

double objective(const FactorModel& model, const RelationMatrix& R, const SimRankWeights& weights);

// The squared-deviation sum on the regularized side (0 for plain MF).
double xrr_term(const FactorModel& model, const SimRankWeights& weights);

FactorGradient gradient(const FactorModel& model, const RelationMatrix& R, const SimRankWeights& weights);

// One full sweep: every task vector, then every method vector (or the reverse
// when hp.methods_first). Throws NumericalError naming the row if a system is singular.
FactorModel als_sweep(FactorModel model, const RelationMatrix& R, const SimRankWeights& weights);

// Seeded uniform [0, 1/sqrt(k)] initialization, task rows first then method rows.
FactorModel initialize(const RelationMatrix& R, const Hyperparams& hp);

// Runs sweeps until the relative objective decrease drops below hp.rel_tol or
// hp.max_sweeps is reached; rel_tol == 0 always runs max_sweeps. Throws
// NumericalError on a non-finite objective.
FactorModel train(const RelationMatrix& R, const SimRankWeights& weights, const Hyperparams& hp);

// Same, starting from the factors of `start` (its hp and trace are replaced).
FactorModel train(const RelationMatrix& R, const SimRankWeights& weights, const Hyperparams& hp,
                  FactorModel start);

// Versioned text persistence with 17 significant digits per value.
void save_model(std::ostream& out, const FactorModel& model);
FactorModel load_model(std::istream& in, const std::string& source = "<stream>");

}  // namespace amrec
