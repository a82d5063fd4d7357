#pragma once

// SimRank on the undirected concept graph, and the normalized relation
// weights weig(i, k) derived from it.
//
//   s(a, a) = 1
//   s(a, b) = decay / (|N(a)| |N(b)|) * sum_{u in N(a)} sum_{v in N(b)} s(u, v)
//   s(a, b) = 0 when N(a) or N(b) is empty
//
// Iterated Jacobi-style from the identity.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "amrec/graph.hpp"

namespace amrec {

struct SimRankOptions {
    double decay = 0.8;
    int max_iter = 10;
    double tol = 1e-4;
    // Graphs with more nodes than this use sparse row storage.
    std::size_t dense_threshold = 5000;
    unsigned threads = 1;
};

class SimRankScores {
public:
    using SparseRow = std::vector<std::pair<std::size_t, double>>;

    double operator()(std::size_t a, std::size_t b) const;
    std::optional<double> score(std::string_view a, std::string_view b) const;
    std::optional<std::size_t> index_of(std::string_view id) const;

    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }
    double decay() const noexcept { return decay_; }
    int iterations_run() const noexcept { return static_cast<int>(residuals_.size()); }
    double max_residual() const noexcept { return residuals_.empty() ? 0.0 : residuals_.back(); }
    // Max absolute change of each sweep, in order.
    const std::vector<double>& residuals() const noexcept { return residuals_; }
    bool dense() const noexcept { return dense_storage_; }

private:
    friend SimRankScores compute_simrank(const ConceptGraph&, const SimRankOptions&);

    std::vector<std::string> nodes_;
    double decay_ = 0.0;
    std::vector<double> residuals_;
    bool dense_storage_ = true;
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> dense_;
    std::vector<SparseRow> sparse_;  // sorted by column, zeros omitted
};

// Throws ValidationError on an empty graph or out-of-range options.
SimRankScores compute_simrank(const ConceptGraph& graph, const SimRankOptions& options = {});

// weig(i, k) for every concept with a non-empty same-kind neighbor set,
// indexed like the relation matrix. Rows sum to one.
struct SimRankWeights {
    struct Entry {
        std::size_t neighbor;
        double weight;
    };
    std::vector<std::vector<Entry>> tasks;
    std::vector<std::vector<Entry>> methods;

    // weig(i, k) = 1/|C(i)| for every declared neighbor.
    static SimRankWeights uniform(const NeighborSets& neighbors);
};

// raw(i, k) = s(i, k), normalized per concept; falls back to uniform when all
// raw scores are zero. Throws ConsistencyError if a concept is absent from the scores.
SimRankWeights derive_weights(const SimRankScores& scores, const NeighborSets& neighbors,
                              const RelationMatrix& matrix);

// `concept_id<TAB>neighbor_id<TAB>weight`, tasks first then methods.
void write_weights(std::ostream& out, const SimRankWeights& weights, const RelationMatrix& matrix);

}  // namespace amrec
