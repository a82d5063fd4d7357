#pragma once

// Item-to-item collaborative filtering over the binary method columns of R.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "amrec/graph.hpp"

namespace amrec {

// Sparse symmetric cosine similarities between methods:
//   sim(j, j') = |tasks(j) & tasks(j')| / sqrt(|tasks(j)| |tasks(j')|)
class ItemSimilarityTable {
public:
    using Row = std::vector<std::pair<std::size_t, double>>;  // sorted by method index

    explicit ItemSimilarityTable(std::vector<Row> rows) : rows_(std::move(rows)) {}

    double operator()(std::size_t a, std::size_t b) const;
    const Row& row(std::size_t method) const { return rows_[method]; }
    std::size_t size() const noexcept { return rows_.size(); }

private:
    std::vector<Row> rows_;
};

// Off-diagonal similarities below `prune_below` are dropped (0 keeps everything).
ItemSimilarityTable build_similarity(const RelationMatrix& R, double prune_below = 0.0);

// Sum of sim(j, j') over the given methods j', for every j.
std::vector<double> cf_aggregate(const ItemSimilarityTable& table, std::span<const std::size_t> methods);

// cf_aggregate over the task's training methods; those methods get -infinity.
std::vector<double> cf_score(const ItemSimilarityTable& table, const RelationMatrix& R, std::size_t task);

}  // namespace amrec
