#pragma once

// Training-side structures: the binary Task x Method matrix, same-kind
// neighbor sets, and the undirected concept graph used for SimRank.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "amrec/corpus.hpp"

namespace amrec {

// Binary relation matrix R. Rows are tasks, columns are methods, both indexed
// in lexicographic id order. Stored as sorted adjacency in both directions.
class RelationMatrix {
public:
    RelationMatrix() = default;

    // Ids need not be sorted or unique; pairs refer to ids. Throws
    // ValidationError when no pairs are given or a pair names an unknown id.
    static RelationMatrix from_pairs(std::vector<std::string> task_ids, std::vector<std::string> method_ids,
                                     std::span<const std::pair<std::string, std::string>> pairs);

    std::size_t rows() const noexcept { return task_ids_.size(); }
    std::size_t cols() const noexcept { return method_ids_.size(); }
    std::size_t nnz() const noexcept { return nnz_; }

    const std::vector<std::string>& task_ids() const noexcept { return task_ids_; }
    const std::vector<std::string>& method_ids() const noexcept { return method_ids_; }
    std::optional<std::size_t> task_index(std::string_view id) const;
    std::optional<std::size_t> method_index(std::string_view id) const;

    std::span<const std::size_t> methods_of(std::size_t task) const { return task_rows_[task]; }
    std::span<const std::size_t> tasks_of(std::size_t method) const { return method_cols_[method]; }
    bool contains(std::size_t task, std::size_t method) const;

    // Rows and columns swap roles: tasks of the result are this matrix's methods.
    RelationMatrix transposed() const;

    bool operator==(const RelationMatrix& other) const {
        return task_ids_ == other.task_ids_ && method_ids_ == other.method_ids_ && task_rows_ == other.task_rows_;
    }

private:
    std::vector<std::string> task_ids_;
    std::vector<std::string> method_ids_;
    std::unordered_map<std::string, std::size_t> task_lookup_;
    std::unordered_map<std::string, std::size_t> method_lookup_;
    std::vector<std::vector<std::size_t>> task_rows_;
    std::vector<std::vector<std::size_t>> method_cols_;
    std::size_t nnz_ = 0;
};

// Uses only TaskMethod records. Throws ValidationError("no training interactions") if none.
RelationMatrix build_matrix(std::span<const RelationRecord> train);

// Same-kind neighbor sets over matrix indices, symmetric, sorted, loop-free.
struct NeighborSets {
    std::vector<std::vector<std::size_t>> tasks;
    std::vector<std::vector<std::size_t>> methods;
    std::size_t dropped = 0;  // records touching a concept with no matrix index
};

NeighborSets build_neighbor_sets(std::span<const RelationRecord> train, const RelationMatrix& matrix);

enum class GraphSubstrate { Full, Bipartite };

// Undirected simple graph over training concepts; node order is lexicographic by id.
struct ConceptGraph {
    std::vector<std::string> nodes;
    std::vector<std::vector<std::size_t>> adjacency;  // sorted
    std::size_t edge_count = 0;

    std::optional<std::size_t> index_of(std::string_view id) const;
    std::size_t size() const noexcept { return nodes.size(); }
};

// Bipartite keeps only TaskMethod edges; every training concept is still a node.
ConceptGraph build_concept_graph(std::span<const RelationRecord> train,
                                 GraphSubstrate substrate = GraphSubstrate::Full);

// Debug dump: one `a<TAB>b` line per undirected edge with a < b.
void write_edge_list(std::ostream& out, const ConceptGraph& graph);

}  // namespace amrec
