#include "amrec/graph.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "amrec/error.hpp"

namespace amrec {

namespace {

std::vector<std::string> sorted_unique(std::vector<std::string> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::unordered_map<std::string, std::size_t> make_lookup(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, std::size_t> lookup;
    lookup.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) lookup.emplace(ids[i], i);
    return lookup;
}

void sort_unique(std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

RelationMatrix RelationMatrix::from_pairs(std::vector<std::string> task_ids, std::vector<std::string> method_ids,
                                          std::span<const std::pair<std::string, std::string>> pairs) {
    if (pairs.empty()) throw ValidationError("no training interactions");

    RelationMatrix r;
    r.task_ids_ = sorted_unique(std::move(task_ids));
    r.method_ids_ = sorted_unique(std::move(method_ids));
    r.task_lookup_ = make_lookup(r.task_ids_);
    r.method_lookup_ = make_lookup(r.method_ids_);
    r.task_rows_.resize(r.task_ids_.size());
    r.method_cols_.resize(r.method_ids_.size());

    for (const auto& [task, method] : pairs) {
        const auto ti = r.task_index(task);
        const auto mi = r.method_index(method);
        if (!ti || !mi) throw ValidationError("pair (" + task + ", " + method + ") names an unknown id");
        r.task_rows_[*ti].push_back(*mi);
        r.method_cols_[*mi].push_back(*ti);
    }
    for (auto& row : r.task_rows_) sort_unique(row);
    for (auto& col : r.method_cols_) sort_unique(col);
    for (const auto& row : r.task_rows_) r.nnz_ += row.size();
    return r;
}

std::optional<std::size_t> RelationMatrix::task_index(std::string_view id) const {
    auto it = task_lookup_.find(std::string(id));
    if (it == task_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> RelationMatrix::method_index(std::string_view id) const {
    auto it = method_lookup_.find(std::string(id));
    if (it == method_lookup_.end()) return std::nullopt;
    return it->second;
}

bool RelationMatrix::contains(std::size_t task, std::size_t method) const {
    const auto& row = task_rows_[task];
    return std::binary_search(row.begin(), row.end(), method);
}

RelationMatrix RelationMatrix::transposed() const {
    RelationMatrix t;
    t.task_ids_ = method_ids_;
    t.method_ids_ = task_ids_;
    t.task_lookup_ = method_lookup_;
    t.method_lookup_ = task_lookup_;
    t.task_rows_ = method_cols_;
    t.method_cols_ = task_rows_;
    t.nnz_ = nnz_;
    return t;
}

RelationMatrix build_matrix(std::span<const RelationRecord> train) {
    std::vector<std::string> tasks, methods;
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& r : train) {
        if (r.kind != RelationKind::TaskMethod) continue;
        tasks.push_back(r.src);
        methods.push_back(r.dst);
        pairs.emplace_back(r.src, r.dst);
    }
    return RelationMatrix::from_pairs(std::move(tasks), std::move(methods), pairs);
}

NeighborSets build_neighbor_sets(std::span<const RelationRecord> train, const RelationMatrix& matrix) {
    NeighborSets ns;
    ns.tasks.resize(matrix.rows());
    ns.methods.resize(matrix.cols());

    for (const auto& r : train) {
        if (r.kind == RelationKind::TaskMethod) continue;
        const bool tasks = r.kind == RelationKind::TaskTask;
        const auto a = tasks ? matrix.task_index(r.src) : matrix.method_index(r.src);
        const auto b = tasks ? matrix.task_index(r.dst) : matrix.method_index(r.dst);
        if (!a || !b) {
            ++ns.dropped;
            continue;
        }
        if (*a == *b) continue;
        auto& sets = tasks ? ns.tasks : ns.methods;
        sets[*a].push_back(*b);
        sets[*b].push_back(*a);
    }
    for (auto& s : ns.tasks) sort_unique(s);
    for (auto& s : ns.methods) sort_unique(s);
    return ns;
}

std::optional<std::size_t> ConceptGraph::index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes.begin());
}

ConceptGraph build_concept_graph(std::span<const RelationRecord> train, GraphSubstrate substrate) {
    ConceptGraph g;
    std::vector<std::string> ids;
    for (const auto& r : train) {
        ids.push_back(r.src);
        ids.push_back(r.dst);
    }
    g.nodes = sorted_unique(std::move(ids));
    g.adjacency.resize(g.nodes.size());

    for (const auto& r : train) {
        if (substrate == GraphSubstrate::Bipartite && r.kind != RelationKind::TaskMethod) continue;
        const auto a = *g.index_of(r.src);
        const auto b = *g.index_of(r.dst);
        if (a == b) continue;
        g.adjacency[a].push_back(b);
        g.adjacency[b].push_back(a);
    }
    for (auto& adj : g.adjacency) {
        sort_unique(adj);
        g.edge_count += adj.size();
    }
    g.edge_count /= 2;
    return g;
}

void write_edge_list(std::ostream& out, const ConceptGraph& graph) {
    for (std::size_t a = 0; a < graph.size(); ++a) {
        for (auto b : graph.adjacency[a]) {
            if (a < b) out << graph.nodes[a] << '\t' << graph.nodes[b] << '\n';
        }
    }
}

}  // namespace amrec
