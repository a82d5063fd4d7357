#include "amrec/simrank.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "amrec/error.hpp"
#include "parallel.hpp"

namespace amrec {

double SimRankScores::operator()(std::size_t a, std::size_t b) const {
    if (dense_storage_) return dense_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    const auto& row = sparse_[a];
    auto it = std::lower_bound(row.begin(), row.end(), b,
                               [](const auto& entry, std::size_t col) { return entry.first < col; });
    return (it != row.end() && it->first == b) ? it->second : 0.0;
}

std::optional<std::size_t> SimRankScores::index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::optional<double> SimRankScores::score(std::string_view a, std::string_view b) const {
    const auto ia = index_of(a);
    const auto ib = index_of(b);
    if (!ia || !ib) return std::nullopt;
    return (*this)(*ia, *ib);
}

namespace {

// Scratch for one row update: a dense accumulator plus the list of touched slots.
struct RowScratch {
    explicit RowScratch(std::size_t n) : value(n, 0.0), mark(n, 0) {}

    void add(std::size_t i, double x) {
        if (!mark[i]) {
            mark[i] = 1;
            touched.push_back(i);
        }
        value[i] += x;
    }
    void sort_touched() { std::sort(touched.begin(), touched.end()); }
    void clear() {
        for (auto i : touched) {
            value[i] = 0.0;
            mark[i] = 0;
        }
        touched.clear();
    }

    std::vector<double> value;
    std::vector<char> mark;
    std::vector<std::size_t> touched;
};

// One Jacobi row: acc(b) = sum_{v in N(b)} sum_{u in N(a)} s(u, v), then scaled.
// `row_of(u, fn)` visits the non-zero entries (v, s) of the previous row u in ascending v.
template <typename RowVisitor, typename Emit>
void simrank_row(const ConceptGraph& g, double decay, std::size_t a, RowScratch& inner, RowScratch& outer,
                 RowVisitor&& row_of, Emit&& emit) {
    const auto& na = g.adjacency[a];
    if (na.empty()) {
        emit(a, 1.0);
        return;
    }
    for (auto u : na) row_of(u, [&](std::size_t v, double s) { inner.add(v, s); });
    inner.sort_touched();
    for (auto v : inner.touched) {
        const double t = inner.value[v];
        for (auto b : g.adjacency[v]) outer.add(b, t);
    }
    outer.sort_touched();
    const double scale_a = decay / static_cast<double>(na.size());
    for (auto b : outer.touched) {
        if (b == a) {
            emit(a, 1.0);
        } else {
            emit(b, scale_a * outer.value[b] / static_cast<double>(g.adjacency[b].size()));
        }
    }
    if (!outer.mark[a]) emit(a, 1.0);
    inner.clear();
    outer.clear();
}

}  // namespace

SimRankScores compute_simrank(const ConceptGraph& graph, const SimRankOptions& options) {
    if (graph.size() == 0) throw ValidationError("simrank: empty graph");
    if (!(options.decay > 0.0 && options.decay < 1.0)) throw ValidationError("simrank: decay must be in (0,1)");
    if (options.max_iter < 1) throw ValidationError("simrank: max_iter must be >= 1");
    if (!(options.tol > 0.0)) throw ValidationError("simrank: tol must be > 0");

    const std::size_t n = graph.size();
    SimRankScores out;
    out.nodes_ = graph.nodes;
    out.decay_ = options.decay;
    out.dense_storage_ = n <= options.dense_threshold;

    if (out.dense_storage_) {
        using Dense = decltype(out.dense_);
        const auto ni = static_cast<Eigen::Index>(n);
        Dense prev = Dense::Identity(ni, ni);
        Dense next(ni, ni);
        for (int it = 0; it < options.max_iter; ++it) {
            next.setZero();
            detail::parallel_blocks(n, options.threads, [&](std::size_t begin, std::size_t end) {
                RowScratch inner(n), outer(n);
                for (std::size_t a = begin; a < end; ++a) {
                    simrank_row(
                        graph, options.decay, a, inner, outer,
                        [&](std::size_t u, auto&& visit) {
                            const double* row = prev.data() + u * n;
                            for (std::size_t v = 0; v < n; ++v) {
                                if (row[v] != 0.0) visit(v, row[v]);
                            }
                        },
                        [&](std::size_t b, double s) { next(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s; });
                }
            });
            // Both triangles are computed; keep the upper one so s(a,b) == s(b,a) exactly.
            next.triangularView<Eigen::StrictlyLower>() = next.transpose().triangularView<Eigen::StrictlyLower>();
            const double residual = (next - prev).cwiseAbs().maxCoeff();
            std::swap(prev, next);
            out.residuals_.push_back(residual);
            if (residual <= options.tol) break;
        }
        out.dense_ = std::move(prev);
        return out;
    }

    using Row = SimRankScores::SparseRow;
    std::vector<Row> prev(n), next(n);
    for (std::size_t a = 0; a < n; ++a) prev[a] = {{a, 1.0}};
    for (int it = 0; it < options.max_iter; ++it) {
        detail::parallel_blocks(n, options.threads, [&](std::size_t begin, std::size_t end) {
            RowScratch inner(n), outer(n);
            for (std::size_t a = begin; a < end; ++a) {
                Row row;
                simrank_row(
                    graph, options.decay, a, inner, outer,
                    [&](std::size_t u, auto&& visit) {
                        for (const auto& [v, s] : prev[u]) visit(v, s);
                    },
                    [&](std::size_t b, double s) { row.emplace_back(b, s); });
                std::sort(row.begin(), row.end());
                next[a] = std::move(row);
            }
        });
        // Mirror the upper triangle into the lower one; the sparsity pattern is symmetric.
        for (std::size_t b = 0; b < n; ++b) {
            for (auto& [a, s] : next[b]) {
                if (a >= b) break;
                const auto& src = next[a];
                auto pos = std::lower_bound(src.begin(), src.end(), b,
                                            [](const auto& e, std::size_t col) { return e.first < col; });
                if (pos != src.end() && pos->first == b) s = pos->second;
            }
        }
        double residual = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            const auto& p = prev[a];
            const auto& q = next[a];
            std::size_t i = 0, j = 0;
            while (i < p.size() || j < q.size()) {
                if (j == q.size() || (i < p.size() && p[i].first < q[j].first)) {
                    residual = std::max(residual, std::abs(p[i++].second));
                } else if (i == p.size() || q[j].first < p[i].first) {
                    residual = std::max(residual, std::abs(q[j++].second));
                } else {
                    residual = std::max(residual, std::abs(q[j++].second - p[i++].second));
                }
            }
        }
        std::swap(prev, next);
        out.residuals_.push_back(residual);
        if (residual <= options.tol) break;
    }
    out.sparse_ = std::move(prev);
    return out;
}

SimRankWeights SimRankWeights::uniform(const NeighborSets& neighbors) {
    auto side = [](const std::vector<std::vector<std::size_t>>& sets) {
        std::vector<std::vector<Entry>> out(sets.size());
        for (std::size_t i = 0; i < sets.size(); ++i) {
            for (auto k : sets[i]) out[i].push_back({k, 1.0 / static_cast<double>(sets[i].size())});
        }
        return out;
    };
    return {side(neighbors.tasks), side(neighbors.methods)};
}

namespace {

std::vector<std::vector<SimRankWeights::Entry>> weigh_side(const SimRankScores& scores,
                                                           const std::vector<std::vector<std::size_t>>& sets,
                                                           const std::vector<std::string>& ids) {
    auto node = [&](std::size_t i) {
        const auto idx = scores.index_of(ids[i]);
        if (!idx) throw ConsistencyError("concept '" + ids[i] + "' has no SimRank scores");
        return *idx;
    };

    std::vector<std::vector<SimRankWeights::Entry>> out(sets.size());
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].empty()) continue;
        const auto self = node(i);
        double total = 0.0;
        for (auto k : sets[i]) {
            const double raw = scores(self, node(k));
            out[i].push_back({k, raw});
            total += raw;
        }
        for (auto& e : out[i]) {
            e.weight = total > 0.0 ? e.weight / total : 1.0 / static_cast<double>(sets[i].size());
        }
    }
    return out;
}

}  // namespace

SimRankWeights derive_weights(const SimRankScores& scores, const NeighborSets& neighbors,
                              const RelationMatrix& matrix) {
    if (neighbors.tasks.size() != matrix.rows() || neighbors.methods.size() != matrix.cols()) {
        throw ConsistencyError("neighbor sets do not match the relation matrix");
    }
    return {weigh_side(scores, neighbors.tasks, matrix.task_ids()),
            weigh_side(scores, neighbors.methods, matrix.method_ids())};
}

void write_weights(std::ostream& out, const SimRankWeights& weights, const RelationMatrix& matrix) {
    const auto precision = out.precision(17);
    auto dump = [&](const auto& side, const std::vector<std::string>& ids) {
        for (std::size_t i = 0; i < side.size(); ++i) {
            for (const auto& e : side[i]) out << ids[i] << '\t' << ids[e.neighbor] << '\t' << e.weight << '\n';
        }
    };
    dump(weights.tasks, matrix.task_ids());
    dump(weights.methods, matrix.method_ids());
    out.precision(precision);
}

}  // namespace amrec
