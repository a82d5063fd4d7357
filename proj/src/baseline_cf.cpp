#include "amrec/baseline_cf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amrec/error.hpp"

namespace amrec {

double ItemSimilarityTable::operator()(std::size_t a, std::size_t b) const {
    const auto& r = rows_[a];
    auto it = std::lower_bound(r.begin(), r.end(), b, [](const auto& e, std::size_t col) { return e.first < col; });
    return (it != r.end() && it->first == b) ? it->second : 0.0;
}

ItemSimilarityTable build_similarity(const RelationMatrix& R, double prune_below) {
    if (R.nnz() == 0) throw ValidationError("no training interactions");
    const std::size_t n = R.cols();
    std::vector<ItemSimilarityTable::Row> rows(n);
    std::vector<std::size_t> counts(n, 0);
    std::vector<std::size_t> touched;

    for (std::size_t j = 0; j < n; ++j) {
        for (auto t : R.tasks_of(j)) {
            for (auto other : R.methods_of(t)) {
                if (counts[other]++ == 0) touched.push_back(other);
            }
        }
        std::sort(touched.begin(), touched.end());
        const double dj = static_cast<double>(R.tasks_of(j).size());
        for (auto other : touched) {
            const double sim = other == j ? 1.0
                                          : static_cast<double>(counts[other]) /
                                                (std::sqrt(dj) * std::sqrt(static_cast<double>(R.tasks_of(other).size())));
            if (other == j || sim >= prune_below) rows[j].emplace_back(other, sim);
            counts[other] = 0;
        }
        touched.clear();
    }
    return ItemSimilarityTable(std::move(rows));
}

std::vector<double> cf_aggregate(const ItemSimilarityTable& table, std::span<const std::size_t> methods) {
    std::vector<double> scores(table.size(), 0.0);
    for (auto m : methods) {
        for (const auto& [j, s] : table.row(m)) scores[j] += s;
    }
    return scores;
}

std::vector<double> cf_score(const ItemSimilarityTable& table, const RelationMatrix& R, std::size_t task) {
    if (task >= R.rows()) throw ColdStartError("task index " + std::to_string(task) + " has no training methods");
    const auto linked = R.methods_of(task);
    auto scores = cf_aggregate(table, linked);
    for (auto m : linked) scores[m] = -std::numeric_limits<double>::infinity();
    return scores;
}

}  // namespace amrec
