#include "amrec/recommend.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "amrec/error.hpp"

namespace amrec {

std::vector<double> score_task(const FactorModel& model, std::size_t task) {
    if (task >= static_cast<std::size_t>(model.tasks.rows())) {
        throw ColdStartError("task index " + std::to_string(task) + " has no latent vector");
    }
    const Eigen::VectorXd s = model.methods * model.tasks.row(static_cast<Eigen::Index>(task)).transpose();
    return {s.data(), s.data() + s.size()};
}

std::vector<double> score_task(const FactorModel& model, const RelationMatrix& R, std::string_view task_id) {
    const auto idx = R.task_index(task_id);
    if (!idx) throw ColdStartError("task '" + std::string(task_id) + "' did not appear in training");
    return score_task(model, *idx);
}

std::string FactorScorer::name() const { return std::string(to_string(model_.hp.variant)); }

RankedList top_n(std::span<const double> scores, std::span<const std::size_t> exclude, std::size_t N) {
    if (N == 0) throw ValidationError("top_n: N must be >= 1");
    std::vector<char> excluded(scores.size(), 0);
    for (auto j : exclude) {
        if (j < excluded.size()) excluded[j] = 1;
    }

    std::vector<RankedItem> candidates;
    candidates.reserve(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
        if (!excluded[j]) candidates.push_back({j, scores[j]});
    }
    const auto better = [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.method < b.method;
    };
    const std::size_t keep = std::min(N, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep), candidates.end(),
                      better);
    candidates.resize(keep);

    RankedList list;
    list.items = std::move(candidates);
    list.truncation = N;
    return list;
}

RankedList recommend(const Scorer& scorer, const RelationMatrix& train, std::size_t task, std::size_t N) {
    if (task >= train.rows()) throw ColdStartError("task index " + std::to_string(task) + " is not a training task");
    const auto scores = scorer.score(task);
    auto list = top_n(scores, train.methods_of(task), N);
    list.task = train.task_ids()[task];
    return list;
}

void write_recommendations(std::ostream& out, std::span<const RankedList> lists, const RelationMatrix& train) {
    char buf[32];
    for (const auto& list : lists) {
        for (std::size_t r = 0; r < list.items.size(); ++r) {
            std::snprintf(buf, sizeof buf, "%.17g", list.items[r].score);
            out << list.task << '\t' << r + 1 << '\t' << train.method_ids()[list.items[r].method] << '\t' << buf
                << '\n';
        }
    }
}

}  // namespace amrec
