#pragma once

// Ranked method lists per task, from any trained scorer.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "amrec/baseline_cf.hpp"
#include "amrec/factor.hpp"
#include "amrec/graph.hpp"

namespace amrec {

// Scores every method for a training task. Implementations are immutable
// after construction and safe to call concurrently.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::string name() const = 0;
    virtual std::size_t num_tasks() const = 0;
    virtual std::size_t num_methods() const = 0;
    // Throws ColdStartError for a task index without a training row.
    virtual std::vector<double> score(std::size_t task) const = 0;
};

// score(j) = T_task . M_j
std::vector<double> score_task(const FactorModel& model, std::size_t task);
// Looks the task up by id; throws ColdStartError when it did not appear in training.
std::vector<double> score_task(const FactorModel& model, const RelationMatrix& R, std::string_view task_id);

class FactorScorer final : public Scorer {
public:
    explicit FactorScorer(const FactorModel& model) : model_(model) {}
    std::string name() const override;
    std::size_t num_tasks() const override { return static_cast<std::size_t>(model_.tasks.rows()); }
    std::size_t num_methods() const override { return static_cast<std::size_t>(model_.methods.rows()); }
    std::vector<double> score(std::size_t task) const override { return score_task(model_, task); }

private:
    const FactorModel& model_;
};

class CfScorer final : public Scorer {
public:
    CfScorer(const ItemSimilarityTable& table, const RelationMatrix& R) : table_(table), R_(R) {}
    std::string name() const override { return "CF"; }
    std::size_t num_tasks() const override { return R_.rows(); }
    std::size_t num_methods() const override { return R_.cols(); }
    std::vector<double> score(std::size_t task) const override { return cf_score(table_, R_, task); }

private:
    const ItemSimilarityTable& table_;
    const RelationMatrix& R_;
};

struct RankedItem {
    std::size_t method;
    double score;

    bool operator==(const RankedItem&) const = default;
};

// Ordered by score descending, then method index ascending (index order is id order).
struct RankedList {
    std::string task;
    std::vector<RankedItem> items;
    std::size_t truncation = 0;
};

// The N best non-excluded methods. Throws ValidationError when N == 0.
RankedList top_n(std::span<const double> scores, std::span<const std::size_t> exclude, std::size_t N);

// Ranks methods for a training task, excluding its training methods.
RankedList recommend(const Scorer& scorer, const RelationMatrix& train, std::size_t task, std::size_t N);

// `task_id<TAB>rank<TAB>method_id<TAB>score`, rank starting at 1.
void write_recommendations(std::ostream& out, std::span<const RankedList> lists, const RelationMatrix& train);

}  // namespace amrec
