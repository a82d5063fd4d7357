#pragma once

// Precision at top N over the held-out TaskMethod relations.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amrec/corpus.hpp"
#include "amrec/graph.hpp"
#include "amrec/recommend.hpp"

namespace amrec {

// Macro: mean over tasks of hits/N. Micro: total hits over total returned items.
enum class Averaging { Macro, Micro };

struct EvalOptions {
    std::vector<std::size_t> ns{10, 30, 50};
    Averaging averaging = Averaging::Macro;
};

// |top-N of ranked ∩ truth| / N. `truth` must be sorted. Throws ValidationError when N == 0.
double precision_at_n(const RankedList& ranked, std::span<const std::size_t> truth, std::size_t N);

// One evaluable test task: its training row and its held-out methods known to training.
struct TestTask {
    std::size_t task;
    std::vector<std::size_t> truth;  // sorted method indices
};

struct TestSet {
    std::vector<TestTask> tasks;  // ascending task index
    std::size_t cold_start_tasks = 0;
    std::size_t cold_start_relations = 0;
};

// Tasks absent from training, and tasks whose held-out methods are all absent
// from training, are counted as cold start rather than evaluated.
TestSet build_test_set(const SplitDataset& ds, const RelationMatrix& train);

struct MethodEval {
    std::string name;
    std::vector<double> precision_pct;  // parallel to EvalOptions::ns, in [0, 100]
};

struct EvalReport {
    std::vector<std::size_t> ns;
    Averaging averaging = Averaging::Macro;
    std::vector<MethodEval> rows;
    std::size_t evaluated_task_count = 0;
    std::size_t cold_start_task_count = 0;
    std::size_t cold_start_relation_count = 0;
    std::vector<std::pair<std::string, std::string>> config;
};

// Throws ValidationError("no evaluable test tasks") when nothing can be scored.
MethodEval evaluate(const Scorer& scorer, const RelationMatrix& train, const TestSet& tests,
                    const EvalOptions& options = {});

// Evaluates each scorer over the same test set and collects one row per scorer.
EvalReport evaluate(std::span<const Scorer* const> scorers, const SplitDataset& ds, const RelationMatrix& train,
                    const EvalOptions& options = {});

// Aligned table (rows = methods, columns = P@N) then a key=value block.
void render_report(std::ostream& out, const EvalReport& report);

}  // namespace amrec
