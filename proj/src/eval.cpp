#include "amrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>

#include "amrec/error.hpp"

namespace amrec {

namespace {

// Neumaier compensated sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

std::size_t hits_in_top(const RankedList& ranked, std::span<const std::size_t> truth, std::size_t N) {
    std::size_t hits = 0;
    const std::size_t limit = std::min(N, ranked.items.size());
    for (std::size_t r = 0; r < limit; ++r) {
        if (std::binary_search(truth.begin(), truth.end(), ranked.items[r].method)) ++hits;
    }
    return hits;
}

}  // namespace

double precision_at_n(const RankedList& ranked, std::span<const std::size_t> truth, std::size_t N) {
    if (N == 0) throw ValidationError("precision_at_n: N must be >= 1");
    return static_cast<double>(hits_in_top(ranked, truth, N)) / static_cast<double>(N);
}

TestSet build_test_set(const SplitDataset& ds, const RelationMatrix& train) {
    std::map<std::string, std::vector<const RelationRecord*>> by_task;
    for (const auto& r : ds.test) {
        if (r.kind == RelationKind::TaskMethod) by_task[r.src].push_back(&r);
    }

    TestSet set;
    for (const auto& [task_id, records] : by_task) {
        const auto task = train.task_index(task_id);
        if (!task) {
            ++set.cold_start_tasks;
            set.cold_start_relations += records.size();
            continue;
        }
        TestTask tt{*task, {}};
        for (const auto* r : records) {
            if (const auto m = train.method_index(r->dst)) {
                tt.truth.push_back(*m);
            } else {
                ++set.cold_start_relations;
            }
        }
        std::sort(tt.truth.begin(), tt.truth.end());
        tt.truth.erase(std::unique(tt.truth.begin(), tt.truth.end()), tt.truth.end());
        if (tt.truth.empty()) {
            ++set.cold_start_tasks;
            continue;
        }
        set.tasks.push_back(std::move(tt));
    }
    std::sort(set.tasks.begin(), set.tasks.end(), [](const auto& a, const auto& b) { return a.task < b.task; });
    return set;
}

MethodEval evaluate(const Scorer& scorer, const RelationMatrix& train, const TestSet& tests,
                    const EvalOptions& options) {
    if (tests.tasks.empty()) throw ValidationError("no evaluable test tasks");
    if (options.ns.empty()) throw ValidationError("no cutoffs N given");
    if (scorer.num_tasks() != train.rows() || scorer.num_methods() != train.cols()) {
        throw ConsistencyError("scorer '" + scorer.name() + "' was not trained on this relation matrix");
    }
    const std::size_t max_n = *std::max_element(options.ns.begin(), options.ns.end());
    for (auto n : options.ns) {
        if (n == 0) throw ValidationError("N must be >= 1");
    }

    std::vector<CompensatedSum> macro(options.ns.size());
    std::vector<std::size_t> hits(options.ns.size(), 0), returned(options.ns.size(), 0);
    for (const auto& tt : tests.tasks) {
        const auto ranked = recommend(scorer, train, tt.task, max_n);
        for (std::size_t c = 0; c < options.ns.size(); ++c) {
            const auto n = options.ns[c];
            macro[c].add(precision_at_n(ranked, tt.truth, n));
            hits[c] += hits_in_top(ranked, tt.truth, n);
            returned[c] += std::min(n, ranked.items.size());
        }
    }

    MethodEval result{scorer.name(), {}};
    for (std::size_t c = 0; c < options.ns.size(); ++c) {
        double p = 0.0;
        if (options.averaging == Averaging::Macro) {
            p = macro[c].value() / static_cast<double>(tests.tasks.size());
        } else if (returned[c] > 0) {
            p = static_cast<double>(hits[c]) / static_cast<double>(returned[c]);
        }
        result.precision_pct.push_back(100.0 * p);
    }
    return result;
}

EvalReport evaluate(std::span<const Scorer* const> scorers, const SplitDataset& ds, const RelationMatrix& train,
                    const EvalOptions& options) {
    const auto tests = build_test_set(ds, train);
    EvalReport report;
    report.ns = options.ns;
    report.averaging = options.averaging;
    report.evaluated_task_count = tests.tasks.size();
    report.cold_start_task_count = tests.cold_start_tasks;
    report.cold_start_relation_count = tests.cold_start_relations;
    for (const auto* s : scorers) report.rows.push_back(evaluate(*s, train, tests, options));
    return report;
}

void render_report(std::ostream& out, const EvalReport& report) {
    std::size_t name_width = 6;
    for (const auto& row : report.rows) name_width = std::max(name_width, row.name.size());

    out << std::left << std::setw(static_cast<int>(name_width)) << "Method";
    for (auto n : report.ns) out << std::right << std::setw(9) << ("P@" + std::to_string(n));
    out << '\n';
    char buf[32];
    for (const auto& row : report.rows) {
        out << std::left << std::setw(static_cast<int>(name_width)) << row.name;
        for (double p : row.precision_pct) {
            std::snprintf(buf, sizeof buf, "%.2f", p);
            out << std::right << std::setw(9) << buf;
        }
        out << '\n';
    }
    out << std::left;

    out << "\n# key=value\n";
    out << "averaging=" << (report.averaging == Averaging::Macro ? "macro" : "micro") << '\n';
    out << "evaluated_tasks=" << report.evaluated_task_count << '\n';
    out << "cold_start_tasks=" << report.cold_start_task_count << '\n';
    out << "cold_start_relations=" << report.cold_start_relation_count << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t c = 0; c < report.ns.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", row.precision_pct[c]);
            out << "result." << row.name << ".P@" << report.ns[c] << '=' << buf << '\n';
        }
    }
    for (const auto& [key, value] : report.config) out << "config." << key << '=' << value << '\n';
}

}  // namespace amrec
