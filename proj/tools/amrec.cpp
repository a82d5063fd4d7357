// amrec: synth -> split -> train -> recommend / evaluate, composed via files.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amrec/baseline_cf.hpp"
#include "amrec/corpus.hpp"
#include "amrec/error.hpp"
#include "amrec/eval.hpp"
#include "amrec/factor.hpp"
#include "amrec/pipeline.hpp"
#include "amrec/recommend.hpp"
#include "amrec/simrank.hpp"
#include "amrec/synth.hpp"

namespace fs = std::filesystem;
using namespace amrec;

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

FactorModel read_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open model file " + path.string());
    return load_model(in, path.string());
}

void check_model_fits(const FactorModel& model, const RelationMatrix& R, const fs::path& path) {
    if (static_cast<std::size_t>(model.tasks.rows()) != R.rows() ||
        static_cast<std::size_t>(model.methods.rows()) != R.cols()) {
        throw ValidationError("model " + path.string() + " (" + std::to_string(model.tasks.rows()) + "x" +
                              std::to_string(model.methods.rows()) + ") does not match the split's training matrix (" +
                              std::to_string(R.rows()) + "x" + std::to_string(R.cols()) + ")");
    }
}

struct SynthArgs {
    SynthConfig cfg;
    std::string config_file;
    fs::path output;
};

struct SplitArgs {
    fs::path concepts, relations, output;
    int cutoff = 2008;
    bool lenient = false;
};

struct TrainArgs {
    fs::path concepts, split, output, weights_dump;
    std::string variant = "mf-trr";
    std::string update_mode = "gauss-seidel";
    std::string substrate = "full";
    Hyperparams hp;
    SimRankOptions simrank;
};

struct ScoreArgs {
    fs::path concepts, split, output;
    std::vector<std::string> models;
    bool cf = false;
    std::vector<std::size_t> ns{10, 30, 50};
    std::string averaging = "macro";
    std::vector<std::string> tasks;
};

struct StatsArgs {
    fs::path concepts, split;
};

int run_synth(const SynthArgs& a, const CLI::App& sub) {
    SynthConfig cfg = a.cfg;
    if (!a.config_file.empty()) {
        std::ifstream in(a.config_file);
        if (!in) throw ValidationError("cannot open " + a.config_file);
        cfg = read_synth_config(in, a.config_file);
        // Explicit flags override the file.
        if (sub.count("--num-tasks")) cfg.num_tasks = a.cfg.num_tasks;
        if (sub.count("--num-methods")) cfg.num_methods = a.cfg.num_methods;
        if (sub.count("--num-blocks")) cfg.num_blocks = a.cfg.num_blocks;
        if (sub.count("--p-in")) cfg.p_in = a.cfg.p_in;
        if (sub.count("--p-out")) cfg.p_out = a.cfg.p_out;
        if (sub.count("--p-rel-in")) cfg.p_rel_in = a.cfg.p_rel_in;
        if (sub.count("--p-rel-out")) cfg.p_rel_out = a.cfg.p_rel_out;
        if (sub.count("--holdout")) cfg.holdout_fraction = a.cfg.holdout_fraction;
        if (sub.count("--seed")) cfg.seed = a.cfg.seed;
        if (sub.count("--cutoff")) cfg.cutoff_year = a.cfg.cutoff_year;
    }
    const auto corpus = generate(cfg);

    fs::create_directories(a.output);
    write_corpus(corpus, a.output / "concepts.tsv", a.output / "relations.tsv");
    auto cfg_out = open_output(a.output / "synth.cfg");
    write_synth_config(cfg_out, cfg);

    const auto& b = corpus.book;
    std::cout << "synth: " << cfg.num_tasks << " tasks, " << cfg.num_methods << " methods, " << cfg.num_blocks
              << " blocks, seed " << cfg.seed << '\n'
              << "  train pairs " << b.train_pairs << ", test pairs " << b.test_pairs << " (" << b.within_block_test
              << " within-block), task-task " << b.task_task << ", method-method " << b.method_method << '\n'
              << "  wrote " << (a.output / "concepts.tsv").string() << ", " << (a.output / "relations.tsv").string()
              << '\n';
    return 0;
}

int run_split(const SplitArgs& a) {
    const auto strictness = a.lenient ? Strictness::Lenient : Strictness::Strict;
    auto concepts = load_concepts(a.concepts);
    for (const auto& w : concepts.warnings) std::cerr << a.concepts.string() << ':' << w.line << ": " << w.message << '\n';
    auto relations = load_relations(a.relations, concepts.table, strictness);
    for (const auto& w : relations.warnings) std::cerr << a.relations.string() << ':' << w.line << ": " << w.message << '\n';
    for (const auto& r : relations.rejected) {
        std::cerr << a.relations.string() << ':' << r.line << ": rejected: " << r.message << '\n';
    }

    const auto ds = temporal_split(relations.records, a.cutoff, std::move(concepts.table));
    write_split(a.output, ds);
    std::ostringstream manifest;
    write_manifest(manifest, ds);
    std::cout << manifest.str();
    return 0;
}

int run_stats(const StatsArgs& a) {
    const auto ds = load_split(a.concepts, a.split);
    const auto st = dataset_stats(ds);
    std::cout << "cutoff_year=" << ds.cutoff_year << '\n'
              << "train_tasks=" << st.train.tasks << "\ntrain_methods=" << st.train.methods
              << "\ntrain_pairs=" << st.train.task_method_pairs << "\ntrain_task_task=" << st.train.task_task
              << "\ntrain_method_method=" << st.train.method_method << '\n'
              << "test_tasks=" << st.test.tasks << "\ntest_methods=" << st.test.methods
              << "\ntest_pairs=" << st.test.task_method_pairs << '\n'
              << "test_concepts_unseen_in_train=" << st.test_concepts_unseen_in_train << '\n'
              << "cold_start_test_relations=" << st.cold_start_test_relations << '\n'
              << "removed_duplicates=" << st.removed_duplicates << '\n';
    return 0;
}

int run_train(TrainArgs a) {
    const auto variant = parse_variant(a.variant);
    if (!variant) throw ValidationError("unknown variant '" + a.variant + "' (mf | mf-trr | mf-mrr)");
    const auto mode = parse_update_mode(a.update_mode);
    if (!mode) throw ValidationError("unknown update mode '" + a.update_mode + "' (gauss-seidel | jacobi)");
    if (a.substrate != "full" && a.substrate != "bipartite") {
        throw ValidationError("unknown substrate '" + a.substrate + "' (full | bipartite)");
    }
    a.hp.variant = *variant;
    a.hp.update_mode = *mode;
    a.simrank.threads = a.hp.threads;
    a.hp.validate();

    const auto ds = load_split(a.concepts, a.split);
    const auto ctx = make_context(ds, a.substrate == "full" ? GraphSubstrate::Full : GraphSubstrate::Bipartite);
    SimRankWeights weights;
    if (*variant != Variant::MF) weights = relation_weights(ctx, a.simrank);
    const auto model = train(ctx.matrix, weights, a.hp);

    auto out = open_output(a.output);
    save_model(out, model);
    if (!a.weights_dump.empty()) {
        auto w = open_output(a.weights_dump);
        write_weights(w, weights, ctx.matrix);
    }

    const auto& trace = model.objective_trace;
    std::cout << "train: variant=" << to_string(a.hp.variant) << " k=" << a.hp.k << " lambda_t=" << a.hp.lambda_t
              << " lambda_m=" << a.hp.lambda_m << " beta=" << a.hp.effective_beta() << " w0=" << a.hp.confidence_w0
              << " seed=" << a.hp.seed << '\n'
              << "  matrix " << ctx.matrix.rows() << "x" << ctx.matrix.cols() << ", " << ctx.matrix.nnz()
              << " observed; dropped same-kind relations " << ctx.neighbors.dropped << '\n'
              << "  sweeps " << trace.size() - 1 << ", objective " << fmt(trace.front()) << " -> "
              << fmt(trace.back()) << '\n';
    bool monotone = true;
    for (std::size_t t = 1; t < trace.size(); ++t) {
        std::cout << "  sweep " << t << " objective " << fmt(trace[t]) << '\n';
        if (trace[t] > trace[t - 1] + 1e-10 * (1.0 + std::abs(trace[t - 1]))) monotone = false;
    }
    std::cout << "  objective trace " << (monotone ? "monotone" : "NOT monotone") << '\n';
    return 0;
}

struct LoadedScorers {
    std::vector<FactorModel> models;
    std::unique_ptr<ItemSimilarityTable> table;
    std::vector<std::unique_ptr<Scorer>> owned;
    std::vector<const Scorer*> scorers;
};

LoadedScorers load_scorers(const ScoreArgs& a, const RelationMatrix& R) {
    LoadedScorers s;
    if (a.cf) {
        s.table = std::make_unique<ItemSimilarityTable>(build_similarity(R));
        s.owned.push_back(std::make_unique<CfScorer>(*s.table, R));
    }
    s.models.reserve(a.models.size());
    for (const auto& path : a.models) {
        s.models.push_back(read_model(path));
        check_model_fits(s.models.back(), R, path);
    }
    for (const auto& m : s.models) s.owned.push_back(std::make_unique<FactorScorer>(m));
    if (s.owned.empty()) throw ValidationError("nothing to score: give --model and/or --cf");
    for (const auto& o : s.owned) s.scorers.push_back(o.get());
    return s;
}

int run_recommend(const ScoreArgs& a) {
    if (a.ns.size() != 1) throw ValidationError("recommend takes a single --n");
    const auto ds = load_split(a.concepts, a.split);
    const auto R = build_matrix(ds.train);
    const auto loaded = load_scorers(a, R);
    if (loaded.scorers.size() != 1) throw ValidationError("recommend takes exactly one of --model or --cf");
    const auto& scorer = *loaded.scorers.front();

    std::vector<std::size_t> tasks;
    if (a.tasks.empty()) {
        for (std::size_t t = 0; t < R.rows(); ++t) tasks.push_back(t);
    } else {
        for (const auto& id : a.tasks) {
            const auto idx = R.task_index(id);
            if (!idx) throw ColdStartError("task '" + id + "' did not appear in training");
            tasks.push_back(*idx);
        }
    }
    std::vector<RankedList> lists;
    for (auto t : tasks) lists.push_back(recommend(scorer, R, t, a.ns.front()));

    if (a.output.empty()) {
        write_recommendations(std::cout, lists, R);
    } else {
        auto out = open_output(a.output);
        write_recommendations(out, lists, R);
    }
    return 0;
}

int run_evaluate(const ScoreArgs& a) {
    EvalOptions opts;
    opts.ns = a.ns;
    if (a.averaging == "macro") opts.averaging = Averaging::Macro;
    else if (a.averaging == "micro") opts.averaging = Averaging::Micro;
    else throw ValidationError("unknown averaging '" + a.averaging + "' (macro | micro)");

    const auto ds = load_split(a.concepts, a.split);
    const auto R = build_matrix(ds.train);
    const auto loaded = load_scorers(a, R);
    auto report = evaluate(loaded.scorers, ds, R, opts);

    auto& cfg = report.config;
    cfg.emplace_back("subcommand", "evaluate");
    cfg.emplace_back("concepts", a.concepts.string());
    cfg.emplace_back("split", a.split.string());
    cfg.emplace_back("cutoff_year", std::to_string(ds.cutoff_year));
    cfg.emplace_back("cf", a.cf ? "1" : "0");
    std::string ns;
    for (auto n : a.ns) ns += (ns.empty() ? "" : ",") + std::to_string(n);
    cfg.emplace_back("n", ns);
    for (std::size_t i = 0; i < loaded.models.size(); ++i) {
        const auto& hp = loaded.models[i].hp;
        const std::string key = "model" + std::to_string(i);
        cfg.emplace_back(key + ".path", a.models[i]);
        cfg.emplace_back(key + ".variant", std::string(to_string(hp.variant)));
        cfg.emplace_back(key + ".k", std::to_string(hp.k));
        cfg.emplace_back(key + ".lambda_t", fmt(hp.lambda_t));
        cfg.emplace_back(key + ".lambda_m", fmt(hp.lambda_m));
        cfg.emplace_back(key + ".beta", fmt(hp.beta));
        cfg.emplace_back(key + ".w0", fmt(hp.confidence_w0));
        cfg.emplace_back(key + ".seed", std::to_string(hp.seed));
    }

    std::ostringstream text;
    render_report(text, report);
    std::cout << text.str();
    if (!a.output.empty()) {
        auto out = open_output(a.output);
        out << text.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"amrec: relation-regularized matrix factorization for method recommendation"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic corpus");
    synth_cmd->add_option("--config", synth.config_file, "key=value config file");
    synth_cmd->add_option("--num-tasks", synth.cfg.num_tasks)->capture_default_str();
    synth_cmd->add_option("--num-methods", synth.cfg.num_methods)->capture_default_str();
    synth_cmd->add_option("--num-blocks", synth.cfg.num_blocks)->capture_default_str();
    synth_cmd->add_option("--p-in", synth.cfg.p_in)->capture_default_str();
    synth_cmd->add_option("--p-out", synth.cfg.p_out)->capture_default_str();
    synth_cmd->add_option("--p-rel-in", synth.cfg.p_rel_in)->capture_default_str();
    synth_cmd->add_option("--p-rel-out", synth.cfg.p_rel_out)->capture_default_str();
    synth_cmd->add_option("--holdout", synth.cfg.holdout_fraction)->capture_default_str();
    synth_cmd->add_option("--cutoff", synth.cfg.cutoff_year)->capture_default_str();
    synth_cmd->add_option("--seed", synth.cfg.seed)->capture_default_str();
    synth_cmd->add_option("--output", synth.output, "output directory")->required();

    SplitArgs split;
    auto* split_cmd = app.add_subcommand("split", "temporal train/test split");
    split_cmd->add_option("--concepts", split.concepts)->required();
    split_cmd->add_option("--relations", split.relations)->required();
    split_cmd->add_option("--cutoff", split.cutoff, "last training year")->capture_default_str();
    split_cmd->add_option("--output", split.output, "split directory")->required();
    split_cmd->add_flag("--lenient", split.lenient, "drop invalid relations instead of failing");

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "dataset statistics of a split");
    stats_cmd->add_option("--concepts", stats.concepts)->required();
    stats_cmd->add_option("--split", stats.split)->required();

    TrainArgs tr;
    tr.hp.k = 32;
    auto* train_cmd = app.add_subcommand("train", "train a factor model");
    train_cmd->add_option("--concepts", tr.concepts)->required();
    train_cmd->add_option("--split", tr.split)->required();
    train_cmd->add_option("--variant", tr.variant, "mf | mf-trr | mf-mrr")->capture_default_str();
    train_cmd->add_option("--k", tr.hp.k)->capture_default_str();
    train_cmd->add_option("--lambda-t", tr.hp.lambda_t)->capture_default_str();
    train_cmd->add_option("--lambda-m", tr.hp.lambda_m)->capture_default_str();
    train_cmd->add_option("--beta", tr.hp.beta)->capture_default_str();
    train_cmd->add_option("--w0", tr.hp.confidence_w0, "confidence of unobserved cells")->capture_default_str();
    train_cmd->add_option("--max-sweeps", tr.hp.max_sweeps)->capture_default_str();
    train_cmd->add_option("--rel-tol", tr.hp.rel_tol)->capture_default_str();
    train_cmd->add_option("--seed", tr.hp.seed)->capture_default_str();
    train_cmd->add_option("--threads", tr.hp.threads)->capture_default_str();
    train_cmd->add_option("--update-mode", tr.update_mode, "gauss-seidel | jacobi")->capture_default_str();
    train_cmd->add_option("--simrank-decay", tr.simrank.decay)->capture_default_str();
    train_cmd->add_option("--simrank-iters", tr.simrank.max_iter)->capture_default_str();
    train_cmd->add_option("--simrank-tol", tr.simrank.tol)->capture_default_str();
    train_cmd->add_option("--substrate", tr.substrate, "full | bipartite")->capture_default_str();
    train_cmd->add_option("--weights-dump", tr.weights_dump, "write relation weights here");
    train_cmd->add_option("--output", tr.output, "model file")->required();

    ScoreArgs rec;
    rec.ns = {10};
    auto* rec_cmd = app.add_subcommand("recommend", "ranked method lists for training tasks");
    rec_cmd->add_option("--concepts", rec.concepts)->required();
    rec_cmd->add_option("--split", rec.split)->required();
    rec_cmd->add_option("--model", rec.models, "model file");
    rec_cmd->add_flag("--cf", rec.cf, "use the item-to-item CF baseline");
    rec_cmd->add_option("--task", rec.tasks, "task id (repeatable; default all)");
    rec_cmd->add_option("--n", rec.ns, "list length")->capture_default_str();
    rec_cmd->add_option("--output", rec.output);

    ScoreArgs ev;
    auto* eval_cmd = app.add_subcommand("evaluate", "P@N comparison table");
    eval_cmd->add_option("--concepts", ev.concepts)->required();
    eval_cmd->add_option("--split", ev.split)->required();
    eval_cmd->add_option("--model", ev.models, "model file (repeatable)");
    eval_cmd->add_flag("--cf", ev.cf, "include the item-to-item CF baseline");
    eval_cmd->add_option("--n", ev.ns, "cutoffs, comma separated")->delimiter(',')->capture_default_str();
    eval_cmd->add_option("--averaging", ev.averaging, "macro | micro")->capture_default_str();
    eval_cmd->add_option("--output", ev.output, "report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*synth_cmd) return run_synth(synth, *synth_cmd);
        if (*split_cmd) return run_split(split);
        if (*stats_cmd) return run_stats(stats);
        if (*train_cmd) return run_train(tr);
        if (*rec_cmd) return run_recommend(rec);
        if (*eval_cmd) return run_evaluate(ev);
    } catch (const NumericalError& e) {
        std::cerr << "amrec: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "amrec: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
