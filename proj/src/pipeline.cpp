#include "amrec/pipeline.hpp"

#include <fstream>
#include <memory>

#include "amrec/baseline_cf.hpp"
#include "amrec/error.hpp"

namespace amrec {

void write_split(const std::filesystem::path& dir, const SplitDataset& ds) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) throw ValidationError("cannot write " + (dir / name).string());
        return out;
    };
    auto train = open("train.tsv");
    write_relations(train, ds.train);
    auto test = open("test.tsv");
    write_relations(test, ds.test);
    auto manifest = open("manifest.txt");
    write_manifest(manifest, ds);
}

SplitDataset load_split(const std::filesystem::path& concepts_path, const std::filesystem::path& dir,
                        Strictness strictness) {
    auto concepts = load_concepts(concepts_path).table;
    auto train = load_relations(dir / "train.tsv", concepts, strictness).records;
    auto test = load_relations(dir / "test.tsv", concepts, strictness).records;
    std::ifstream in(dir / "manifest.txt");
    if (!in) throw ValidationError("cannot open " + (dir / "manifest.txt").string());
    const auto manifest = read_manifest(in, (dir / "manifest.txt").string());
    if (manifest.train_records != train.size() || manifest.test_records != test.size()) {
        throw ValidationError("split manifest record counts disagree with train.tsv/test.tsv in " + dir.string());
    }
    return assemble_split(std::move(concepts), std::move(train), std::move(test), manifest.cutoff_year,
                          manifest.removed_duplicates);
}

TrainingContext make_context(const SplitDataset& ds, GraphSubstrate substrate) {
    TrainingContext ctx;
    ctx.matrix = build_matrix(ds.train);
    ctx.neighbors = build_neighbor_sets(ds.train, ctx.matrix);
    ctx.graph = build_concept_graph(ds.train, substrate);
    return ctx;
}

SimRankWeights relation_weights(const TrainingContext& ctx, const SimRankOptions& options) {
    const auto scores = compute_simrank(ctx.graph, options);
    return derive_weights(scores, ctx.neighbors, ctx.matrix);
}

EvalReport compare_methods(const SplitDataset& ds, const Hyperparams& base, std::span<const Variant> variants,
                           const SimRankOptions& simrank, const EvalOptions& eval, GraphSubstrate substrate) {
    const auto ctx = make_context(ds, substrate);
    SimRankWeights weights;
    for (auto v : variants) {
        if (v != Variant::MF) {
            weights = relation_weights(ctx, simrank);
            break;
        }
    }

    const auto table = build_similarity(ctx.matrix);
    std::vector<FactorModel> models;
    models.reserve(variants.size());
    for (auto v : variants) {
        auto hp = base;
        hp.variant = v;
        models.push_back(train(ctx.matrix, weights, hp));
    }

    std::vector<std::unique_ptr<Scorer>> owned;
    owned.push_back(std::make_unique<CfScorer>(table, ctx.matrix));
    for (const auto& m : models) owned.push_back(std::make_unique<FactorScorer>(m));
    std::vector<const Scorer*> scorers;
    for (const auto& s : owned) scorers.push_back(s.get());
    return evaluate(scorers, ds, ctx.matrix, eval);
}

}  // namespace amrec
