#pragma once

// Glue shared by the CLI and the experiment harness: split files on disk and
// the ingest -> weights -> train -> evaluate chain.

#include <filesystem>
#include <span>
#include <vector>

#include "amrec/corpus.hpp"
#include "amrec/eval.hpp"
#include "amrec/factor.hpp"
#include "amrec/graph.hpp"
#include "amrec/simrank.hpp"
#include "amrec/synth.hpp"

namespace amrec {

// A split directory holds train.tsv, test.tsv and manifest.txt.
void write_split(const std::filesystem::path& dir, const SplitDataset& ds);
SplitDataset load_split(const std::filesystem::path& concepts_path, const std::filesystem::path& dir,
                        Strictness strictness = Strictness::Strict);

// Training-side structures derived from a split.
struct TrainingContext {
    RelationMatrix matrix;
    NeighborSets neighbors;
    ConceptGraph graph;
};

TrainingContext make_context(const SplitDataset& ds, GraphSubstrate substrate = GraphSubstrate::Full);

SimRankWeights relation_weights(const TrainingContext& ctx, const SimRankOptions& options);

// Trains CF plus one factor model per variant (sharing `base` otherwise) and
// evaluates all of them on the split. Rows: CF first, then `variants` in order.
EvalReport compare_methods(const SplitDataset& ds, const Hyperparams& base, std::span<const Variant> variants,
                           const SimRankOptions& simrank = {}, const EvalOptions& eval = {},
                           GraphSubstrate substrate = GraphSubstrate::Full);

}  // namespace amrec
