#pragma once

// Seeded synthetic corpora with planted block structure.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "amrec/corpus.hpp"

namespace amrec {

struct SynthConfig {
    std::size_t num_tasks = 200;
    std::size_t num_methods = 400;
    std::size_t num_blocks = 8;
    double p_in = 0.15;
    double p_out = 0.005;
    double p_rel_in = 0.1;
    double p_rel_out = 0.001;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 7;
    int cutoff_year = 2008;

    // Throws ValidationError.
    void validate() const;
};

// Counts the generator tracks while sampling, independent of the corpus module.
struct SynthBookkeeping {
    std::vector<std::size_t> task_block;
    std::vector<std::size_t> method_block;
    std::size_t train_pairs = 0;
    std::size_t test_pairs = 0;
    std::size_t task_task = 0;
    std::size_t method_method = 0;
    std::size_t within_block_test = 0;
    std::size_t cross_block_test = 0;
    std::size_t train_tasks = 0;    // tasks touching a training relation of any kind
    std::size_t train_methods = 0;
    std::size_t test_tasks = 0;
    std::size_t test_methods = 0;
};

struct SynthCorpus {
    ConceptTable concepts;
    std::vector<RelationRecord> relations;
    SynthBookkeeping book;
};

// Throws ValidationError when the sample has no training TaskMethod edge.
SynthCorpus generate(const SynthConfig& cfg);

// key=value lines, keys named like the SynthConfig fields; '#' comments.
SynthConfig read_synth_config(std::istream& in, const std::string& source = "<stream>");
void write_synth_config(std::ostream& out, const SynthConfig& cfg);

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& concepts_path,
                  const std::filesystem::path& relations_path);

}  // namespace amrec
