#include "amrec/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <string_view>

#include "amrec/error.hpp"
#include "text_util.hpp"

namespace amrec {

void SynthConfig::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (num_tasks == 0 || num_methods == 0 || num_blocks == 0) {
        throw ValidationError("synth: task, method and block counts must be positive");
    }
    if (!prob(p_in) || !prob(p_out) || !prob(p_rel_in) || !prob(p_rel_out)) {
        throw ValidationError("synth: probabilities must lie in [0, 1]");
    }
    if (!(p_in > p_out)) throw ValidationError("synth: p_in must exceed p_out");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw ValidationError("synth: holdout_fraction must lie in (0, 1)");
    }
}

namespace {

std::string make_id(char prefix, std::size_t i, std::size_t count) {
    int width = 4;
    for (std::size_t c = count; c >= 10000; c /= 10) ++width;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
    return buf;
}

}  // namespace

SynthCorpus generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    auto block_of = [&] {
        return std::min(static_cast<std::size_t>(uniform() * static_cast<double>(cfg.num_blocks)), cfg.num_blocks - 1);
    };

    SynthCorpus out;
    auto& book = out.book;
    std::vector<std::string> task_ids, method_ids;
    for (std::size_t t = 0; t < cfg.num_tasks; ++t) {
        book.task_block.push_back(block_of());
        task_ids.push_back(make_id('t', t, cfg.num_tasks));
        out.concepts.insert({task_ids.back(), ConceptKind::Task, "synthetic task " + std::to_string(t),
                             cfg.cutoff_year});
    }
    for (std::size_t m = 0; m < cfg.num_methods; ++m) {
        book.method_block.push_back(block_of());
        method_ids.push_back(make_id('m', m, cfg.num_methods));
        out.concepts.insert({method_ids.back(), ConceptKind::Method, "synthetic method " + std::to_string(m),
                             cfg.cutoff_year});
    }

    std::vector<char> task_train(cfg.num_tasks, 0), task_test(cfg.num_tasks, 0);
    std::vector<char> method_train(cfg.num_methods, 0), method_test(cfg.num_methods, 0);
    std::size_t paper = 0;
    auto paper_id = [&] { return "syn" + std::to_string(paper++); };

    for (std::size_t t = 0; t < cfg.num_tasks; ++t) {
        for (std::size_t m = 0; m < cfg.num_methods; ++m) {
            const bool same = book.task_block[t] == book.method_block[m];
            if (uniform() >= (same ? cfg.p_in : cfg.p_out)) continue;
            const bool test = uniform() < cfg.holdout_fraction;
            out.relations.push_back({task_ids[t], method_ids[m], RelationKind::TaskMethod,
                                     test ? cfg.cutoff_year + 1 : cfg.cutoff_year, paper_id()});
            if (test) {
                ++book.test_pairs;
                ++(same ? book.within_block_test : book.cross_block_test);
                task_test[t] = method_test[m] = 1;
            } else {
                ++book.train_pairs;
                task_train[t] = method_train[m] = 1;
            }
        }
    }
    if (book.train_pairs == 0) throw ValidationError("synth: configuration produced no training edges");

    for (std::size_t a = 0; a < cfg.num_tasks; ++a) {
        for (std::size_t b = a + 1; b < cfg.num_tasks; ++b) {
            const bool same = book.task_block[a] == book.task_block[b];
            if (uniform() >= (same ? cfg.p_rel_in : cfg.p_rel_out)) continue;
            out.relations.push_back({task_ids[a], task_ids[b], RelationKind::TaskTask, cfg.cutoff_year, paper_id()});
            ++book.task_task;
            task_train[a] = task_train[b] = 1;
        }
    }
    for (std::size_t a = 0; a < cfg.num_methods; ++a) {
        for (std::size_t b = a + 1; b < cfg.num_methods; ++b) {
            const bool same = book.method_block[a] == book.method_block[b];
            if (uniform() >= (same ? cfg.p_rel_in : cfg.p_rel_out)) continue;
            out.relations.push_back(
                {method_ids[a], method_ids[b], RelationKind::MethodMethod, cfg.cutoff_year, paper_id()});
            ++book.method_method;
            method_train[a] = method_train[b] = 1;
        }
    }

    for (char c : task_train) book.train_tasks += c;
    for (char c : task_test) book.test_tasks += c;
    for (char c : method_train) book.train_methods += c;
    for (char c : method_test) book.test_methods += c;
    return out;
}

SynthConfig read_synth_config(std::istream& in, const std::string& source) {
    SynthConfig cfg;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::strip_cr(raw);
        if (detail::is_skippable(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
        const auto key = line.substr(0, eq);
        const auto value = line.substr(eq + 1);

        auto as_size = [&](std::size_t& dst) {
            const auto v = detail::parse_int<std::size_t>(value);
            if (!v) throw ParseError(source, line_no, "bad integer for " + std::string(key));
            dst = *v;
        };
        auto as_real = [&](double& dst) {
            const auto v = detail::parse_double(value);
            if (!v) throw ParseError(source, line_no, "bad number for " + std::string(key));
            dst = *v;
        };

        if (key == "num_tasks") as_size(cfg.num_tasks);
        else if (key == "num_methods") as_size(cfg.num_methods);
        else if (key == "num_blocks") as_size(cfg.num_blocks);
        else if (key == "p_in") as_real(cfg.p_in);
        else if (key == "p_out") as_real(cfg.p_out);
        else if (key == "p_rel_in") as_real(cfg.p_rel_in);
        else if (key == "p_rel_out") as_real(cfg.p_rel_out);
        else if (key == "holdout_fraction") as_real(cfg.holdout_fraction);
        else if (key == "seed") {
            const auto v = detail::parse_int<std::uint64_t>(value);
            if (!v) throw ParseError(source, line_no, "bad seed");
            cfg.seed = *v;
        } else if (key == "cutoff_year") {
            const auto v = detail::parse_int<int>(value);
            if (!v) throw ParseError(source, line_no, "bad cutoff_year");
            cfg.cutoff_year = *v;
        } else {
            throw ParseError(source, line_no, "unknown key '" + std::string(key) + "'");
        }
    }
    return cfg;
}

void write_synth_config(std::ostream& out, const SynthConfig& cfg) {
    out << "num_tasks=" << cfg.num_tasks << '\n'
        << "num_methods=" << cfg.num_methods << '\n'
        << "num_blocks=" << cfg.num_blocks << '\n'
        << "p_in=" << cfg.p_in << '\n'
        << "p_out=" << cfg.p_out << '\n'
        << "p_rel_in=" << cfg.p_rel_in << '\n'
        << "p_rel_out=" << cfg.p_rel_out << '\n'
        << "holdout_fraction=" << cfg.holdout_fraction << '\n'
        << "seed=" << cfg.seed << '\n'
        << "cutoff_year=" << cfg.cutoff_year << '\n';
}

void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& concepts_path,
                  const std::filesystem::path& relations_path) {
    std::ofstream c(concepts_path);
    if (!c) throw ValidationError("cannot write " + concepts_path.string());
    c << "# id\tkind\tsurface\tfirst_year\n";
    write_concepts(c, corpus.concepts);
    std::ofstream r(relations_path);
    if (!r) throw ValidationError("cannot write " + relations_path.string());
    r << "# src\tdst\trel_kind\tyear\tpaper_id\n";
    write_relations(r, corpus.relations);
}

}  // namespace amrec
