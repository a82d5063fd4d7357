#include "amrec/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "amrec/error.hpp"
#include "text_util.hpp"

namespace amrec {

std::string_view to_string(ConceptKind kind) {
    return kind == ConceptKind::Task ? "Task" : "Method";
}

std::string_view to_string(RelationKind kind) {
    switch (kind) {
        case RelationKind::TaskMethod: return "TaskMethod";
        case RelationKind::TaskTask: return "TaskTask";
        case RelationKind::MethodMethod: return "MethodMethod";
    }
    return "?";
}

std::optional<ConceptKind> parse_concept_kind(std::string_view token) {
    if (token == "Task") return ConceptKind::Task;
    if (token == "Method") return ConceptKind::Method;
    return std::nullopt;
}

std::optional<RelationKind> parse_relation_kind(std::string_view token) {
    if (token == "TaskMethod") return RelationKind::TaskMethod;
    if (token == "TaskTask") return RelationKind::TaskTask;
    if (token == "MethodMethod") return RelationKind::MethodMethod;
    return std::nullopt;
}

ConceptTable::InsertResult ConceptTable::insert(ConceptRecord record) {
    if (auto it = index_.find(record.id); it != index_.end()) {
        auto& existing = records_[it->second];
        if (existing.kind != record.kind) {
            throw ValidationError("concept '" + record.id + "' declared as both " +
                                  std::string(to_string(existing.kind)) + " and " +
                                  std::string(to_string(record.kind)));
        }
        if (record.first_year < existing.first_year) {
            existing.first_year = record.first_year;
            existing.surface = std::move(record.surface);
        }
        return InsertResult::CollapsedDuplicate;
    }
    index_.emplace(record.id, records_.size());
    records_.push_back(std::move(record));
    return InsertResult::Inserted;
}

const ConceptRecord* ConceptTable::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &records_[it->second];
}

ConceptLoad read_concepts(std::istream& in, const std::string& source) {
    ConceptLoad result;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::strip_cr(raw);
        if (detail::is_skippable(line)) continue;

        const auto fields = detail::split_tabs(line);
        if (fields.size() != 4) {
            throw ParseError(source, line_no,
                             "expected 4 tab-separated fields, found " + std::to_string(fields.size()));
        }
        if (fields[0].empty()) throw ParseError(source, line_no, "empty concept id");
        const auto year = detail::parse_int<int>(fields[3]);
        if (!year) throw ParseError(source, line_no, "bad year '" + std::string(fields[3]) + "'");
        const auto kind = parse_concept_kind(fields[1]);
        if (!kind) {
            throw ValidationError(source + ":" + std::to_string(line_no) + ": unknown concept kind '" +
                                  std::string(fields[1]) + "'");
        }

        ConceptRecord rec{std::string(fields[0]), *kind, std::string(fields[2]), *year};
        const std::string id = rec.id;
        if (result.table.insert(std::move(rec)) == ConceptTable::InsertResult::CollapsedDuplicate) {
            result.warnings.push_back({line_no, "duplicate concept id '" + id + "' collapsed"});
        }
    }
    return result;
}

ConceptLoad load_concepts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open concepts file " + path.string());
    return read_concepts(in, path.string());
}

namespace {

// Empty string when the record is consistent with the concept table.
std::string endpoint_problem(const RelationRecord& rec, const ConceptTable& concepts) {
    const auto* a = concepts.find(rec.src);
    const auto* b = concepts.find(rec.dst);
    if (!a) return "unknown concept id '" + rec.src + "'";
    if (!b) return "unknown concept id '" + rec.dst + "'";
    if (rec.src == rec.dst) return "self-relation on '" + rec.src + "'";
    bool ok = false;
    switch (rec.kind) {
        case RelationKind::TaskMethod: ok = a->kind != b->kind; break;
        case RelationKind::TaskTask: ok = a->kind == ConceptKind::Task && b->kind == ConceptKind::Task; break;
        case RelationKind::MethodMethod:
            ok = a->kind == ConceptKind::Method && b->kind == ConceptKind::Method;
            break;
    }
    if (!ok) {
        return std::string(to_string(rec.kind)) + " relation between " + std::string(to_string(a->kind)) +
               " '" + rec.src + "' and " + std::string(to_string(b->kind)) + " '" + rec.dst + "'";
    }
    return {};
}

}  // namespace

RelationLoad read_relations(std::istream& in, const ConceptTable& concepts, Strictness strictness,
                            const std::string& source) {
    RelationLoad result;
    using Key = std::tuple<std::string, std::string, RelationKind>;
    std::map<Key, std::size_t> seen;

    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::strip_cr(raw);
        if (detail::is_skippable(line)) continue;

        const auto fields = detail::split_tabs(line);
        if (fields.size() != 5) {
            throw ParseError(source, line_no,
                             "expected 5 tab-separated fields, found " + std::to_string(fields.size()));
        }
        const auto kind = parse_relation_kind(fields[2]);
        if (!kind) throw ParseError(source, line_no, "unknown relation kind '" + std::string(fields[2]) + "'");
        const auto year = detail::parse_int<int>(fields[3]);
        if (!year) throw ParseError(source, line_no, "bad year '" + std::string(fields[3]) + "'");

        RelationRecord rec{std::string(fields[0]), std::string(fields[1]), *kind, *year, std::string(fields[4])};
        if (auto problem = endpoint_problem(rec, concepts); !problem.empty()) {
            if (strictness == Strictness::Strict) {
                throw ValidationError(source + ":" + std::to_string(line_no) + ": " + problem);
            }
            result.rejected.push_back({line_no, std::move(problem)});
            continue;
        }
        if (rec.kind == RelationKind::TaskMethod && concepts.find(rec.src)->kind == ConceptKind::Method) {
            std::swap(rec.src, rec.dst);
        }

        Key key{rec.src, rec.dst, rec.kind};
        if (auto it = seen.find(key); it != seen.end()) {
            auto& kept = result.records[it->second];
            if (rec.year < kept.year) kept = std::move(rec);
            result.warnings.push_back({line_no, "duplicate relation " + std::get<0>(key) + " -> " +
                                                    std::get<1>(key) + " collapsed"});
            continue;
        }
        seen.emplace(std::move(key), result.records.size());
        result.records.push_back(std::move(rec));
    }
    return result;
}

RelationLoad load_relations(const std::filesystem::path& path, const ConceptTable& concepts,
                            Strictness strictness) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open relations file " + path.string());
    return read_relations(in, concepts, strictness, path.string());
}

void write_concepts(std::ostream& out, const ConceptTable& table) {
    for (const auto& c : table.records()) {
        out << c.id << '\t' << to_string(c.kind) << '\t' << c.surface << '\t' << c.first_year << '\n';
    }
}

void write_relations(std::ostream& out, std::span<const RelationRecord> records) {
    for (const auto& r : records) {
        out << r.src << '\t' << r.dst << '\t' << to_string(r.kind) << '\t' << r.year << '\t' << r.paper_id
            << '\n';
    }
}

SplitDataset assemble_split(ConceptTable concepts, std::vector<RelationRecord> train,
                            std::vector<RelationRecord> test, int cutoff_year,
                            std::size_t removed_duplicates) {
    std::set<std::string_view> train_tasks, train_methods;
    for (const auto& r : train) {
        if (r.kind != RelationKind::TaskMethod) continue;
        train_tasks.insert(r.src);
        train_methods.insert(r.dst);
    }

    SplitDataset ds;
    ds.cutoff_year = cutoff_year;
    ds.removed_duplicates = removed_duplicates;
    ds.test_cold_start.reserve(test.size());
    for (const auto& r : test) {
        const bool cold = r.kind == RelationKind::TaskMethod &&
                          (!train_tasks.contains(r.src) || !train_methods.contains(r.dst));
        ds.test_cold_start.push_back(cold);
    }
    ds.concepts = std::move(concepts);
    ds.train = std::move(train);
    ds.test = std::move(test);
    return ds;
}

SplitDataset temporal_split(std::span<const RelationRecord> relations, int cutoff_year, ConceptTable concepts) {
    std::vector<RelationRecord> train, later;
    for (const auto& r : relations) (r.year <= cutoff_year ? train : later).push_back(r);

    std::set<std::pair<std::string_view, std::string_view>> train_pairs;
    for (const auto& r : train) {
        if (r.kind == RelationKind::TaskMethod) train_pairs.emplace(r.src, r.dst);
    }

    std::vector<RelationRecord> test;
    std::size_t removed = 0;
    for (auto& r : later) {
        if (r.kind == RelationKind::TaskMethod && train_pairs.contains({r.src, r.dst})) {
            ++removed;
            continue;
        }
        test.push_back(std::move(r));
    }
    return assemble_split(std::move(concepts), std::move(train), std::move(test), cutoff_year, removed);
}

namespace {

SideStats side_stats(std::span<const RelationRecord> records, const ConceptTable& concepts,
                     std::set<std::string_view>& touched) {
    SideStats s;
    std::set<std::string_view> tasks, methods;
    for (const auto& r : records) {
        switch (r.kind) {
            case RelationKind::TaskMethod: ++s.task_method_pairs; break;
            case RelationKind::TaskTask: ++s.task_task; break;
            case RelationKind::MethodMethod: ++s.method_method; break;
        }
        for (const std::string_view id : {std::string_view(r.src), std::string_view(r.dst)}) {
            touched.insert(id);
            const auto* c = concepts.find(id);
            // Relations without a concept table entry are classified by position.
            const bool is_task = c ? c->kind == ConceptKind::Task
                                   : (r.kind == RelationKind::TaskTask ||
                                      (r.kind == RelationKind::TaskMethod && id == r.src));
            (is_task ? tasks : methods).insert(id);
        }
    }
    s.tasks = tasks.size();
    s.methods = methods.size();
    return s;
}

}  // namespace

DatasetStats dataset_stats(const SplitDataset& ds) {
    DatasetStats st;
    std::set<std::string_view> train_ids, test_ids;
    st.train = side_stats(ds.train, ds.concepts, train_ids);
    st.test = side_stats(ds.test, ds.concepts, test_ids);
    for (auto id : test_ids) {
        if (!train_ids.contains(id)) ++st.test_concepts_unseen_in_train;
    }
    st.cold_start_test_relations =
        static_cast<std::size_t>(std::count(ds.test_cold_start.begin(), ds.test_cold_start.end(), true));
    st.removed_duplicates = ds.removed_duplicates;
    return st;
}

void write_manifest(std::ostream& out, const SplitDataset& ds) {
    const auto st = dataset_stats(ds);
    out << "# amrec split manifest\n"
        << "cutoff_year=" << ds.cutoff_year << '\n'
        << "train_records=" << ds.train.size() << '\n'
        << "train_task_method=" << st.train.task_method_pairs << '\n'
        << "train_task_task=" << st.train.task_task << '\n'
        << "train_method_method=" << st.train.method_method << '\n'
        << "train_tasks=" << st.train.tasks << '\n'
        << "train_methods=" << st.train.methods << '\n'
        << "test_records=" << ds.test.size() << '\n'
        << "test_task_method=" << st.test.task_method_pairs << '\n'
        << "test_task_task=" << st.test.task_task << '\n'
        << "test_method_method=" << st.test.method_method << '\n'
        << "test_tasks=" << st.test.tasks << '\n'
        << "test_methods=" << st.test.methods << '\n'
        << "removed_duplicates=" << ds.removed_duplicates << '\n'
        << "cold_start_test_relations=" << st.cold_start_test_relations << '\n'
        << "test_concepts_unseen_in_train=" << st.test_concepts_unseen_in_train << '\n';
}

SplitManifest read_manifest(std::istream& in, const std::string& source) {
    std::map<std::string, long long, std::less<>> values;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::strip_cr(raw);
        if (detail::is_skippable(line)) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected key=value");
        const auto value = detail::parse_int<long long>(line.substr(eq + 1));
        if (!value) throw ParseError(source, line_no, "non-integer value");
        values[std::string(line.substr(0, eq))] = *value;
    }
    auto get = [&](std::string_view key) -> long long {
        auto it = values.find(key);
        if (it == values.end()) throw ValidationError(source + ": manifest lacks '" + std::string(key) + "'");
        return it->second;
    };
    SplitManifest m;
    m.cutoff_year = static_cast<int>(get("cutoff_year"));
    m.train_records = static_cast<std::size_t>(get("train_records"));
    m.test_records = static_cast<std::size_t>(get("test_records"));
    m.removed_duplicates = static_cast<std::size_t>(get("removed_duplicates"));
    m.cold_start_test_relations = static_cast<std::size_t>(get("cold_start_test_relations"));
    return m;
}

}  // namespace amrec
