#pragma once

// Concept and relation ingestion plus the temporal train/test split.
//
// File formats (UTF-8, tab separated, '#' starts a comment line):
//   concepts:  id  kind  surface  first_year        kind in {Task, Method}
//   relations: src dst   rel_kind year  paper_id    rel_kind in {TaskMethod, TaskTask, MethodMethod}

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace amrec {

enum class ConceptKind { Task, Method };
enum class RelationKind { TaskMethod, TaskTask, MethodMethod };

std::string_view to_string(ConceptKind kind);
std::string_view to_string(RelationKind kind);
std::optional<ConceptKind> parse_concept_kind(std::string_view token);
std::optional<RelationKind> parse_relation_kind(std::string_view token);

struct ConceptRecord {
    std::string id;
    ConceptKind kind = ConceptKind::Task;
    std::string surface;
    int first_year = 0;

    bool operator==(const ConceptRecord&) const = default;
};

// Registry of concepts keyed by opaque id. Keeps insertion order.
class ConceptTable {
public:
    enum class InsertResult { Inserted, CollapsedDuplicate };

    // A repeated id keeps the earliest first_year. Throws ValidationError when
    // the repeated id disagrees on kind.
    InsertResult insert(ConceptRecord record);

    const ConceptRecord* find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const std::vector<ConceptRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    bool operator==(const ConceptTable& other) const { return records_ == other.records_; }

private:
    std::vector<ConceptRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct RelationRecord {
    std::string src;
    std::string dst;
    RelationKind kind = RelationKind::TaskMethod;
    int year = 0;
    std::string paper_id;

    bool operator==(const RelationRecord&) const = default;
};

// A non-fatal finding attached to an input line.
struct Diagnostic {
    std::size_t line = 0;
    std::string message;
};

struct ConceptLoad {
    ConceptTable table;
    std::vector<Diagnostic> warnings;
};

enum class Strictness { Strict, Lenient };

struct RelationLoad {
    std::vector<RelationRecord> records;
    std::vector<Diagnostic> warnings;  // collapsed duplicates
    std::vector<Diagnostic> rejected;  // lines dropped in lenient mode
};

ConceptLoad read_concepts(std::istream& in, const std::string& source = "<stream>");
ConceptLoad load_concepts(const std::filesystem::path& path);

// TaskMethod records are stored task-first whatever the file order. Records
// that fail endpoint validation throw in Strict mode and are listed in
// `rejected` in Lenient mode. Malformed lines always throw ParseError.
RelationLoad read_relations(std::istream& in, const ConceptTable& concepts,
                            Strictness strictness = Strictness::Strict,
                            const std::string& source = "<stream>");
RelationLoad load_relations(const std::filesystem::path& path, const ConceptTable& concepts,
                            Strictness strictness = Strictness::Strict);

void write_concepts(std::ostream& out, const ConceptTable& table);
void write_relations(std::ostream& out, std::span<const RelationRecord> records);

struct SplitDataset {
    int cutoff_year = 0;
    ConceptTable concepts;
    std::vector<RelationRecord> train;
    std::vector<RelationRecord> test;
    // Parallel to `test`: a TaskMethod record whose task or method has no
    // training TaskMethod relation (hence no latent vector).
    std::vector<bool> test_cold_start;
    std::size_t removed_duplicates = 0;
};

// train: year <= cutoff. test: year > cutoff, minus TaskMethod pairs already in train.
SplitDataset temporal_split(std::span<const RelationRecord> relations, int cutoff_year,
                            ConceptTable concepts = {});

// Rebuilds a dataset from already split record lists (recomputes cold-start flags).
SplitDataset assemble_split(ConceptTable concepts, std::vector<RelationRecord> train,
                            std::vector<RelationRecord> test, int cutoff_year,
                            std::size_t removed_duplicates);

struct SideStats {
    std::size_t tasks = 0;
    std::size_t methods = 0;
    std::size_t task_method_pairs = 0;
    std::size_t task_task = 0;
    std::size_t method_method = 0;

    bool operator==(const SideStats&) const = default;
};

struct DatasetStats {
    SideStats train;
    SideStats test;
    std::size_t test_concepts_unseen_in_train = 0;
    std::size_t cold_start_test_relations = 0;
    std::size_t removed_duplicates = 0;
};

// Concepts are counted when they occur in at least one relation of that side.
DatasetStats dataset_stats(const SplitDataset& ds);

struct SplitManifest {
    int cutoff_year = 0;
    std::size_t train_records = 0;
    std::size_t test_records = 0;
    std::size_t removed_duplicates = 0;
    std::size_t cold_start_test_relations = 0;
};

void write_manifest(std::ostream& out, const SplitDataset& ds);
SplitManifest read_manifest(std::istream& in, const std::string& source = "<stream>");

}  // namespace amrec
