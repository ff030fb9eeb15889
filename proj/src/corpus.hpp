#ifndef CONCSE_CORPUS_HPP
#define CONCSE_CORPUS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "util.hpp"

namespace concse {

// Task target: categorical label (GLUE-style) or real score (STS-style).
struct Target {
    enum class Kind { Label, Score };
    Kind kind = Kind::Label;
    std::string label;
    double score = 0.0;

    static Target make_label(std::string value) {
        Target t;
        t.kind = Kind::Label;
        t.label = std::move(value);
        return t;
    }
    static Target make_score(double value) {
        Target t;
        t.kind = Kind::Score;
        t.score = value;
        return t;
    }
    bool operator==(const Target& other) const {
        if (kind != other.kind) return false;
        return kind == Kind::Label ? label == other.label : score == other.score;
    }
};

struct PairRecord {
    std::string id;
    std::string sentence0;
    std::string sentence1;
    Target target;
    std::optional<std::string> cs_sentence0;
    std::optional<std::string> cs_sentence1;
    // Optional task-subset tag (e.g. an STS year); reported separately by
    // the evaluation suite when present.
    std::optional<std::string> subset;

    bool has_cs() const { return cs_sentence0.has_value() && cs_sentence1.has_value(); }
    bool operator==(const PairRecord& other) const = default;
};

struct NliRow {
    std::string premise;
    std::string hypothesis;
    std::string label;  // entailment | neutral | contradiction
    bool operator==(const NliRow& other) const = default;
};

struct NliTriplet {
    std::string premise;
    std::string entailment;
    std::string contradiction;
    bool operator==(const NliTriplet& other) const = default;
};

// An NLI triplet together with its code-switched counterparts.
struct SixTuple {
    std::string premise;
    std::string entailment;
    std::string contradiction;
    std::string cs_premise;
    std::string cs_entailment;
    std::string cs_contradiction;
    std::optional<bool> reviewed;  // human-annotation passthrough
    bool operator==(const SixTuple& other) const = default;
};

enum class FileFormat { Tsv, Jsonl };

FileFormat format_from_name(const std::string& name);
// .tsv / .jsonl extension; anything else is a config error.
FileFormat format_from_path(const std::string& path);

struct RowError {
    std::size_t line = 0;  // 1-based line number in the file
    std::string message;
};

struct PairReadResult {
    std::vector<PairRecord> records;
    std::vector<RowError> errors;
};

struct NliRowReadResult {
    std::vector<NliRow> rows;
    std::vector<RowError> errors;
};

// Readers collect malformed rows (with line numbers) instead of aborting;
// a missing required column in a TSV header is a hard error.
PairReadResult read_pairs(const std::string& path, FileFormat format);
NliRowReadResult read_nli_rows(const std::string& path, FileFormat format);
std::vector<NliTriplet> read_triplets(const std::string& path);
std::vector<SixTuple> read_sixtuples(const std::string& path);

void write_pairs(const std::vector<PairRecord>& records, const std::string& path,
                 FileFormat format);
void write_triplets(const std::vector<NliTriplet>& records, const std::string& path);
void write_sixtuples(const std::vector<SixTuple>& records, const std::string& path);

// Drops neutral rows, groups hypotheses by premise (first-appearance order),
// and pairs the i-th entailment with the i-th contradiction of the same
// premise; unpaired hypotheses are dropped. Unknown labels are an error.
std::vector<NliTriplet> reconstruct_nli(const std::vector<NliRow>& rows);

struct SplitSpec {
    std::vector<double> ratios;  // 2 or 3 entries summing to 1
    std::uint64_t seed = 0;
};

void validate_split_spec(const SplitSpec& spec);

// Seeded uniform shuffle, then contiguous slices of floor(ratio * n) records
// with the remainder assigned to the last split.
std::vector<std::vector<std::size_t>> split_indices(std::size_t n, const SplitSpec& spec);

template <typename Record>
std::vector<std::vector<Record>> split_records(const std::vector<Record>& records,
                                               const SplitSpec& spec) {
    std::vector<std::vector<Record>> parts;
    for (const std::vector<std::size_t>& indices : split_indices(records.size(), spec)) {
        std::vector<Record> part;
        part.reserve(indices.size());
        for (std::size_t i : indices) part.push_back(records[i]);
        parts.push_back(std::move(part));
    }
    return parts;
}

}  // namespace concse

#endif  // CONCSE_CORPUS_HPP
