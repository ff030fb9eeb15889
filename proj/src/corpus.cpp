#include "corpus.hpp"

#include <cmath>
#include <unordered_map>

#include "json.hpp"

namespace concse {

namespace {

using nlohmann::ordered_json;

std::string require_string(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ConfigError(std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ConfigError(std::string("non-string field '") + key + "'");
    return it->get<std::string>();
}

ordered_json parse_json_line(const std::string& line) {
    ordered_json obj = ordered_json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw ConfigError("not a JSON object");
    }
    return obj;
}

PairRecord pair_from_json(const ordered_json& obj) {
    PairRecord record;
    record.id = require_string(obj, "id");
    record.sentence0 = require_string(obj, "sentence0");
    record.sentence1 = require_string(obj, "sentence1");
    bool has_label = obj.contains("label");
    bool has_score = obj.contains("score");
    if (has_label == has_score) {
        throw ConfigError("expected exactly one of 'label' / 'score'");
    }
    if (has_label) {
        record.target = Target::make_label(require_string(obj, "label"));
    } else {
        if (!obj["score"].is_number()) throw ConfigError("unparsable score");
        record.target = Target::make_score(obj["score"].get<double>());
    }
    record.cs_sentence0 = optional_string(obj, "cs_sentence0");
    record.cs_sentence1 = optional_string(obj, "cs_sentence1");
    if (record.cs_sentence0.has_value() != record.cs_sentence1.has_value()) {
        throw ConfigError("cs_sentence0 and cs_sentence1 must be present together");
    }
    record.subset = optional_string(obj, "subset");
    return record;
}

ordered_json pair_to_json(const PairRecord& record) {
    ordered_json obj;
    obj["id"] = record.id;
    obj["sentence0"] = record.sentence0;
    obj["sentence1"] = record.sentence1;
    if (record.target.kind == Target::Kind::Label) {
        obj["label"] = record.target.label;
    } else {
        obj["score"] = record.target.score;
    }
    if (record.cs_sentence0) obj["cs_sentence0"] = *record.cs_sentence0;
    if (record.cs_sentence1) obj["cs_sentence1"] = *record.cs_sentence1;
    if (record.subset) obj["subset"] = *record.subset;
    return obj;
}

// TSV helpers. Header row is required; cells must not contain tabs.
struct TsvHeader {
    std::vector<std::string> columns;
    std::unordered_map<std::string, std::size_t> index;

    bool has(const std::string& name) const { return index.count(name) != 0; }
    std::size_t at(const std::string& name) const { return index.at(name); }
};

TsvHeader parse_header(const std::string& line, const std::string& path) {
    TsvHeader header;
    header.columns = split_char(line, '\t');
    for (std::size_t i = 0; i < header.columns.size(); ++i) {
        header.index[header.columns[i]] = i;
    }
    if (header.columns.empty()) throw ConfigError("empty TSV header in " + path);
    return header;
}

std::string cell(const std::vector<std::string>& cells, std::size_t index) {
    return index < cells.size() ? cells[index] : std::string();
}

double parse_score(const std::string& text) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("unparsable score: '" + text + "'");
    }
}

}  // namespace

FileFormat format_from_name(const std::string& name) {
    std::string lowered = ascii_lower(name);
    if (lowered == "tsv") return FileFormat::Tsv;
    if (lowered == "jsonl") return FileFormat::Jsonl;
    throw ConfigError("unknown file format: " + name + " (expected tsv or jsonl)");
}

FileFormat format_from_path(const std::string& path) {
    auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = ascii_lower(path.substr(dot + 1));
        if (ext == "tsv") return FileFormat::Tsv;
        if (ext == "jsonl") return FileFormat::Jsonl;
    }
    throw ConfigError("cannot infer format from path (expected .tsv or .jsonl): " + path);
}

PairReadResult read_pairs(const std::string& path, FileFormat format) {
    PairReadResult result;
    std::vector<std::string> lines = read_lines(path);

    if (format == FileFormat::Jsonl) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) continue;
            try {
                result.records.push_back(pair_from_json(parse_json_line(lines[i])));
            } catch (const Error& e) {
                result.errors.push_back({i + 1, e.what()});
            }
        }
        return result;
    }

    if (lines.empty()) throw ConfigError("TSV file has no header row: " + path);
    TsvHeader header = parse_header(lines[0], path);
    for (const char* required : {"sentence0", "sentence1"}) {
        if (!header.has(required)) {
            throw ConfigError(std::string("TSV missing required column '") + required +
                              "' in " + path);
        }
    }
    bool has_label = header.has("label");
    bool has_score = header.has("score");
    if (has_label == has_score) {
        throw ConfigError("TSV must have exactly one of 'label' / 'score' columns: " + path);
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cells = split_char(lines[i], '\t');
        try {
            PairRecord record;
            record.id = header.has("id") ? cell(cells, header.at("id"))
                                         : std::to_string(i);
            record.sentence0 = cell(cells, header.at("sentence0"));
            record.sentence1 = cell(cells, header.at("sentence1"));
            if (record.sentence0.empty() || record.sentence1.empty()) {
                throw ConfigError("missing sentence0/sentence1 value");
            }
            if (has_label) {
                std::string label = cell(cells, header.at("label"));
                if (label.empty()) throw ConfigError("missing label value");
                record.target = Target::make_label(label);
            } else {
                record.target = Target::make_score(parse_score(cell(cells, header.at("score"))));
            }
            if (header.has("cs_sentence0") && header.has("cs_sentence1")) {
                std::string cs0 = cell(cells, header.at("cs_sentence0"));
                std::string cs1 = cell(cells, header.at("cs_sentence1"));
                if (cs0.empty() != cs1.empty()) {
                    throw ConfigError("cs_sentence0 and cs_sentence1 must be present together");
                }
                if (!cs0.empty()) {
                    record.cs_sentence0 = cs0;
                    record.cs_sentence1 = cs1;
                }
            }
            if (header.has("subset")) {
                std::string subset = cell(cells, header.at("subset"));
                if (!subset.empty()) record.subset = subset;
            }
            result.records.push_back(std::move(record));
        } catch (const Error& e) {
            result.errors.push_back({i + 1, e.what()});
        }
    }
    return result;
}

NliRowReadResult read_nli_rows(const std::string& path, FileFormat format) {
    NliRowReadResult result;
    std::vector<std::string> lines = read_lines(path);

    if (format == FileFormat::Jsonl) {
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (trim(lines[i]).empty()) continue;
            try {
                ordered_json obj = parse_json_line(lines[i]);
                NliRow row;
                row.premise = require_string(obj, "premise");
                row.hypothesis = require_string(obj, "hypothesis");
                row.label = require_string(obj, "label");
                result.rows.push_back(std::move(row));
            } catch (const Error& e) {
                result.errors.push_back({i + 1, e.what()});
            }
        }
        return result;
    }

    if (lines.empty()) throw ConfigError("TSV file has no header row: " + path);
    TsvHeader header = parse_header(lines[0], path);
    for (const char* required : {"premise", "hypothesis", "label"}) {
        if (!header.has(required)) {
            throw ConfigError(std::string("TSV missing required column '") + required +
                              "' in " + path);
        }
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        std::vector<std::string> cells = split_char(lines[i], '\t');
        NliRow row;
        row.premise = cell(cells, header.at("premise"));
        row.hypothesis = cell(cells, header.at("hypothesis"));
        row.label = cell(cells, header.at("label"));
        if (row.premise.empty() || row.hypothesis.empty() || row.label.empty()) {
            result.errors.push_back({i + 1, "missing premise/hypothesis/label value"});
            continue;
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

std::vector<NliTriplet> read_triplets(const std::string& path) {
    std::vector<NliTriplet> records;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            ordered_json obj = parse_json_line(lines[i]);
            NliTriplet t;
            t.premise = require_string(obj, "premise");
            t.entailment = require_string(obj, "entailment");
            t.contradiction = require_string(obj, "contradiction");
            records.push_back(std::move(t));
        } catch (const Error& e) {
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return records;
}

std::vector<SixTuple> read_sixtuples(const std::string& path) {
    std::vector<SixTuple> records;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        try {
            ordered_json obj = parse_json_line(lines[i]);
            SixTuple t;
            t.premise = require_string(obj, "premise");
            t.entailment = require_string(obj, "entailment");
            t.contradiction = require_string(obj, "contradiction");
            t.cs_premise = require_string(obj, "cs_premise");
            t.cs_entailment = require_string(obj, "cs_entailment");
            t.cs_contradiction = require_string(obj, "cs_contradiction");
            if (obj.contains("reviewed")) {
                if (!obj["reviewed"].is_boolean()) throw ConfigError("non-boolean 'reviewed'");
                t.reviewed = obj["reviewed"].get<bool>();
            }
            records.push_back(std::move(t));
        } catch (const Error& e) {
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return records;
}

void write_pairs(const std::vector<PairRecord>& records, const std::string& path,
                 FileFormat format) {
    std::string out;
    if (format == FileFormat::Jsonl) {
        for (const PairRecord& record : records) {
            out += pair_to_json(record).dump();
            out += '\n';
        }
        write_file(path, out);
        return;
    }

    bool any_cs = false;
    bool any_subset = false;
    bool score_target = false;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].has_cs()) any_cs = true;
        if (records[i].subset) any_subset = true;
        bool is_score = records[i].target.kind == Target::Kind::Score;
        if (i == 0) {
            score_target = is_score;
        } else if (is_score != score_target) {
            throw ConfigError("cannot mix label and score targets in one TSV file");
        }
    }
    std::vector<std::string> columns = {"id", "sentence0", "sentence1",
                                        records.empty() || score_target ? "score" : "label"};
    if (any_cs) {
        columns.push_back("cs_sentence0");
        columns.push_back("cs_sentence1");
    }
    if (any_subset) columns.push_back("subset");
    out = join(columns, "\t") + "\n";
    for (const PairRecord& record : records) {
        std::vector<std::string> cells = {record.id, record.sentence0, record.sentence1};
        cells.push_back(record.target.kind == Target::Kind::Score
                            ? format_double(record.target.score)
                            : record.target.label);
        if (any_cs) {
            cells.push_back(record.cs_sentence0.value_or(""));
            cells.push_back(record.cs_sentence1.value_or(""));
        }
        if (any_subset) cells.push_back(record.subset.value_or(""));
        for (const std::string& value : cells) {
            if (value.find('\t') != std::string::npos) {
                throw ConfigError("TSV cell contains a tab (record id " + record.id + ")");
            }
        }
        out += join(cells, "\t") + "\n";
    }
    write_file(path, out);
}

void write_triplets(const std::vector<NliTriplet>& records, const std::string& path) {
    std::string out;
    for (const NliTriplet& t : records) {
        ordered_json obj;
        obj["premise"] = t.premise;
        obj["entailment"] = t.entailment;
        obj["contradiction"] = t.contradiction;
        out += obj.dump();
        out += '\n';
    }
    write_file(path, out);
}

void write_sixtuples(const std::vector<SixTuple>& records, const std::string& path) {
    std::string out;
    for (const SixTuple& t : records) {
        ordered_json obj;
        obj["premise"] = t.premise;
        obj["entailment"] = t.entailment;
        obj["contradiction"] = t.contradiction;
        obj["cs_premise"] = t.cs_premise;
        obj["cs_entailment"] = t.cs_entailment;
        obj["cs_contradiction"] = t.cs_contradiction;
        if (t.reviewed) obj["reviewed"] = *t.reviewed;
        out += obj.dump();
        out += '\n';
    }
    write_file(path, out);
}

std::vector<NliTriplet> reconstruct_nli(const std::vector<NliRow>& rows) {
    struct Group {
        std::vector<std::string> entailments;
        std::vector<std::string> contradictions;
    };
    std::vector<std::string> premise_order;
    std::unordered_map<std::string, Group> groups;

    for (const NliRow& row : rows) {
        std::string label = ascii_lower(trim(row.label));
        if (label != "entailment" && label != "neutral" && label != "contradiction") {
            throw ConfigError("unknown NLI label: '" + row.label + "'");
        }
        if (label == "neutral") continue;
        auto it = groups.find(row.premise);
        if (it == groups.end()) {
            premise_order.push_back(row.premise);
            it = groups.emplace(row.premise, Group{}).first;
        }
        if (label == "entailment") {
            it->second.entailments.push_back(row.hypothesis);
        } else {
            it->second.contradictions.push_back(row.hypothesis);
        }
    }

    std::vector<NliTriplet> triplets;
    for (const std::string& premise : premise_order) {
        const Group& group = groups.at(premise);
        std::size_t pairs = std::min(group.entailments.size(), group.contradictions.size());
        for (std::size_t i = 0; i < pairs; ++i) {
            triplets.push_back({premise, group.entailments[i], group.contradictions[i]});
        }
    }
    return triplets;
}

void validate_split_spec(const SplitSpec& spec) {
    if (spec.ratios.size() != 2 && spec.ratios.size() != 3) {
        throw ConfigError("split expects 2 or 3 ratios, got " +
                          std::to_string(spec.ratios.size()));
    }
    double sum = 0.0;
    for (double r : spec.ratios) {
        if (r < 0.0) throw ConfigError("split ratios must be nonnegative");
        sum += r;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("split ratios must sum to 1, got " + format_double(sum));
    }
}

std::vector<std::vector<std::size_t>> split_indices(std::size_t n, const SplitSpec& spec) {
    validate_split_spec(spec);
    if (n == 0) throw ConfigError("cannot split an empty record set");

    std::vector<std::size_t> order = shuffled_indices(n, spec.seed);
    std::vector<std::size_t> sizes;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i + 1 < spec.ratios.size(); ++i) {
        auto size = static_cast<std::size_t>(std::floor(spec.ratios[i] * static_cast<double>(n)));
        sizes.push_back(size);
        assigned += size;
    }
    sizes.push_back(n - assigned);  // remainder goes to the last split

    std::vector<std::vector<std::size_t>> parts;
    std::size_t cursor = 0;
    for (std::size_t size : sizes) {
        parts.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                           order.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
    }
    return parts;
}

}  // namespace concse
