#include "augment.hpp"

#include <fstream>
#include <mutex>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"

namespace concse {

namespace {

class DictionaryBackend : public TranslationBackend {
  public:
    explicit DictionaryBackend(const std::string& table_path) : path_(table_path) {
        std::vector<std::string> lines = read_lines(table_path);
        for (std::size_t i = 0; i < lines.size(); ++i) {
            std::string line = lines[i];
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> cells = split_char(line, '\t');
            if (cells.size() != 2) {
                throw ConfigError(table_path + ":" + std::to_string(i + 1) +
                                  ": expected 'source<TAB>target'");
            }
            std::string key = ascii_lower(trim(cells[0]));
            if (key.empty()) {
                throw ConfigError(table_path + ":" + std::to_string(i + 1) + ": empty source phrase");
            }
            auto [it, inserted] = table_.emplace(key, cells[1]);
            if (!inserted) {
                throw ConfigError(table_path + ":" + std::to_string(i + 1) +
                                  ": duplicate source phrase '" + cells[0] + "'");
            }
        }
    }

    TranslationResult translate(const std::string& phrase, const std::string&,
                                const std::string&) override {
        auto it = table_.find(ascii_lower(trim(phrase)));
        if (it == table_.end()) {
            return TranslationError{TranslationErrorKind::MissingEntry,
                                    "no dictionary entry for '" + phrase + "'"};
        }
        return it->second;
    }

    std::string name() const override { return "dict:" + path_; }

  private:
    std::string path_;
    std::unordered_map<std::string, std::string> table_;
};

std::string cache_key(const std::string& sl, const std::string& tl, const std::string& phrase) {
    return sl + '\t' + tl + '\t' + phrase;
}

class HttpBackend : public TranslationBackend {
  public:
    explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (config_.endpoint.empty()) throw ConfigError("http backend: endpoint is required");
        split_endpoint();
        if (!config_.cache_path.empty()) load_cache();
    }

    TranslationResult translate(const std::string& phrase, const std::string& source_lang,
                                const std::string& target_lang) override {
        const std::string key = cache_key(source_lang, target_lang, phrase);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            auto hit = cache_.find(key);
            if (hit != cache_.end()) return hit->second;
            auto miss = failed_.find(key);
            if (miss != failed_.end()) {
                return TranslationError{TranslationErrorKind::Remote, miss->second};
            }
        }

        TranslationResult result = request(phrase, source_lang, target_lang);

        std::lock_guard<std::mutex> lock(mutex_);
        if (const auto* text = std::get_if<std::string>(&result)) {
            cache_.emplace(key, *text);
            if (!config_.cache_path.empty()) {
                append_cache_row(source_lang, target_lang, phrase, *text);
            }
        } else {
            // memoized for this run only; a rerun may retry
            failed_.emplace(key, std::get<TranslationError>(result).message);
        }
        return result;
    }

    std::string name() const override { return "http:" + config_.endpoint; }

  private:
    void split_endpoint() {
        const std::string& url = config_.endpoint;
        std::size_t scheme = url.find("://");
        if (scheme == std::string::npos) {
            throw ConfigError("http backend: endpoint must include a scheme: " + url);
        }
        std::size_t path = url.find('/', scheme + 3);
        if (path == std::string::npos) {
            host_ = url;
            path_ = "/";
        } else {
            host_ = url.substr(0, path);
            path_ = url.substr(path);
        }
    }

    void load_cache() {
        std::ifstream in(config_.cache_path, std::ios::binary);
        if (!in) return;  // cache file appears on first successful request
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            std::vector<std::string> cells = split_char(line, '\t');
            if (cells.size() != 4) {
                throw ConfigError(config_.cache_path + ":" + std::to_string(line_no) +
                                  ": expected 4 tab-separated columns");
            }
            cache_[cache_key(cells[0], cells[1], cells[2])] = cells[3];
        }
    }

    void append_cache_row(const std::string& sl, const std::string& tl,
                          const std::string& phrase, const std::string& target) {
        std::ofstream out(config_.cache_path, std::ios::binary | std::ios::app);
        if (!out) throw IoError("cannot append to translation cache: " + config_.cache_path);
        out << sl << '\t' << tl << '\t' << phrase << '\t' << target << '\n';
        out.flush();
    }

    TranslationResult request(const std::string& phrase, const std::string& source_lang,
                              const std::string& target_lang) {
        httplib::Client client(host_);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(10, 0);

        nlohmann::json body;
        body[config_.text_field] = phrase;
        body[config_.source_field] = source_lang;
        body[config_.target_field] = target_lang;

        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            std::string value = config_.bearer_prefix ? "Bearer " + config_.api_key
                                                      : config_.api_key;
            headers.emplace(config_.api_key_header, value);
        }

        auto response = client.Post(path_, headers, body.dump(), "application/json");
        if (!response) {
            return TranslationError{TranslationErrorKind::Remote,
                                    "request to " + config_.endpoint + " failed: " +
                                        httplib::to_string(response.error())};
        }
        if (response->status < 200 || response->status >= 300) {
            return TranslationError{TranslationErrorKind::Remote,
                                    "non-success status " + std::to_string(response->status) +
                                        " from " + config_.endpoint};
        }
        nlohmann::json parsed = nlohmann::json::parse(response->body, nullptr, false);
        if (parsed.is_discarded()) {
            return TranslationError{TranslationErrorKind::Remote,
                                    "malformed JSON response from " + config_.endpoint};
        }
        try {
            nlohmann::json value = parsed.at(nlohmann::json::json_pointer(config_.response_pointer));
            if (!value.is_string()) {
                return TranslationError{TranslationErrorKind::Remote,
                                        "response field " + config_.response_pointer +
                                            " is not a string"};
            }
            return value.get<std::string>();
        } catch (const nlohmann::json::exception&) {
            return TranslationError{TranslationErrorKind::Remote,
                                    "response field " + config_.response_pointer + " missing"};
        }
    }

    HttpBackendConfig config_;
    std::string host_;
    std::string path_;
    std::mutex mutex_;
    std::unordered_map<std::string, std::string> cache_;
    std::unordered_map<std::string, std::string> failed_;
};

bool all_punct(const std::string& token) {
    if (token.empty()) return false;
    for (char c : token) {
        if (std::string(".,!?;:").find(c) == std::string::npos) return false;
    }
    return true;
}

}  // namespace

HttpBackendConfig HttpBackendConfig::load(const std::string& path) {
    KvConfig kv = KvConfig::load(path);
    HttpBackendConfig config;
    config.endpoint = kv.require("endpoint");
    config.api_key = kv.get("api_key", "");
    config.api_key_header = kv.get("api_key_header", config.api_key_header);
    config.bearer_prefix = kv.get_bool("bearer_prefix", config.bearer_prefix);
    config.text_field = kv.get("text_field", config.text_field);
    config.source_field = kv.get("source_field", config.source_field);
    config.target_field = kv.get("target_field", config.target_field);
    config.response_pointer = kv.get("response_pointer", config.response_pointer);
    config.cache_path = kv.get("cache_path", "");
    return config;
}

std::unique_ptr<TranslationBackend> dictionary_backend(const std::string& table_path) {
    return std::make_unique<DictionaryBackend>(table_path);
}

std::unique_ptr<TranslationBackend> http_backend(const HttpBackendConfig& config) {
    return std::make_unique<HttpBackend>(config);
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string text;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i].empty()) continue;
        bool final_punct = i + 1 == tokens.size() && i > 0 && all_punct(tokens[i]);
        if (!text.empty() && !final_punct) text += ' ';
        text += tokens[i];
    }
    return text;
}

std::variant<CSOutcome, TranslationError> apply_switch(const ParseTree& tree,
                                                       const SwitchPlan& plan,
                                                       TranslationBackend& backend,
                                                       const AugmentPolicy& policy) {
    std::vector<std::string> tokens = fringe(tree);
    CSOutcome outcome;
    outcome.backend = backend.name();

    std::vector<std::string> output;
    std::size_t cursor = 0;
    for (const SwitchSpan& span : plan.spans) {
        CONCSE_CHECK(span.start >= cursor && span.end <= tokens.size() && span.start < span.end,
                     "switch plan does not fit the tree");
        for (std::size_t i = cursor; i < span.start; ++i) output.push_back(tokens[i]);

        TranslationResult translated =
            backend.translate(span.phrase, policy.source_lang, policy.target_lang);
        if (const auto* error = std::get_if<TranslationError>(&translated)) {
            if (policy.on_translation_error == OnTranslationError::RejectRecord) {
                return *error;
            }
            for (std::size_t i = span.start; i < span.end; ++i) output.push_back(tokens[i]);
        } else {
            output.push_back(std::get<std::string>(translated));
            outcome.switched.push_back({span.phrase, std::get<std::string>(translated), span});
        }
        cursor = span.end;
    }
    for (std::size_t i = cursor; i < tokens.size(); ++i) output.push_back(tokens[i]);

    outcome.cs_text = detokenize(output);
    return outcome;
}

namespace {

// Selection plus switching for one sentence; shared by the record-level ops.
std::variant<CSOutcome, Rejection, TranslationError> switch_sentence(
    const ParseTree& tree, const AugmentPolicy& policy, TranslationBackend& backend) {
    auto selected = select_switch_spans(tree, policy.selection);
    if (const auto* rejection = std::get_if<Rejection>(&selected)) return *rejection;
    auto switched = apply_switch(tree, std::get<SwitchPlan>(selected), backend, policy);
    if (const auto* error = std::get_if<TranslationError>(&switched)) return *error;
    return std::get<CSOutcome>(switched);
}

}  // namespace

PairOutcome augment_pair(const PairRecord& record, const ParseTree& tree0,
                         const ParseTree& tree1, const AugmentPolicy& policy,
                         TranslationBackend& backend) {
    auto outcome0 = switch_sentence(tree0, policy, backend);
    if (const auto* rejection = std::get_if<Rejection>(&outcome0)) return *rejection;
    if (const auto* error = std::get_if<TranslationError>(&outcome0)) return *error;
    auto outcome1 = switch_sentence(tree1, policy, backend);
    if (const auto* rejection = std::get_if<Rejection>(&outcome1)) return *rejection;
    if (const auto* error = std::get_if<TranslationError>(&outcome1)) return *error;

    PairRecord augmented = record;
    augmented.cs_sentence0 = std::get<CSOutcome>(outcome0).cs_text;
    augmented.cs_sentence1 = std::get<CSOutcome>(outcome1).cs_text;
    return augmented;
}

TripletOutcome augment_triplet(const NliTriplet& triplet, const ParseTree& premise_tree,
                               const ParseTree& entailment_tree,
                               const ParseTree& contradiction_tree,
                               const AugmentPolicy& policy, TranslationBackend& backend) {
    const ParseTree* trees[3] = {&premise_tree, &entailment_tree, &contradiction_tree};
    std::string cs_texts[3];
    for (int i = 0; i < 3; ++i) {
        auto outcome = switch_sentence(*trees[i], policy, backend);
        if (const auto* rejection = std::get_if<Rejection>(&outcome)) return *rejection;
        if (const auto* error = std::get_if<TranslationError>(&outcome)) return *error;
        cs_texts[i] = std::get<CSOutcome>(outcome).cs_text;
    }

    SixTuple tuple;
    tuple.premise = triplet.premise;
    tuple.entailment = triplet.entailment;
    tuple.contradiction = triplet.contradiction;
    tuple.cs_premise = cs_texts[0];
    tuple.cs_entailment = cs_texts[1];
    tuple.cs_contradiction = cs_texts[2];
    return tuple;
}

}  // namespace concse
