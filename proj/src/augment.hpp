#ifndef CONCSE_AUGMENT_HPP
#define CONCSE_AUGMENT_HPP

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "corpus.hpp"
#include "treebank.hpp"
#include "util.hpp"

namespace concse {

enum class TranslationErrorKind { MissingEntry, Remote };

struct TranslationError {
    TranslationErrorKind kind;
    std::string message;
};

using TranslationResult = std::variant<std::string, TranslationError>;

// Phrase-level translation contract. Backends must be deterministic within a
// run for identical inputs; the caching layer enforces this for remote ones.
class TranslationBackend {
  public:
    virtual ~TranslationBackend() = default;
    virtual TranslationResult translate(const std::string& phrase,
                                        const std::string& source_lang,
                                        const std::string& target_lang) = 0;
    virtual std::string name() const = 0;
};

// Offline exact-match table, case-insensitive on the source phrase.
// File rows are "source<TAB>target"; '#' lines are comments. Duplicate
// sources are a configuration error; language codes are ignored.
std::unique_ptr<TranslationBackend> dictionary_backend(const std::string& table_path);

struct HttpBackendConfig {
    std::string endpoint;  // e.g. http://127.0.0.1:8080/translate
    std::string api_key;   // empty = no auth header sent
    std::string api_key_header = "Authorization";
    bool bearer_prefix = true;
    // request body is JSON {text_field: phrase, source_field: sl, target_field: tl}
    std::string text_field = "q";
    std::string source_field = "source";
    std::string target_field = "target";
    // JSON pointer into the response body
    std::string response_pointer = "/translatedText";
    // append-only TSV "source_lang<TAB>target_lang<TAB>source<TAB>target";
    // empty disables persistence (in-memory caching still applies)
    std::string cache_path;

    static HttpBackendConfig load(const std::string& path);
};

// Remote backend with a persistent response cache so reruns are offline
// deterministic. One request per distinct (phrase, langs) per run; failures
// are memoized for the run and surface as TranslationError(Remote).
std::unique_ptr<TranslationBackend> http_backend(const HttpBackendConfig& config);

struct SwitchedPhrase {
    std::string source;
    std::string target;
    SwitchSpan span;
};

struct CSOutcome {
    std::string cs_text;
    std::vector<SwitchedPhrase> switched;
    std::string backend;
};

enum class OnTranslationError { RejectRecord, KeepOriginal };

struct AugmentPolicy {
    SelectionPolicy selection;
    OnTranslationError on_translation_error = OnTranslationError::RejectRecord;
    std::string source_lang = "en";
    std::string target_lang = "ko";
};

// Single-space joining; a final all-punctuation token attaches to the
// preceding word so terminal punctuation survives detokenization.
std::string detokenize(const std::vector<std::string>& tokens);

// Replaces each planned span's phrase with the backend output and joins the
// result. Under KeepOriginal a failed span keeps its source tokens and is
// not listed in `switched`.
std::variant<CSOutcome, TranslationError> apply_switch(const ParseTree& tree,
                                                       const SwitchPlan& plan,
                                                       TranslationBackend& backend,
                                                       const AugmentPolicy& policy);

// Record-level augmentation. A rejection or (under the default policy) a
// translation failure on any sentence discards the whole record.
using PairOutcome = std::variant<PairRecord, Rejection, TranslationError>;
PairOutcome augment_pair(const PairRecord& record, const ParseTree& tree0,
                         const ParseTree& tree1, const AugmentPolicy& policy,
                         TranslationBackend& backend);

using TripletOutcome = std::variant<SixTuple, Rejection, TranslationError>;
TripletOutcome augment_triplet(const NliTriplet& triplet, const ParseTree& premise_tree,
                               const ParseTree& entailment_tree,
                               const ParseTree& contradiction_tree,
                               const AugmentPolicy& policy, TranslationBackend& backend);

struct AugmentReport {
    long total = 0;
    long accepted = 0;
    std::map<std::string, long> rejected_by_reason;
    long translation_failures = 0;

    long rejected_total() const {
        long sum = 0;
        for (const auto& [reason, count] : rejected_by_reason) sum += count;
        return sum;
    }
    void count_rejection(RejectReason reason) { ++rejected_by_reason[to_string(reason)]; }
};

}  // namespace concse

#endif  // CONCSE_AUGMENT_HPP
