#ifndef CONCSE_SYNTHETIC_HPP
#define CONCSE_SYNTHETIC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "util.hpp"

namespace concse {

// Synthetic bilingual benchmark: a shared concept inventory rendered either
// as "enNNN" tokens or their one-to-one "csNNN" aliases. Training sixtuples
// pair a sentence with a high-overlap entailment and a disjoint
// contradiction; STS pairs carry a gold score equal to the concept-set
// overlap |A n B| / sqrt(|A| |B|), which an encoder that aligns the aliases
// and separates concepts can rank almost perfectly.
struct SynthConfig {
    std::uint64_t seed = 1;
    int n_concepts = 200;
    int n_tuples = 500;
    int n_eval_pairs = 100;
    int min_len = 4;
    int max_len = 8;
    double switch_prob = 0.5;  // per-token alias probability in CS renderings

    void validate() const;
};

struct SynthCorpus {
    std::vector<std::string> vocab_tokens;  // <unk>, <pad>, en..., cs...
    std::vector<SixTuple> train;
    std::vector<PairRecord> sts;
};

SynthCorpus make_synthetic_corpus(const SynthConfig& config);

}  // namespace concse

#endif  // CONCSE_SYNTHETIC_HPP
