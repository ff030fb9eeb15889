#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace concse {

void SynthConfig::validate() const {
    if (n_concepts < 2 * max_len + 2) {
        throw ConfigError("synthetic corpus needs more concepts than 2 * max_len");
    }
    if (n_tuples < 1 || n_eval_pairs < 1) throw ConfigError("corpus sizes must be >= 1");
    if (min_len < 1 || max_len < min_len) throw ConfigError("invalid sentence length range");
    if (switch_prob < 0.0 || switch_prob > 1.0) throw ConfigError("switch_prob must be in [0, 1]");
}

namespace {

std::string concept_token(int concept_id, bool cs) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%s%03d", cs ? "cs" : "en", concept_id);
    return buf;
}

// Distinct concepts, optionally avoiding a taken set.
std::vector<int> sample_concepts(Rng& rng, int n_concepts, int count,
                                 const std::unordered_set<int>* taken = nullptr) {
    std::unordered_set<int> chosen;
    std::vector<int> out;
    while (static_cast<int>(out.size()) < count) {
        int c = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n_concepts)));
        if (chosen.count(c) != 0) continue;
        if (taken != nullptr && taken->count(c) != 0) continue;
        chosen.insert(c);
        out.push_back(c);
    }
    return out;
}

void shuffle_in_place(Rng& rng, std::vector<std::string>* tokens) {
    for (std::size_t i = tokens->size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        std::swap((*tokens)[i - 1], (*tokens)[j]);
    }
}

std::string render_en(Rng& rng, const std::vector<int>& concepts) {
    std::vector<std::string> tokens;
    tokens.reserve(concepts.size());
    for (int c : concepts) tokens.push_back(concept_token(c, false));
    shuffle_in_place(rng, &tokens);
    return join(tokens, " ");
}

std::string render_cs(Rng& rng, const std::vector<int>& concepts, double switch_prob) {
    std::vector<bool> mask(concepts.size(), false);
    bool any = false;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        mask[i] = uniform_unit(rng) < switch_prob;
        any = any || mask[i];
    }
    if (!any) mask[uniform_index(rng, concepts.size())] = true;  // always code-switched
    std::vector<std::string> tokens;
    tokens.reserve(concepts.size());
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        tokens.push_back(concept_token(concepts[i], mask[i]));
    }
    shuffle_in_place(rng, &tokens);
    return join(tokens, " ");
}

int sample_len(Rng& rng, const SynthConfig& cfg) {
    return cfg.min_len +
           static_cast<int>(uniform_index(rng, static_cast<std::size_t>(cfg.max_len - cfg.min_len + 1)));
}

}  // namespace

SynthCorpus make_synthetic_corpus(const SynthConfig& config) {
    config.validate();
    Rng rng(config.seed);

    SynthCorpus corpus;
    corpus.vocab_tokens.push_back("<unk>");
    corpus.vocab_tokens.push_back("<pad>");
    for (int c = 0; c < config.n_concepts; ++c) {
        corpus.vocab_tokens.push_back(concept_token(c, false));
    }
    for (int c = 0; c < config.n_concepts; ++c) {
        corpus.vocab_tokens.push_back(concept_token(c, true));
    }

    corpus.train.reserve(static_cast<std::size_t>(config.n_tuples));
    for (int i = 0; i < config.n_tuples; ++i) {
        int len = sample_len(rng, config);
        std::vector<int> premise = sample_concepts(rng, config.n_concepts, len);

        // entailment keeps most of the premise concepts and swaps in a few
        // fresh ones; contradiction is concept-disjoint
        std::unordered_set<int> used(premise.begin(), premise.end());
        int drop = len >= 4 ? 1 + static_cast<int>(uniform_index(rng, 2)) : 1;
        std::vector<int> entailment(premise.begin(), premise.end() - drop);
        for (int fresh : sample_concepts(rng, config.n_concepts, drop, &used)) {
            entailment.push_back(fresh);
            used.insert(fresh);
        }
        int contra_len = sample_len(rng, config);
        std::vector<int> contradiction =
            sample_concepts(rng, config.n_concepts, contra_len, &used);

        SixTuple tuple;
        tuple.premise = render_en(rng, premise);
        tuple.entailment = render_en(rng, entailment);
        tuple.contradiction = render_en(rng, contradiction);
        tuple.cs_premise = render_cs(rng, premise, config.switch_prob);
        tuple.cs_entailment = render_cs(rng, entailment, config.switch_prob);
        tuple.cs_contradiction = render_cs(rng, contradiction, config.switch_prob);
        corpus.train.push_back(std::move(tuple));
    }

    corpus.sts.reserve(static_cast<std::size_t>(config.n_eval_pairs));
    for (int i = 0; i < config.n_eval_pairs; ++i) {
        int len_a = sample_len(rng, config);
        int len_b = sample_len(rng, config);
        int max_overlap = std::min(len_a, len_b);
        int overlap = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(max_overlap + 1)));

        std::vector<int> side_a = sample_concepts(rng, config.n_concepts, len_a);
        std::unordered_set<int> used(side_a.begin(), side_a.end());
        std::vector<int> side_b(side_a.begin(), side_a.begin() + overlap);
        for (int fresh : sample_concepts(rng, config.n_concepts, len_b - overlap, &used)) {
            side_b.push_back(fresh);
        }

        PairRecord pair;
        char id[32];
        std::snprintf(id, sizeof(id), "synth-%04d", i);
        pair.id = id;
        pair.sentence0 = render_en(rng, side_a);
        pair.sentence1 = render_en(rng, side_b);
        pair.cs_sentence0 = render_cs(rng, side_a, config.switch_prob);
        pair.cs_sentence1 = render_cs(rng, side_b, config.switch_prob);
        pair.target = Target::make_score(
            static_cast<double>(overlap) /
            std::sqrt(static_cast<double>(len_a) * static_cast<double>(len_b)));
        corpus.sts.push_back(std::move(pair));
    }
    return corpus;
}

}  // namespace concse
