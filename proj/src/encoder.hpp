#ifndef CONCSE_ENCODER_HPP
#define CONCSE_ENCODER_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "matrix.hpp"
#include "util.hpp"

namespace concse {

// Token table with dense ids. Ids 0 and 1 are reserved for UNK and PAD;
// lookup is total (out-of-vocabulary maps to UNK).
class Vocab {
  public:
    static constexpr int kUnkId = 0;
    static constexpr int kPadId = 1;

    // `tokens` must already contain the UNK and PAD entries at ids 0 and 1.
    static Vocab from_tokens(std::vector<std::string> tokens, bool lowercase);
    // One token per line, line number = id, first two lines UNK and PAD.
    static Vocab load(const std::string& path, bool lowercase);
    void save(const std::string& path) const;

    int id(const std::string& token) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return tokens_.size(); }
    bool lowercase() const { return lowercase_; }
    const std::vector<std::string>& tokens() const { return tokens_; }

  private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
    bool lowercase_ = true;
};

// Whitespace split (+ ASCII lowercasing when the vocab asks for it),
// OOV -> UNK. Empty or whitespace-only text is an error.
std::vector<int> tokenize(const std::string& text, const Vocab& vocab);

// phi: embedding table, projection, bias. The sentence representation is
// h = tanh(W * meanpool(E rows) + b), standing in for a [CLS] pooler head.
struct EncoderParams {
    Matrix embedding;   // V x d
    Matrix projection;  // d x d
    std::vector<double> bias;  // d
    enum class Pooling { Mean };
    Pooling pooling = Pooling::Mean;

    std::size_t dim() const { return projection.rows; }
    std::size_t vocab_size() const { return embedding.rows; }
};

// Seeded uniform(-scale, scale) initialization, deterministic per seed.
EncoderParams init_params(std::size_t vocab_size, std::size_t dim,
                          std::uint64_t seed, double scale);

// Sentence representations plus the forward intermediates needed by the
// exact backward pass.
struct EncodedBatch {
    Matrix reps;    // N x d, rows are tanh outputs
    Matrix pooled;  // N x d, mean-pooled embeddings (pre-projection)
    std::vector<std::vector<int>> token_ids;
};

EncodedBatch encode(const std::vector<std::vector<int>>& batch,
                    const EncoderParams& params);

struct ParamGrads {
    Matrix d_embedding;
    Matrix d_projection;
    std::vector<double> d_bias;

    static ParamGrads zeros_like(const EncoderParams& params);
    void add(const ParamGrads& other);
    void scale(double factor);
};

// Exact gradients of <grad_reps, reps> with respect to E, W and b, chained
// through tanh, the affine map, mean pooling and the embedding scatter.
ParamGrads encode_backward(const EncodedBatch& batch, const EncoderParams& params,
                           const Matrix& grad_reps);

// Self-contained JSON checkpoint: shapes, row-major values and the vocab.
// Doubles round-trip exactly.
struct Checkpoint {
    EncoderParams params;
    Vocab vocab;
};

void save_checkpoint(const EncoderParams& params, const Vocab& vocab,
                     const std::string& path);
std::string checkpoint_to_json(const EncoderParams& params, const Vocab& vocab);
Checkpoint load_checkpoint(const std::string& path);
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace concse

#endif  // CONCSE_ENCODER_HPP
