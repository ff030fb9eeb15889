#include "encoder.hpp"

#include <cmath>

#include "json.hpp"

namespace concse {

Vocab Vocab::from_tokens(std::vector<std::string> tokens, bool lowercase) {
    if (tokens.size() < 2) {
        throw ConfigError("vocab needs at least the UNK and PAD entries");
    }
    Vocab vocab;
    vocab.tokens_ = std::move(tokens);
    vocab.lowercase_ = lowercase;
    for (std::size_t i = 0; i < vocab.tokens_.size(); ++i) {
        auto [it, inserted] = vocab.index_.emplace(vocab.tokens_[i], static_cast<int>(i));
        if (!inserted) {
            throw ConfigError("duplicate vocab token: '" + vocab.tokens_[i] + "'");
        }
    }
    return vocab;
}

Vocab Vocab::load(const std::string& path, bool lowercase) {
    std::vector<std::string> lines = read_lines(path);
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return from_tokens(std::move(lines), lowercase);
}

void Vocab::save(const std::string& path) const {
    std::string out;
    for (const std::string& token : tokens_) {
        out += token;
        out += '\n';
    }
    write_file(path, out);
}

int Vocab::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnkId : it->second;
}

std::vector<int> tokenize(const std::string& text, const Vocab& vocab) {
    std::vector<std::string> words = split_ws(text);
    if (words.empty()) {
        throw ConfigError("cannot tokenize empty or whitespace-only text");
    }
    std::vector<int> ids;
    ids.reserve(words.size());
    for (std::string& word : words) {
        if (vocab.lowercase()) word = ascii_lower(std::move(word));
        ids.push_back(vocab.id(word));
    }
    return ids;
}

EncoderParams init_params(std::size_t vocab_size, std::size_t dim,
                          std::uint64_t seed, double scale) {
    if (dim < 2) throw ConfigError("encoder dim must be >= 2");
    if (scale < 0.0) throw ConfigError("init scale must be >= 0");
    EncoderParams params;
    params.embedding = Matrix(vocab_size, dim);
    params.projection = Matrix(dim, dim);
    params.bias.assign(dim, 0.0);
    Rng rng(seed);
    for (double& v : params.embedding.data) v = uniform_range(rng, -scale, scale);
    for (double& v : params.projection.data) v = uniform_range(rng, -scale, scale);
    for (double& v : params.bias) v = uniform_range(rng, -scale, scale);
    return params;
}

EncodedBatch encode(const std::vector<std::vector<int>>& batch,
                    const EncoderParams& params) {
    const std::size_t n = batch.size();
    const std::size_t d = params.dim();
    const std::size_t v = params.vocab_size();
    EncodedBatch out;
    out.reps = Matrix(n, d);
    out.pooled = Matrix(n, d);
    out.token_ids = batch;

    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<int>& ids = batch[i];
        CONCSE_CHECK(!ids.empty(), "encode: empty token sequence");
        double* pooled = out.pooled.row(i);
        for (int id : ids) {
            CONCSE_CHECK(id >= 0 && static_cast<std::size_t>(id) < v,
                         "encode: token id out of range");
            const double* e = params.embedding.row(static_cast<std::size_t>(id));
            for (std::size_t k = 0; k < d; ++k) pooled[k] += e[k];
        }
        const double inv_len = 1.0 / static_cast<double>(ids.size());
        for (std::size_t k = 0; k < d; ++k) pooled[k] *= inv_len;

        double* rep = out.reps.row(i);
        for (std::size_t r = 0; r < d; ++r) {
            double z = params.bias[r];
            const double* w = params.projection.row(r);
            for (std::size_t k = 0; k < d; ++k) z += w[k] * pooled[k];
            rep[r] = std::tanh(z);
        }
    }
    return out;
}

ParamGrads ParamGrads::zeros_like(const EncoderParams& params) {
    ParamGrads grads;
    grads.d_embedding = Matrix(params.embedding.rows, params.embedding.cols);
    grads.d_projection = Matrix(params.projection.rows, params.projection.cols);
    grads.d_bias.assign(params.bias.size(), 0.0);
    return grads;
}

void ParamGrads::add(const ParamGrads& other) {
    d_embedding.add_scaled(other.d_embedding, 1.0);
    d_projection.add_scaled(other.d_projection, 1.0);
    CONCSE_CHECK(d_bias.size() == other.d_bias.size(), "bias grad shape mismatch");
    for (std::size_t i = 0; i < d_bias.size(); ++i) d_bias[i] += other.d_bias[i];
}

void ParamGrads::scale(double factor) {
    d_embedding.scale(factor);
    d_projection.scale(factor);
    for (double& v : d_bias) v *= factor;
}

ParamGrads encode_backward(const EncodedBatch& batch, const EncoderParams& params,
                           const Matrix& grad_reps) {
    const std::size_t n = batch.reps.rows;
    const std::size_t d = params.dim();
    CONCSE_CHECK(grad_reps.rows == n && grad_reps.cols == d,
                 "encode_backward: grad_reps shape mismatch");

    ParamGrads grads = ParamGrads::zeros_like(params);
    std::vector<double> dz(d);
    std::vector<double> dpooled(d);

    for (std::size_t i = 0; i < n; ++i) {
        const double* rep = batch.reps.row(i);
        const double* gh = grad_reps.row(i);
        // through tanh: dz = gh * (1 - h^2)
        for (std::size_t r = 0; r < d; ++r) dz[r] = gh[r] * (1.0 - rep[r] * rep[r]);

        const double* pooled = batch.pooled.row(i);
        for (std::size_t r = 0; r < d; ++r) {
            grads.d_bias[r] += dz[r];
            double* dw = grads.d_projection.row(r);
            for (std::size_t k = 0; k < d; ++k) dw[k] += dz[r] * pooled[k];
        }
        // dpooled = W^T dz
        for (std::size_t k = 0; k < d; ++k) dpooled[k] = 0.0;
        for (std::size_t r = 0; r < d; ++r) {
            const double* w = params.projection.row(r);
            for (std::size_t k = 0; k < d; ++k) dpooled[k] += w[k] * dz[r];
        }
        // scatter through the mean: every occurrence accumulates
        const std::vector<int>& ids = batch.token_ids[i];
        const double inv_len = 1.0 / static_cast<double>(ids.size());
        for (int id : ids) {
            double* de = grads.d_embedding.row(static_cast<std::size_t>(id));
            for (std::size_t k = 0; k < d; ++k) de[k] += dpooled[k] * inv_len;
        }
    }
    return grads;
}

namespace {

using nlohmann::ordered_json;

ordered_json matrix_to_json(const Matrix& m) {
    return ordered_json(m.data);
}

Matrix matrix_from_json(const ordered_json& values, std::size_t rows, std::size_t cols,
                        const char* name) {
    Matrix m(rows, cols);
    if (!values.is_array() || values.size() != rows * cols) {
        throw ConfigError(std::string("checkpoint field '") + name + "' has wrong size");
    }
    for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = values[i].get<double>();
    return m;
}

}  // namespace

std::string checkpoint_to_json(const EncoderParams& params, const Vocab& vocab) {
    ordered_json obj;
    obj["format"] = "concse-checkpoint";
    obj["version"] = 1;
    obj["dim"] = params.dim();
    obj["vocab_size"] = params.vocab_size();
    obj["pooling"] = "mean";
    obj["lowercase"] = vocab.lowercase();
    obj["vocab"] = vocab.tokens();
    obj["embedding"] = matrix_to_json(params.embedding);
    obj["projection"] = matrix_to_json(params.projection);
    obj["bias"] = ordered_json(params.bias);
    return obj.dump();
}

void save_checkpoint(const EncoderParams& params, const Vocab& vocab,
                     const std::string& path) {
    write_file(path, checkpoint_to_json(params, vocab) + "\n");
}

Checkpoint checkpoint_from_json(const std::string& text) {
    ordered_json obj = ordered_json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        throw ConfigError("checkpoint is not a JSON object");
    }
    if (obj.value("format", "") != std::string("concse-checkpoint")) {
        throw ConfigError("not a concse checkpoint");
    }
    if (obj.value("version", 0) != 1) {
        throw ConfigError("unsupported checkpoint version");
    }
    auto dim = obj.at("dim").get<std::size_t>();
    auto vocab_size = obj.at("vocab_size").get<std::size_t>();
    bool lowercase = obj.at("lowercase").get<bool>();
    std::vector<std::string> tokens = obj.at("vocab").get<std::vector<std::string>>();
    if (tokens.size() != vocab_size) {
        throw ConfigError("checkpoint vocab size mismatch");
    }

    Checkpoint ckpt{EncoderParams{}, Vocab::from_tokens(std::move(tokens), lowercase)};
    ckpt.params.embedding = matrix_from_json(obj.at("embedding"), vocab_size, dim, "embedding");
    ckpt.params.projection = matrix_from_json(obj.at("projection"), dim, dim, "projection");
    std::vector<double> bias = obj.at("bias").get<std::vector<double>>();
    if (bias.size() != dim) throw ConfigError("checkpoint bias size mismatch");
    ckpt.params.bias = std::move(bias);
    return ckpt;
}

Checkpoint load_checkpoint(const std::string& path) {
    return checkpoint_from_json(read_file(path));
}

}  // namespace concse
