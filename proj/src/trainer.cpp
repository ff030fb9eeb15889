#include "trainer.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"

namespace concse {

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (max_steps < 0) throw ConfigError("max_steps must be >= 0");
    if (eval_every < 0) throw ConfigError("eval_every must be >= 0");
    if (dim < 2) throw ConfigError("dim must be >= 2");
    if (init_scale < 0.0) throw ConfigError("init_scale must be >= 0");
    loss.validate();
}

void apply_preset(const std::string& name, TrainConfig* config) {
    std::string preset = ascii_lower(trim(name));
    if (preset == "desk") {
        config->batch_size = 16;
        config->learning_rate = 0.01;
        config->optimizer = TrainConfig::Optimizer::Sgd;
        config->epochs = 1;
    } else if (preset == "paper-mbert" || preset == "paper-xlmr-base") {
        // published ConCSE fine-tuning settings for the base models
        config->batch_size = 128;
        config->learning_rate = 5e-5;
        config->optimizer = TrainConfig::Optimizer::Adam;
        config->epochs = 5;
    } else if (preset == "paper-xlmr-large") {
        config->batch_size = 48;
        config->learning_rate = 1e-5;
        config->optimizer = TrainConfig::Optimizer::Adam;
        config->epochs = 5;
    } else {
        throw ConfigError("unknown preset '" + name +
                          "' (expected desk, paper-mbert, paper-xlmr-base, paper-xlmr-large)");
    }
}

TrainConfig TrainConfig::from_kv(const KvConfig& kv) {
    TrainConfig config;
    if (kv.has("preset")) apply_preset(kv.require("preset"), &config);

    config.epochs = static_cast<int>(kv.get_long("epochs", config.epochs));
    config.batch_size = static_cast<int>(kv.get_long("batch_size", config.batch_size));
    config.learning_rate = kv.get_double("learning_rate", config.learning_rate);
    if (kv.has("optimizer")) {
        std::string opt = ascii_lower(kv.require("optimizer"));
        if (opt == "sgd") {
            config.optimizer = Optimizer::Sgd;
        } else if (opt == "adam") {
            config.optimizer = Optimizer::Adam;
        } else {
            throw ConfigError("unknown optimizer '" + opt + "' (expected sgd or adam)");
        }
    }
    config.adam.beta1 = kv.get_double("adam_beta1", config.adam.beta1);
    config.adam.beta2 = kv.get_double("adam_beta2", config.adam.beta2);
    config.adam.eps = kv.get_double("adam_eps", config.adam.eps);
    config.seed = static_cast<std::uint64_t>(kv.get_long("seed", static_cast<long>(config.seed)));
    config.eval_every = static_cast<int>(kv.get_long("eval_every", config.eval_every));
    config.max_steps = kv.get_long("max_steps", config.max_steps);
    config.dim = static_cast<std::size_t>(kv.get_long("dim", static_cast<long>(config.dim)));
    config.init_scale = kv.get_double("init_scale", config.init_scale);
    config.lowercase = kv.get_bool("lowercase", config.lowercase);

    if (kv.has("variant")) apply_variant(kv.require("variant"), &config.loss);
    config.loss.tau = kv.get_double("tau", config.loss.tau);
    config.loss.lambda = kv.get_double("lambda", config.loss.lambda);
    config.loss.alpha = kv.get_double("alpha", config.loss.alpha);
    config.loss.enable_con = kv.get_bool("enable_con", config.loss.enable_con);
    config.loss.enable_tri = kv.get_bool("enable_tri", config.loss.enable_tri);
    config.loss.enable_neg = kv.get_bool("enable_neg", config.loss.enable_neg);
    if (kv.has("combinations")) {
        config.loss.combinations = parse_combination_list(kv.require("combinations"));
    }
    if (kv.has("align_mode")) {
        std::string mode = ascii_lower(kv.require("align_mode"));
        if (mode == "softmax") {
            config.loss.align_mode = LossConfig::AlignMode::Softmax;
        } else if (mode == "sigmoid") {
            config.loss.align_mode = LossConfig::AlignMode::Sigmoid;
        } else {
            throw ConfigError("unknown align_mode '" + mode + "' (expected softmax or sigmoid)");
        }
    }
    config.validate();
    return config;
}

TrainConfig TrainConfig::load(const std::string& path) {
    return from_kv(KvConfig::load(path));
}

std::vector<std::pair<std::string, std::string>> TrainConfig::to_pairs() const {
    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.emplace_back("epochs", std::to_string(epochs));
    pairs.emplace_back("batch_size", std::to_string(batch_size));
    pairs.emplace_back("learning_rate", format_double(learning_rate));
    pairs.emplace_back("optimizer", optimizer == Optimizer::Sgd ? "sgd" : "adam");
    pairs.emplace_back("adam_beta1", format_double(adam.beta1));
    pairs.emplace_back("adam_beta2", format_double(adam.beta2));
    pairs.emplace_back("adam_eps", format_double(adam.eps));
    pairs.emplace_back("seed", std::to_string(seed));
    pairs.emplace_back("eval_every", std::to_string(eval_every));
    pairs.emplace_back("max_steps", std::to_string(max_steps));
    pairs.emplace_back("dim", std::to_string(dim));
    pairs.emplace_back("init_scale", format_double(init_scale));
    pairs.emplace_back("lowercase", lowercase ? "true" : "false");
    pairs.emplace_back("tau", format_double(loss.tau));
    pairs.emplace_back("lambda", format_double(loss.lambda));
    pairs.emplace_back("alpha", format_double(loss.alpha));
    pairs.emplace_back("enable_con", loss.enable_con ? "true" : "false");
    pairs.emplace_back("enable_tri", loss.enable_tri ? "true" : "false");
    pairs.emplace_back("enable_neg", loss.enable_neg ? "true" : "false");
    pairs.emplace_back("combinations", combination_list_string(loss.combinations));
    pairs.emplace_back("align_mode",
                       loss.align_mode == LossConfig::AlignMode::Softmax ? "softmax" : "sigmoid");
    return pairs;
}

std::vector<std::vector<std::size_t>> make_batches(std::size_t n_records,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed,
                                                   std::uint64_t epoch) {
    CONCSE_CHECK(n_records >= 1, "make_batches: empty record set");
    CONCSE_CHECK(batch_size >= 1, "make_batches: batch_size must be >= 1");
    std::vector<std::size_t> order = shuffled_indices(n_records, seed ^ epoch);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t start = 0; start < n_records; start += batch_size) {
        std::size_t end = std::min(start + batch_size, n_records);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    return batches;
}

void sgd_step(EncoderParams* params, const ParamGrads& grads, double lr) {
    params->embedding.add_scaled(grads.d_embedding, -lr);
    params->projection.add_scaled(grads.d_projection, -lr);
    CONCSE_CHECK(params->bias.size() == grads.d_bias.size(), "sgd_step: bias shape mismatch");
    for (std::size_t i = 0; i < params->bias.size(); ++i) {
        params->bias[i] -= lr * grads.d_bias[i];
    }
}

AdamState AdamState::zeros_like(const EncoderParams& params) {
    AdamState state;
    state.m_embedding = Matrix(params.embedding.rows, params.embedding.cols);
    state.v_embedding = Matrix(params.embedding.rows, params.embedding.cols);
    state.m_projection = Matrix(params.projection.rows, params.projection.cols);
    state.v_projection = Matrix(params.projection.rows, params.projection.cols);
    state.m_bias.assign(params.bias.size(), 0.0);
    state.v_bias.assign(params.bias.size(), 0.0);
    return state;
}

namespace {

void adam_update(double* p, const double* g, double* m, double* v, std::size_t n,
                 double lr, const AdamConfig& cfg, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        p[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace

void adam_step(EncoderParams* params, const ParamGrads& grads, AdamState* state,
               double lr, const AdamConfig& config) {
    state->t += 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(state->t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(state->t));
    adam_update(params->embedding.data.data(), grads.d_embedding.data.data(),
                state->m_embedding.data.data(), state->v_embedding.data.data(),
                params->embedding.data.size(), lr, config, bc1, bc2);
    adam_update(params->projection.data.data(), grads.d_projection.data.data(),
                state->m_projection.data.data(), state->v_projection.data.data(),
                params->projection.data.size(), lr, config, bc1, bc2);
    adam_update(params->bias.data(), grads.d_bias.data(), state->m_bias.data(),
                state->v_bias.data(), params->bias.size(), lr, config, bc1, bc2);
}

std::string TrainHistory::to_history_jsonl() const {
    std::string out;
    for (const StepRecord& record : steps) {
        nlohmann::ordered_json obj;
        obj["step"] = record.step;
        obj["con"] = record.con;
        obj["tri"] = record.tri;
        obj["neg"] = record.neg;
        obj["total"] = record.total;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

TrainResult train(const std::vector<SixTuple>& records, const Vocab& vocab,
                  const TrainConfig& config, const EvalHook& eval_hook) {
    config.validate();
    if (records.empty()) throw ConfigError("training set is empty");

    // Pre-tokenize the six sentence groups once; group order matches the
    // sextet slots (h, h+, h-, hc, hc+, hc-).
    std::vector<std::array<std::vector<int>, 6>> tokenized(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const SixTuple& r = records[i];
        tokenized[i] = {tokenize(r.premise, vocab),      tokenize(r.entailment, vocab),
                        tokenize(r.contradiction, vocab), tokenize(r.cs_premise, vocab),
                        tokenize(r.cs_entailment, vocab), tokenize(r.cs_contradiction, vocab)};
    }

    TrainResult result;
    result.params = init_params(vocab.size(), config.dim, config.seed, config.init_scale);
    AdamState adam_state = AdamState::zeros_like(result.params);

    long step = 0;
    bool done = false;
    for (int epoch = 0; epoch < config.epochs && !done; ++epoch) {
        auto epoch_start = std::chrono::steady_clock::now();
        auto batches = make_batches(records.size(), static_cast<std::size_t>(config.batch_size),
                                    config.seed, static_cast<std::uint64_t>(epoch));
        for (const std::vector<std::size_t>& batch : batches) {
            const std::size_t n = batch.size();

            std::array<EncodedBatch, 6> encoded;
            RepSextet reps;
            for (int g = 0; g < 6; ++g) {
                std::vector<std::vector<int>> group;
                group.reserve(n);
                for (std::size_t idx : batch) {
                    group.push_back(tokenized[idx][static_cast<std::size_t>(g)]);
                }
                encoded[static_cast<std::size_t>(g)] = encode(group, result.params);
                reps.group(g) = encoded[static_cast<std::size_t>(g)].reps;
            }

            LossBreakdown breakdown = total_loss(reps, config.loss);

            // All six groups flow into the one shared parameter set.
            ParamGrads grads = ParamGrads::zeros_like(result.params);
            for (int g = 0; g < 6; ++g) {
                grads.add(encode_backward(encoded[static_cast<std::size_t>(g)], result.params,
                                          breakdown.grads.grads[static_cast<std::size_t>(g)]));
            }
            // Per-record normalization keeps the learning rate batch-size
            // independent; the logged values use the same scale.
            const double inv_n = 1.0 / static_cast<double>(n);
            grads.scale(inv_n);

            if (config.optimizer == TrainConfig::Optimizer::Sgd) {
                sgd_step(&result.params, grads, config.learning_rate);
            } else {
                adam_step(&result.params, grads, &adam_state, config.learning_rate, config.adam);
            }

            ++step;
            result.history.steps.push_back({step, breakdown.con_sum * inv_n,
                                            breakdown.tri_sum * inv_n, breakdown.neg * inv_n,
                                            breakdown.total * inv_n});
            if (eval_hook && config.eval_every > 0 && step % config.eval_every == 0) {
                result.history.evals.push_back({step, eval_hook(result.params)});
            }
            if (config.max_steps > 0 && step >= config.max_steps) {
                done = true;
                break;
            }
        }
        auto epoch_end = std::chrono::steady_clock::now();
        result.history.epoch_seconds.push_back(
            std::chrono::duration<double>(epoch_end - epoch_start).count());
    }
    return result;
}

}  // namespace concse
