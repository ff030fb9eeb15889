#ifndef CONCSE_TRAINER_HPP
#define CONCSE_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "encoder.hpp"
#include "loss.hpp"
#include "util.hpp"

namespace concse {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainConfig {
    int epochs = 1;
    int batch_size = 16;
    double learning_rate = 0.01;
    enum class Optimizer { Sgd, Adam };
    Optimizer optimizer = Optimizer::Sgd;
    AdamConfig adam;
    std::uint64_t seed = 0;
    int eval_every = 0;   // steps between eval snapshots; 0 disables
    long max_steps = 0;   // hard cap across epochs; 0 means no cap
    // encoder shape
    std::size_t dim = 16;
    double init_scale = 0.1;
    bool lowercase = true;
    LossConfig loss;

    void validate() const;

    // Key-value run config. Recognized keys: preset, epochs, batch_size,
    // learning_rate, optimizer, adam_beta1, adam_beta2, adam_eps, seed,
    // eval_every, max_steps, dim, init_scale, lowercase, tau, lambda, alpha,
    // enable_con, enable_tri, enable_neg, combinations, align_mode, variant.
    static TrainConfig from_kv(const KvConfig& kv);
    static TrainConfig load(const std::string& path);
    std::vector<std::pair<std::string, std::string>> to_pairs() const;
};

// Known hyperparameter presets. "desk" is the small default; the "paper-*"
// presets record the published fine-tuning settings (batch size 128 or 48,
// learning rate 5e-5 or 1e-5, 5 epochs, Adam).
void apply_preset(const std::string& name, TrainConfig* config);

// Per-epoch seeded shuffle (seed XOR epoch), contiguous batches, final short
// batch kept.
std::vector<std::vector<std::size_t>> make_batches(std::size_t n_records,
                                                   std::size_t batch_size,
                                                   std::uint64_t seed,
                                                   std::uint64_t epoch);

void sgd_step(EncoderParams* params, const ParamGrads& grads, double lr);

struct AdamState {
    Matrix m_embedding, v_embedding;
    Matrix m_projection, v_projection;
    std::vector<double> m_bias, v_bias;
    long t = 0;

    static AdamState zeros_like(const EncoderParams& params);
};

// Bias-corrected Adam: p -= lr * mhat / (sqrt(vhat) + eps).
void adam_step(EncoderParams* params, const ParamGrads& grads, AdamState* state,
               double lr, const AdamConfig& config);

struct StepRecord {
    long step = 0;
    double con = 0.0;
    double tri = 0.0;
    double neg = 0.0;
    double total = 0.0;
};

struct EvalSnapshot {
    long step = 0;
    double value = 0.0;
};

struct TrainHistory {
    std::vector<StepRecord> steps;
    std::vector<EvalSnapshot> evals;
    std::vector<double> epoch_seconds;

    // One JSON object per step with keys step, con, tri, neg, total.
    // Wall-clock and eval snapshots are deliberately not serialized so the
    // emitted history is byte-identical across reruns.
    std::string to_history_jsonl() const;
};

struct TrainResult {
    EncoderParams params;
    TrainHistory history;
};

using EvalHook = std::function<double(const EncoderParams&)>;

// Deterministic mini-batch loop: encodes the six sentence groups of each
// batch through the one shared parameter set, backpropagates the combined
// loss, normalizes gradients by the batch size, and applies the optimizer.
TrainResult train(const std::vector<SixTuple>& records, const Vocab& vocab,
                  const TrainConfig& config, const EvalHook& eval_hook = nullptr);

}  // namespace concse

#endif  // CONCSE_TRAINER_HPP
