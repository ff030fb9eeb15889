#ifndef CONCSE_LOSS_HPP
#define CONCSE_LOSS_HPP

#include <array>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "util.hpp"

namespace concse {

// Temperature, triplet weight, margin, component toggles and the set of
// anchor/positive/negative combinations the cross losses sum over.
struct LossConfig {
    double tau = 0.05;
    double lambda = 1.2;
    double alpha = 1.0;
    bool enable_con = true;
    bool enable_tri = true;
    bool enable_neg = true;
    // 0-based combination ids (0 = H1 ... 5 = H6), kept sorted and unique.
    std::vector<int> combinations = {0, 1, 2, 3, 4, 5};

    enum class AlignMode { Softmax, Sigmoid };
    AlignMode align_mode = AlignMode::Softmax;

    void validate() const;
};

// "H1".."H6" <-> 0-based ids, as used in run config files.
int parse_combination(const std::string& name);
std::string combination_name(int id);
std::vector<int> parse_combination_list(const std::string& csv);
std::string combination_list_string(const std::vector<int>& ids);

// Named ablation variants: which loss components are enabled.
//   v1: con    v2: tri      v3: con+neg
//   v4: tri+neg v5: con+tri v6: all three
void apply_variant(const std::string& name, LossConfig* config);

// The six N x d representation matrices: (h, h+, h-) for the monolingual
// batch and (hc, hc+, hc-) for its code-switched counterpart.
struct RepSextet {
    Matrix h;
    Matrix h_pos;
    Matrix h_neg;
    Matrix hc;
    Matrix hc_pos;
    Matrix hc_neg;

    std::size_t batch() const { return h.rows; }
    std::size_t dim() const { return h.cols; }
    const Matrix& group(int slot) const;
    Matrix& group(int slot);
    void validate() const;
};

// Gradients with respect to the six matrices, in slot order.
struct SextetGrads {
    std::array<Matrix, 6> grads;

    static SextetGrads zeros_like(const RepSextet& reps);
};

// Which sextet slots a combination draws its anchor/positive/negative from.
struct ComboSlots {
    int anchor;
    int positive;
    int negative;
};
ComboSlots combo_slots(int combination);

double cosine_sim(const double* u, const double* v, std::size_t d);
double cosine_sim(const std::vector<double>& u, const std::vector<double>& v);

struct TermGrads {
    Matrix d_anchor;
    Matrix d_positive;
    Matrix d_negative;
};

// InfoNCE with hard negatives, summed (not averaged) over the batch:
//   sum_i -log( e^{s(a_i,p_i)/tau} / sum_j (e^{s(a_i,p_j)/tau} + e^{s(a_i,n_j)/tau}) )
// The denominator keeps the j = i positive term.
double contrastive_term(const Matrix& anchors, const Matrix& positives,
                        const Matrix& negatives, double tau,
                        TermGrads* grads = nullptr);

// Hinge on squared Euclidean distances, summed over the batch:
//   sum_i max(0, ||a_i - p_i||^2 - ||a_i - n_i||^2 + alpha)
// Subgradient at the kink is 0.
double triplet_term(const Matrix& anchors, const Matrix& positives,
                    const Matrix& negatives, double alpha,
                    TermGrads* grads = nullptr);

struct PairGrads {
    Matrix d_a;
    Matrix d_b;
};

// Pulls the two negative groups together. Softmax mode is row-wise
// cross-entropy over the N x N similarity matrix with diagonal targets;
// sigmoid mode is pointwise -log(sigmoid(s_ii / tau)).
double align_negative(const Matrix& h_neg, const Matrix& hc_neg, double tau,
                      LossConfig::AlignMode mode = LossConfig::AlignMode::Softmax,
                      PairGrads* grads = nullptr);

// Sums of the per-combination terms over config.combinations. Matrices used
// by several combinations receive summed gradients. per_combination, when
// given, receives one entry per combination id (zeros for ids not enabled).
double cross_contrastive(const RepSextet& reps, const LossConfig& config,
                         SextetGrads* grads = nullptr,
                         std::array<double, 6>* per_combination = nullptr);
double cross_triplet(const RepSextet& reps, const LossConfig& config,
                     SextetGrads* grads = nullptr,
                     std::array<double, 6>* per_combination = nullptr);

struct LossBreakdown {
    std::array<double, 6> con_per_combination{};
    std::array<double, 6> tri_per_combination{};
    double con_sum = 0.0;
    double tri_sum = 0.0;
    double neg = 0.0;
    double total = 0.0;
    SextetGrads grads;
};

// total = con + lambda * tri + neg over the enabled components; disabled
// components contribute zero to both value and gradients.
LossBreakdown total_loss(const RepSextet& reps, const LossConfig& config);

}  // namespace concse

#endif  // CONCSE_LOSS_HPP
