#include "loss.hpp"

#include <algorithm>
#include <cmath>

namespace concse {

void LossConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (!enable_con && !enable_tri && !enable_neg) {
        throw ConfigError("at least one loss component must be enabled");
    }
    if (combinations.empty()) throw ConfigError("combination set must be nonempty");
    for (std::size_t i = 0; i < combinations.size(); ++i) {
        if (combinations[i] < 0 || combinations[i] > 5) {
            throw ConfigError("combination ids must be H1..H6");
        }
        if (i > 0 && combinations[i] <= combinations[i - 1]) {
            throw ConfigError("combination ids must be sorted and unique");
        }
    }
}

int parse_combination(const std::string& name) {
    std::string n = ascii_lower(trim(name));
    if (n.size() == 2 && n[0] == 'h' && n[1] >= '1' && n[1] <= '6') {
        return n[1] - '1';
    }
    throw ConfigError("unknown combination '" + name + "' (expected H1..H6)");
}

std::string combination_name(int id) {
    CONCSE_CHECK(id >= 0 && id <= 5, "combination id out of range");
    return "H" + std::to_string(id + 1);
}

std::vector<int> parse_combination_list(const std::string& csv) {
    std::vector<int> ids;
    for (const std::string& part : split_char(csv, ',')) {
        if (trim(part).empty()) continue;
        ids.push_back(parse_combination(part));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw ConfigError("empty combination list");
    return ids;
}

std::string combination_list_string(const std::vector<int>& ids) {
    std::vector<std::string> names;
    names.reserve(ids.size());
    for (int id : ids) names.push_back(combination_name(id));
    return join(names, ",");
}

void apply_variant(const std::string& name, LossConfig* config) {
    std::string v = ascii_lower(trim(name));
    if (v == "v1") {
        config->enable_con = true;  config->enable_tri = false; config->enable_neg = false;
    } else if (v == "v2") {
        config->enable_con = false; config->enable_tri = true;  config->enable_neg = false;
    } else if (v == "v3") {
        config->enable_con = true;  config->enable_tri = false; config->enable_neg = true;
    } else if (v == "v4") {
        config->enable_con = false; config->enable_tri = true;  config->enable_neg = true;
    } else if (v == "v5") {
        config->enable_con = true;  config->enable_tri = true;  config->enable_neg = false;
    } else if (v == "v6") {
        config->enable_con = true;  config->enable_tri = true;  config->enable_neg = true;
    } else {
        throw ConfigError("unknown loss variant '" + name + "' (expected v1..v6)");
    }
}

const Matrix& RepSextet::group(int slot) const {
    switch (slot) {
        case 0: return h;
        case 1: return h_pos;
        case 2: return h_neg;
        case 3: return hc;
        case 4: return hc_pos;
        case 5: return hc_neg;
    }
    throw InternalError("sextet slot out of range");
}

Matrix& RepSextet::group(int slot) {
    return const_cast<Matrix&>(static_cast<const RepSextet&>(*this).group(slot));
}

void RepSextet::validate() const {
    for (int slot = 1; slot < 6; ++slot) {
        CONCSE_CHECK(group(slot).rows == h.rows && group(slot).cols == h.cols,
                     "sextet matrices must share one N x d shape");
    }
    CONCSE_CHECK(h.rows >= 1 && h.cols >= 1, "sextet must be nonempty");
    for (int slot = 0; slot < 6; ++slot) {
        for (double v : group(slot).data) {
            CONCSE_CHECK(std::isfinite(v), "sextet entries must be finite");
        }
    }
}

SextetGrads SextetGrads::zeros_like(const RepSextet& reps) {
    SextetGrads out;
    for (int slot = 0; slot < 6; ++slot) {
        out.grads[static_cast<std::size_t>(slot)] = Matrix(reps.batch(), reps.dim());
    }
    return out;
}

ComboSlots combo_slots(int combination) {
    // (anchor, positive, negative) per combination:
    //   H1 (h, h+, h-)    H2 (hc, hc+, hc-)  H3 (h, h+, hc-)
    //   H4 (hc, hc+, h-)  H5 (h, hc, h-)     H6 (h+, hc+, hc-)
    static constexpr ComboSlots kTable[6] = {
        {0, 1, 2}, {3, 4, 5}, {0, 1, 5}, {3, 4, 2}, {0, 3, 2}, {1, 4, 5},
    };
    CONCSE_CHECK(combination >= 0 && combination <= 5, "combination id out of range");
    return kTable[combination];
}

namespace {

double norm(const double* u, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += u[k] * u[k];
    return std::sqrt(s);
}

double dot(const double* u, const double* v, std::size_t d) {
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += u[k] * v[k];
    return s;
}

// Accumulates the gradient of `weight * cos(u, v)` into du and dv.
void cosine_backward(const double* u, const double* v, std::size_t d,
                     double nu, double nv, double cos_uv, double weight,
                     double* du, double* dv) {
    const double inv_uv = 1.0 / (nu * nv);
    const double inv_uu = cos_uv / (nu * nu);
    const double inv_vv = cos_uv / (nv * nv);
    for (std::size_t k = 0; k < d; ++k) {
        du[k] += weight * (v[k] * inv_uv - u[k] * inv_uu);
        dv[k] += weight * (u[k] * inv_uv - v[k] * inv_vv);
    }
}

std::vector<double> row_norms(const Matrix& m, const char* what) {
    std::vector<double> norms(m.rows);
    for (std::size_t i = 0; i < m.rows; ++i) {
        norms[i] = norm(m.row(i), m.cols);
        if (norms[i] == 0.0) {
            throw InternalError(std::string("zero-norm row in ") + what);
        }
    }
    return norms;
}

}  // namespace

double cosine_sim(const double* u, const double* v, std::size_t d) {
    double nu = norm(u, d);
    double nv = norm(v, d);
    if (nu == 0.0 || nv == 0.0) throw InternalError("cosine_sim: zero-norm input");
    return dot(u, v, d) / (nu * nv);
}

double cosine_sim(const std::vector<double>& u, const std::vector<double>& v) {
    CONCSE_CHECK(u.size() == v.size(), "cosine_sim: dimension mismatch");
    return cosine_sim(u.data(), v.data(), u.size());
}

double contrastive_term(const Matrix& anchors, const Matrix& positives,
                        const Matrix& negatives, double tau, TermGrads* grads) {
    CONCSE_CHECK(anchors.same_shape(positives) && anchors.same_shape(negatives),
                 "contrastive_term: shape mismatch");
    const std::size_t n = anchors.rows;
    const std::size_t d = anchors.cols;
    CONCSE_CHECK(n >= 1, "contrastive_term: empty batch");

    std::vector<double> na = row_norms(anchors, "anchors");
    std::vector<double> np = row_norms(positives, "positives");
    std::vector<double> nn = row_norms(negatives, "negatives");

    if (grads) {
        grads->d_anchor = Matrix(n, d);
        grads->d_positive = Matrix(n, d);
        grads->d_negative = Matrix(n, d);
    }

    Matrix sim_pos(n, n);
    Matrix sim_neg(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sim_pos.at(i, j) = dot(anchors.row(i), positives.row(j), d) / (na[i] * np[j]);
            sim_neg.at(i, j) = dot(anchors.row(i), negatives.row(j), d) / (na[i] * nn[j]);
        }
    }

    double value = 0.0;
    std::vector<double> w_pos(n), w_neg(n);
    for (std::size_t i = 0; i < n; ++i) {
        // log-sum-exp over the 2N denominator terms
        double max_x = sim_pos.at(i, 0) / tau;
        for (std::size_t j = 0; j < n; ++j) {
            max_x = std::max(max_x, sim_pos.at(i, j) / tau);
            max_x = std::max(max_x, sim_neg.at(i, j) / tau);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w_pos[j] = std::exp(sim_pos.at(i, j) / tau - max_x);
            w_neg[j] = std::exp(sim_neg.at(i, j) / tau - max_x);
            z += w_pos[j] + w_neg[j];
        }
        value += -sim_pos.at(i, i) / tau + max_x + std::log(z);

        if (!grads) continue;
        for (std::size_t j = 0; j < n; ++j) {
            // d value / d sim = (softmax weight - [j == i and positive]) / tau
            double g_pos = (w_pos[j] / z - (j == i ? 1.0 : 0.0)) / tau;
            double g_neg = (w_neg[j] / z) / tau;
            if (g_pos != 0.0) {
                cosine_backward(anchors.row(i), positives.row(j), d, na[i], np[j],
                                sim_pos.at(i, j), g_pos,
                                grads->d_anchor.row(i), grads->d_positive.row(j));
            }
            cosine_backward(anchors.row(i), negatives.row(j), d, na[i], nn[j],
                            sim_neg.at(i, j), g_neg,
                            grads->d_anchor.row(i), grads->d_negative.row(j));
        }
    }
    return value;
}

double triplet_term(const Matrix& anchors, const Matrix& positives,
                    const Matrix& negatives, double alpha, TermGrads* grads) {
    CONCSE_CHECK(anchors.same_shape(positives) && anchors.same_shape(negatives),
                 "triplet_term: shape mismatch");
    const std::size_t n = anchors.rows;
    const std::size_t d = anchors.cols;

    if (grads) {
        grads->d_anchor = Matrix(n, d);
        grads->d_positive = Matrix(n, d);
        grads->d_negative = Matrix(n, d);
    }

    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = anchors.row(i);
        const double* p = positives.row(i);
        const double* q = negatives.row(i);
        double dist_pos = 0.0;
        double dist_neg = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double dp = a[k] - p[k];
            double dn = a[k] - q[k];
            dist_pos += dp * dp;
            dist_neg += dn * dn;
        }
        double hinge = dist_pos - dist_neg + alpha;
        if (hinge <= 0.0) continue;
        value += hinge;
        if (!grads) continue;
        double* da = grads->d_anchor.row(i);
        double* dp = grads->d_positive.row(i);
        double* dq = grads->d_negative.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            da[k] += 2.0 * (q[k] - p[k]);
            dp[k] += 2.0 * (p[k] - a[k]);
            dq[k] += 2.0 * (a[k] - q[k]);
        }
    }
    return value;
}

double align_negative(const Matrix& h_neg, const Matrix& hc_neg, double tau,
                      LossConfig::AlignMode mode, PairGrads* grads) {
    CONCSE_CHECK(h_neg.same_shape(hc_neg), "align_negative: shape mismatch");
    const std::size_t n = h_neg.rows;
    const std::size_t d = h_neg.cols;
    CONCSE_CHECK(n >= 1, "align_negative: empty batch");

    std::vector<double> nu = row_norms(h_neg, "negatives");
    std::vector<double> nv = row_norms(hc_neg, "cs negatives");

    if (grads) {
        grads->d_a = Matrix(n, d);
        grads->d_b = Matrix(n, d);
    }

    double value = 0.0;
    if (mode == LossConfig::AlignMode::Sigmoid) {
        for (std::size_t i = 0; i < n; ++i) {
            double sim = dot(h_neg.row(i), hc_neg.row(i), d) / (nu[i] * nv[i]);
            double x = sim / tau;
            // -log sigmoid(x) = softplus(-x), computed stably
            value += std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
            if (!grads) continue;
            double g = -1.0 / (1.0 + std::exp(x)) / tau;  // -sigmoid(-x) / tau
            cosine_backward(h_neg.row(i), hc_neg.row(i), d, nu[i], nv[i], sim, g,
                            grads->d_a.row(i), grads->d_b.row(i));
        }
        return value;
    }

    Matrix sim(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sim.at(i, j) = dot(h_neg.row(i), hc_neg.row(j), d) / (nu[i] * nv[j]);
        }
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        double max_x = sim.at(i, 0) / tau;
        for (std::size_t j = 1; j < n; ++j) max_x = std::max(max_x, sim.at(i, j) / tau);
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            w[j] = std::exp(sim.at(i, j) / tau - max_x);
            z += w[j];
        }
        value += -sim.at(i, i) / tau + max_x + std::log(z);
        if (!grads) continue;
        for (std::size_t j = 0; j < n; ++j) {
            double g = (w[j] / z - (j == i ? 1.0 : 0.0)) / tau;
            if (g == 0.0) continue;
            cosine_backward(h_neg.row(i), hc_neg.row(j), d, nu[i], nv[j],
                            sim.at(i, j), g, grads->d_a.row(i), grads->d_b.row(j));
        }
    }
    return value;
}

namespace {

// Shared driver for the two cross losses: evaluates the per-combination term
// in ascending combination order and accumulates gradients (scaled by
// `weight`) into the sextet slots the combination reads from.
template <typename TermFn>
double cross_loss(const RepSextet& reps, const LossConfig& config, TermFn&& term,
                  double weight, SextetGrads* grads,
                  std::array<double, 6>* per_combination) {
    if (per_combination) per_combination->fill(0.0);
    double value = 0.0;
    for (int k : config.combinations) {
        ComboSlots slots = combo_slots(k);
        TermGrads term_grads;
        double term_value = term(reps.group(slots.anchor), reps.group(slots.positive),
                                 reps.group(slots.negative), grads ? &term_grads : nullptr);
        value += term_value;
        if (per_combination) (*per_combination)[static_cast<std::size_t>(k)] = term_value;
        if (grads) {
            grads->grads[static_cast<std::size_t>(slots.anchor)]
                .add_scaled(term_grads.d_anchor, weight);
            grads->grads[static_cast<std::size_t>(slots.positive)]
                .add_scaled(term_grads.d_positive, weight);
            grads->grads[static_cast<std::size_t>(slots.negative)]
                .add_scaled(term_grads.d_negative, weight);
        }
    }
    return value;
}

}  // namespace

double cross_contrastive(const RepSextet& reps, const LossConfig& config,
                         SextetGrads* grads, std::array<double, 6>* per_combination) {
    config.validate();
    return cross_loss(
        reps, config,
        [&](const Matrix& a, const Matrix& p, const Matrix& n, TermGrads* g) {
            return contrastive_term(a, p, n, config.tau, g);
        },
        1.0, grads, per_combination);
}

double cross_triplet(const RepSextet& reps, const LossConfig& config,
                     SextetGrads* grads, std::array<double, 6>* per_combination) {
    config.validate();
    return cross_loss(
        reps, config,
        [&](const Matrix& a, const Matrix& p, const Matrix& n, TermGrads* g) {
            return triplet_term(a, p, n, config.alpha, g);
        },
        1.0, grads, per_combination);
}

LossBreakdown total_loss(const RepSextet& reps, const LossConfig& config) {
    config.validate();
    reps.validate();

    LossBreakdown breakdown;
    breakdown.grads = SextetGrads::zeros_like(reps);

    if (config.enable_con) {
        breakdown.con_sum = cross_loss(
            reps, config,
            [&](const Matrix& a, const Matrix& p, const Matrix& n, TermGrads* g) {
                return contrastive_term(a, p, n, config.tau, g);
            },
            1.0, &breakdown.grads, &breakdown.con_per_combination);
    }
    if (config.enable_tri) {
        breakdown.tri_sum = cross_loss(
            reps, config,
            [&](const Matrix& a, const Matrix& p, const Matrix& n, TermGrads* g) {
                return triplet_term(a, p, n, config.alpha, g);
            },
            config.lambda, &breakdown.grads, &breakdown.tri_per_combination);
    }
    if (config.enable_neg) {
        PairGrads pair_grads;
        breakdown.neg = align_negative(reps.h_neg, reps.hc_neg, config.tau,
                                       config.align_mode, &pair_grads);
        breakdown.grads.grads[2].add_scaled(pair_grads.d_a, 1.0);
        breakdown.grads.grads[5].add_scaled(pair_grads.d_b, 1.0);
    }

    breakdown.total = breakdown.con_sum + config.lambda * breakdown.tri_sum + breakdown.neg;
    return breakdown;
}

}  // namespace concse
