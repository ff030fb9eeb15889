#include "evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json.hpp"
#include "loss.hpp"

namespace concse {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average of ranks i+1..j+1
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

namespace {

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += xs[i];
        mean_y += ys[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mean_x;
        double dy = ys[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ConfigError("correlation undefined for a constant sequence");
    }
    return sxy / std::sqrt(sxx * syy);
}

double sample_mean(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs, double mean) {
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(xs.size() - 1);
}

}  // namespace

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ConfigError("spearman: length mismatch");
    if (xs.size() < 2) throw ConfigError("spearman needs at least 2 points");
    return pearson(average_ranks(xs), average_ranks(ys));
}

double accuracy(const std::vector<int>& preds, const std::vector<int>& golds) {
    if (preds.size() != golds.size()) throw ConfigError("accuracy: length mismatch");
    if (preds.empty()) throw ConfigError("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == golds[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

double f1_binary(const std::vector<int>& preds, const std::vector<int>& golds) {
    if (preds.size() != golds.size()) throw ConfigError("f1: length mismatch");
    if (preds.empty()) throw ConfigError("f1: empty input");
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] != 0 && preds[i] != 1) throw ConfigError("f1: labels must be 0/1");
        if (golds[i] != 0 && golds[i] != 1) throw ConfigError("f1: labels must be 0/1");
        if (preds[i] == 1 && golds[i] == 1) tp += 1.0;
        if (preds[i] == 1 && golds[i] == 0) fp += 1.0;
        if (preds[i] == 0 && golds[i] == 1) fn += 1.0;
    }
    double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double regularized_incomplete_beta(double a, double b, double x) {
    CONCSE_CHECK(a > 0.0 && b > 0.0, "incomplete beta: a, b must be > 0");
    CONCSE_CHECK(x >= 0.0 && x <= 1.0, "incomplete beta: x must be in [0, 1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;

    // Use the symmetry I_x(a,b) = 1 - I_{1-x}(b,a) to keep the continued
    // fraction in its fast-converging region.
    if (x > (a + 1.0) / (a + b + 2.0)) {
        return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);
    }

    const double ln_front = a * std::log(x) + b * std::log(1.0 - x) -
                            (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    const double front = std::exp(ln_front) / a;

    // Lentz's algorithm for the continued fraction.
    const double tiny = 1e-300;
    const double tol = 1e-12;
    double f = 1.0, c = 1.0, d = 0.0;
    for (int i = 0; i <= 500; ++i) {
        int m = i / 2;
        double numerator;
        if (i == 0) {
            numerator = 1.0;
        } else if (i % 2 == 0) {
            numerator = (m * (b - m) * x) / ((a + 2.0 * m - 1.0) * (a + 2.0 * m));
        } else {
            numerator = -((a + m) * (a + b + m) * x) / ((a + 2.0 * m) * (a + 2.0 * m + 1.0));
        }
        d = 1.0 + numerator * d;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        c = 1.0 + numerator / c;
        if (std::abs(c) < tiny) c = tiny;
        double delta = c * d;
        f *= delta;
        if (std::abs(1.0 - delta) < tol) return front * (f - 1.0);
    }
    throw InternalError("incomplete beta continued fraction did not converge");
}

double student_t_two_sided_p(double t, double df) {
    CONCSE_CHECK(df > 0.0, "t distribution needs df > 0");
    double x = df / (df + t * t);
    return regularized_incomplete_beta(df / 2.0, 0.5, x);
}

TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw ConfigError("welch_ttest needs >= 2 samples per side");
    double mean_a = sample_mean(a);
    double mean_b = sample_mean(b);
    double var_a = sample_variance(a, mean_a);
    double var_b = sample_variance(b, mean_b);
    if (var_a == 0.0 && var_b == 0.0) {
        throw ConfigError("welch_ttest: both samples have zero variance");
    }
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    double se2 = var_a / na + var_b / nb;
    double t = (mean_a - mean_b) / std::sqrt(se2);
    double df = se2 * se2 /
                (var_a * var_a / (na * na * (na - 1.0)) + var_b * var_b / (nb * nb * (nb - 1.0)));

    TTestResult result;
    result.t = t;
    result.df = df;
    result.p = t == 0.0 ? 1.0 : student_t_two_sided_p(t, df);
    return result;
}

TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw ConfigError("paired_ttest: length mismatch");
    if (a.size() < 2) throw ConfigError("paired_ttest needs >= 2 pairs");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    double mean = sample_mean(diff);
    double var = sample_variance(diff, mean);
    if (var == 0.0) {
        if (mean == 0.0) throw ConfigError("paired_ttest: zero-variance identical samples");
        throw ConfigError("paired_ttest: zero-variance differences");
    }
    double n = static_cast<double>(diff.size());
    TTestResult result;
    result.t = mean / std::sqrt(var / n);
    result.df = n - 1.0;
    result.p = result.t == 0.0 ? 1.0 : student_t_two_sided_p(result.t, result.df);
    return result;
}

Scenario parse_scenario(const std::string& name) {
    std::string s = ascii_lower(trim(name));
    if (s == "en2en") return Scenario::EN2EN;
    if (s == "en2cs") return Scenario::EN2CS;
    if (s == "cs2cs") return Scenario::CS2CS;
    throw ConfigError("unknown scenario '" + name + "' (expected EN2EN, EN2CS or CS2CS)");
}

const char* to_string(Scenario scenario) {
    switch (scenario) {
        case Scenario::EN2EN: return "EN2EN";
        case Scenario::EN2CS: return "EN2CS";
        case Scenario::CS2CS: return "CS2CS";
    }
    return "Unknown";
}

bool scenario_trains_on_cs(Scenario scenario) { return scenario == Scenario::CS2CS; }

bool scenario_evals_on_cs(Scenario scenario) { return scenario != Scenario::EN2EN; }

EvalReport evaluate_sts(const EncoderParams& params, const Vocab& vocab,
                        const std::vector<PairRecord>& pairs, const StsOptions& options) {
    if (pairs.empty()) throw ConfigError("evaluate_sts: empty pair set");

    std::vector<double> gold;
    std::vector<double> model;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_subset;
    gold.reserve(pairs.size());
    model.reserve(pairs.size());

    for (const PairRecord& pair : pairs) {
        if (pair.target.kind != Target::Kind::Score) {
            throw ConfigError("evaluate_sts requires score targets (record id " + pair.id + ")");
        }
        const std::string* s0 = &pair.sentence0;
        const std::string* s1 = &pair.sentence1;
        if (options.use_cs) {
            if (!pair.has_cs()) {
                throw ConfigError("record " + pair.id + " has no CS fields for a CS scenario");
            }
            s0 = &*pair.cs_sentence0;
            s1 = &*pair.cs_sentence1;
        }
        std::vector<std::vector<int>> ids = {tokenize(*s0, vocab), tokenize(*s1, vocab)};
        EncodedBatch encoded = encode(ids, params);
        double score = cosine_sim(encoded.reps.row(0), encoded.reps.row(1), encoded.reps.cols);
        gold.push_back(pair.target.score);
        model.push_back(score);
        if (pair.subset) {
            by_subset[*pair.subset].first.push_back(pair.target.score);
            by_subset[*pair.subset].second.push_back(score);
        }
    }

    EvalReport report;
    report.scenario = options.scenario;
    report.task = options.task;
    report.metric = "spearman";
    report.value = spearman(model, gold);
    report.seed = options.seed;
    report.n = pairs.size();
    for (const auto& [subset, data] : by_subset) {
        if (data.first.size() >= 2) {
            report.per_subset.emplace_back(subset, spearman(data.second, data.first));
        }
    }
    return report;
}

namespace {

// Projects a sixtuple onto one language side; the trainer always consumes
// all six groups, so the unused side aliases the selected one.
std::vector<SixTuple> project_training_side(const std::vector<SixTuple>& records, bool use_cs) {
    std::vector<SixTuple> projected;
    projected.reserve(records.size());
    for (const SixTuple& r : records) {
        SixTuple p;
        if (use_cs) {
            p.premise = r.cs_premise;
            p.entailment = r.cs_entailment;
            p.contradiction = r.cs_contradiction;
        } else {
            p.premise = r.premise;
            p.entailment = r.entailment;
            p.contradiction = r.contradiction;
        }
        p.cs_premise = p.premise;
        p.cs_entailment = p.entailment;
        p.cs_contradiction = p.contradiction;
        projected.push_back(std::move(p));
    }
    return projected;
}

}  // namespace

std::vector<EvalReport> run_scenarios(const std::vector<SixTuple>& train_records,
                                      const std::vector<PairRecord>& eval_pairs,
                                      const Vocab& vocab, const TrainConfig& config,
                                      const std::vector<Scenario>& scenarios,
                                      const std::string& task) {
    std::vector<EvalReport> reports;
    for (Scenario scenario : scenarios) {
        std::vector<SixTuple> projected =
            project_training_side(train_records, scenario_trains_on_cs(scenario));
        TrainResult trained = train(projected, vocab, config);
        StsOptions options;
        options.use_cs = scenario_evals_on_cs(scenario);
        options.task = task;
        options.scenario = to_string(scenario);
        options.seed = config.seed;
        reports.push_back(evaluate_sts(trained.params, vocab, eval_pairs, options));
    }
    std::stable_sort(reports.begin(), reports.end(),
                     [](const EvalReport& a, const EvalReport& b) {
                         return std::tie(a.scenario, a.task, a.seed) <
                                std::tie(b.scenario, b.task, b.seed);
                     });
    return reports;
}

std::string reports_to_jsonl(const std::vector<EvalReport>& reports) {
    std::string out;
    for (const EvalReport& report : reports) {
        nlohmann::ordered_json obj;
        obj["scenario"] = report.scenario;
        obj["task"] = report.task;
        obj["metric"] = report.metric;
        obj["value"] = report.value;
        obj["seed"] = report.seed;
        obj["n"] = report.n;
        if (!report.per_subset.empty()) {
            nlohmann::ordered_json subsets;
            for (const auto& [name, value] : report.per_subset) subsets[name] = value;
            obj["per_subset"] = subsets;
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace concse
