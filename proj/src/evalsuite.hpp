#ifndef CONCSE_EVALSUITE_HPP
#define CONCSE_EVALSUITE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "encoder.hpp"
#include "trainer.hpp"
#include "util.hpp"

namespace concse {

// Average ranks (ties get the mean of the tied positions), 1-based.
std::vector<double> average_ranks(const std::vector<double>& values);

// Pearson correlation of average ranks. Constant input is an error.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

double accuracy(const std::vector<int>& preds, const std::vector<int>& golds);

// F1 = 2PR / (P + R), defined as 0 when P + R = 0. Labels are 0/1.
double f1_binary(const std::vector<int>& preds, const std::vector<int>& golds);

// Regularized incomplete beta I_x(a, b) by continued fraction, 1e-12
// convergence tolerance.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with the given degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
};

// Two-sided Welch t-test (unequal variances, Welch-Satterthwaite df).
TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b);

// Paired two-sided t-test on elementwise differences (e.g. per-seed scores).
TTestResult paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

enum class Scenario { EN2EN, EN2CS, CS2CS };

Scenario parse_scenario(const std::string& name);
const char* to_string(Scenario scenario);

// Which text fields a scenario reads: EN2EN trains and evaluates on the
// original sentences; EN2CS trains on the originals and evaluates on the CS
// fields; CS2CS uses the CS fields for both.
bool scenario_trains_on_cs(Scenario scenario);
bool scenario_evals_on_cs(Scenario scenario);

struct EvalReport {
    std::string scenario;
    std::string task;
    std::string metric;
    double value = 0.0;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    // Per-subset values when records carry a subset tag; the headline value
    // is always the single correlation over the concatenation ("all").
    std::vector<std::pair<std::string, double>> per_subset;
};

struct StsOptions {
    bool use_cs = false;
    std::string task = "sts";
    std::string scenario = "EN2EN";
    std::uint64_t seed = 0;
};

// Scores each pair by the cosine of the two sentence representations and
// reports Spearman correlation against the gold scores.
EvalReport evaluate_sts(const EncoderParams& params, const Vocab& vocab,
                        const std::vector<PairRecord>& pairs, const StsOptions& options);

// Trains one model per scenario (same seed everywhere) on the scenario's
// text side and evaluates it on the scenario's evaluation side.
std::vector<EvalReport> run_scenarios(const std::vector<SixTuple>& train_records,
                                      const std::vector<PairRecord>& eval_pairs,
                                      const Vocab& vocab, const TrainConfig& config,
                                      const std::vector<Scenario>& scenarios,
                                      const std::string& task = "sts");

std::string reports_to_jsonl(const std::vector<EvalReport>& reports);

}  // namespace concse

#endif  // CONCSE_EVALSUITE_HPP
