// Acceptance suite. Runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion; the process exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "augment.hpp"
#include "corpus.hpp"
#include "encoder.hpp"
#include "evalsuite.hpp"
#include "json.hpp"
#include "loss.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"
#include "temp_dir.hpp"
#include "trainer.hpp"
#include "treebank.hpp"
#include "util.hpp"

using namespace concse;
using namespace concse::testing;

namespace {

struct Criterion {
    int number;
    std::string title;
    std::function<void(std::string* detail)> body;
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition) throw Failure(message);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------- shared fixtures ----------

const char* kFig1Tree =
    "(S (NP (DT The) (NN movie)) (VP (VBD was) (ADJP (RB very) (JJ dull))))";
const char* kKoreanMovie = "\xec\x98\x81\xed\x99\x94";  // the fixture target phrase

// Training configuration for the synthetic end-to-end runs: the loss
// hyperparameters tau = 0.05, lambda = 1.2, alpha = 1 are pinned; the
// optimizer settings are the desk-scale choices.
TrainConfig synthetic_config(std::uint64_t seed) {
    TrainConfig config;
    config.epochs = 1000;  // the step cap is the effective limit
    config.max_steps = 1500;
    config.batch_size = 32;
    config.learning_rate = 0.02;
    config.optimizer = TrainConfig::Optimizer::Adam;
    config.seed = seed;
    config.dim = 32;
    config.init_scale = 0.1;
    config.loss.tau = 0.05;
    config.loss.lambda = 1.2;
    config.loss.alpha = 1.0;
    return config;
}

TrainConfig baseline_config(std::uint64_t seed) {
    TrainConfig config = synthetic_config(seed);
    config.loss.combinations = {0};  // H1 only
    config.loss.enable_tri = false;
    config.loss.enable_neg = false;
    return config;
}

SynthConfig acceptance_synth(std::uint64_t seed) {
    SynthConfig synth;
    synth.seed = seed;
    synth.n_concepts = 200;
    synth.n_tuples = 500;
    synth.n_eval_pairs = 100;
    return synth;
}

// ---------- gradient machinery ----------

struct FdReport {
    double worst = 0.0;
    int instances = 0;
};

// Checks one loss function: FD over every entry of the listed matrices
// against the analytic gradient, compared by vector-norm relative error.
template <typename ValueFn>
void check_gradients(FdReport* report, std::vector<Matrix*> inputs,
                     const std::vector<const Matrix*>& analytic, ValueFn&& value) {
    const double step = 1e-5;
    std::vector<double> fd;
    std::vector<double> an;
    for (Matrix* input : inputs) {
        for (double& slot : input->data) {
            fd.push_back(central_difference(&slot, step, value));
        }
    }
    for (const Matrix* grad : analytic) {
        for (double v : grad->data) an.push_back(v);
    }
    double err = gradient_relative_error(an, fd);
    report->worst = std::max(report->worst, err);
    report->instances += 1;
    require(err <= 1e-4, "gradient relative error " + format_double(err) + " > 1e-4");
}

bool triplet_hinges_near_kink(const RepSextet& reps, const LossConfig& cfg) {
    for (int k : cfg.combinations) {
        ComboSlots slots = combo_slots(k);
        const Matrix& a = reps.group(slots.anchor);
        const Matrix& p = reps.group(slots.positive);
        const Matrix& n = reps.group(slots.negative);
        for (std::size_t i = 0; i < a.rows; ++i) {
            double dp = 0.0, dn = 0.0;
            for (std::size_t c = 0; c < a.cols; ++c) {
                dp += (a.at(i, c) - p.at(i, c)) * (a.at(i, c) - p.at(i, c));
                dn += (a.at(i, c) - n.at(i, c)) * (a.at(i, c) - n.at(i, c));
            }
            if (std::abs(dp - dn + cfg.alpha) < 1e-3) return true;
        }
    }
    return false;
}

RepSextet sample_sextet_away_from_kinks(Rng& rng, std::size_t n, std::size_t d,
                                        const LossConfig& cfg) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        RepSextet reps = random_sextet(rng, n, d);
        if (!triplet_hinges_near_kink(reps, cfg)) return reps;
    }
    throw Failure("could not sample a sextet away from hinge kinks");
}

// ---------- CLI helpers ----------

#ifndef CONCSE_CLI_PATH
#define CONCSE_CLI_PATH "concse"
#endif

int run_cli(const std::string& arguments, const std::string& log_path) {
    std::string command = std::string(CONCSE_CLI_PATH) + " " + arguments + " > " +
                          log_path + " 2>&1";
    int raw = std::system(command.c_str());
    if (raw == -1) return -1;
    return WEXITSTATUS(raw);
}

// ---------- criteria ----------

void criterion_gradient_suite(std::string* detail) {
    auto start = std::chrono::steady_clock::now();
    Rng rng(20240101);
    const std::size_t batch_sizes[] = {1, 2, 4};
    const std::size_t dims[] = {3, 8};
    const double taus[] = {0.05, 0.2, 1.0};

    FdReport contrastive_report, triplet_report, align_report;
    FdReport cross_con_report, cross_tri_report, total_report, encoder_report;

    for (std::size_t n : batch_sizes) {
        for (std::size_t d : dims) {
            for (int instance = 0; instance < 4; ++instance) {
                double tau = taus[uniform_index(rng, 3)];
                double alpha = uniform_range(rng, 0.2, 1.5);
                LossConfig cfg;
                cfg.tau = tau;
                cfg.lambda = uniform_range(rng, 0.5, 2.0);
                cfg.alpha = alpha;

                // contrastive_term
                {
                    Matrix a = random_matrix(rng, n, d);
                    Matrix p = random_matrix(rng, n, d);
                    Matrix q = random_matrix(rng, n, d);
                    TermGrads grads;
                    contrastive_term(a, p, q, tau, &grads);
                    check_gradients(&contrastive_report, {&a, &p, &q},
                                    {&grads.d_anchor, &grads.d_positive, &grads.d_negative},
                                    [&]() { return contrastive_term(a, p, q, tau); });
                }
                // triplet_term (sampled away from the hinge kink, where the
                // central difference straddles the nondifferentiable point)
                {
                    LossConfig one = cfg;
                    one.combinations = {0};
                    RepSextet reps = sample_sextet_away_from_kinks(rng, n, d, one);
                    Matrix a = reps.h, p = reps.h_pos, q = reps.h_neg;
                    TermGrads grads;
                    triplet_term(a, p, q, alpha, &grads);
                    check_gradients(&triplet_report, {&a, &p, &q},
                                    {&grads.d_anchor, &grads.d_positive, &grads.d_negative},
                                    [&]() { return triplet_term(a, p, q, alpha); });
                }
                // align_negative
                {
                    Matrix u = random_matrix(rng, n, d);
                    Matrix v = random_matrix(rng, n, d);
                    PairGrads grads;
                    align_negative(u, v, tau, LossConfig::AlignMode::Softmax, &grads);
                    check_gradients(&align_report, {&u, &v}, {&grads.d_a, &grads.d_b},
                                    [&]() {
                                        return align_negative(u, v, tau,
                                                              LossConfig::AlignMode::Softmax);
                                    });
                }
                // cross_contrastive
                {
                    RepSextet reps = random_sextet(rng, n, d);
                    SextetGrads grads = SextetGrads::zeros_like(reps);
                    cross_contrastive(reps, cfg, &grads);
                    std::vector<Matrix*> inputs;
                    std::vector<const Matrix*> analytic;
                    for (int slot = 0; slot < 6; ++slot) {
                        inputs.push_back(&reps.group(slot));
                        analytic.push_back(&grads.grads[static_cast<std::size_t>(slot)]);
                    }
                    check_gradients(&cross_con_report, inputs, analytic,
                                    [&]() { return cross_contrastive(reps, cfg); });
                }
                // cross_triplet
                {
                    RepSextet reps = sample_sextet_away_from_kinks(rng, n, d, cfg);
                    SextetGrads grads = SextetGrads::zeros_like(reps);
                    cross_triplet(reps, cfg, &grads);
                    std::vector<Matrix*> inputs;
                    std::vector<const Matrix*> analytic;
                    for (int slot = 0; slot < 6; ++slot) {
                        inputs.push_back(&reps.group(slot));
                        analytic.push_back(&grads.grads[static_cast<std::size_t>(slot)]);
                    }
                    check_gradients(&cross_tri_report, inputs, analytic,
                                    [&]() { return cross_triplet(reps, cfg); });
                }
                // total_loss, full v6
                {
                    RepSextet reps = sample_sextet_away_from_kinks(rng, n, d, cfg);
                    LossBreakdown breakdown = total_loss(reps, cfg);
                    std::vector<Matrix*> inputs;
                    std::vector<const Matrix*> analytic;
                    for (int slot = 0; slot < 6; ++slot) {
                        inputs.push_back(&reps.group(slot));
                        analytic.push_back(&breakdown.grads.grads[static_cast<std::size_t>(slot)]);
                    }
                    check_gradients(&total_report, inputs, analytic,
                                    [&]() { return total_loss(reps, cfg).total; });
                }
                // encode_backward
                {
                    std::size_t vocab_size = 5 + uniform_index(rng, 5);
                    EncoderParams params = init_params(vocab_size, d, rng(), 0.4);
                    std::vector<std::vector<int>> batch;
                    for (std::size_t i = 0; i < n; ++i) {
                        std::vector<int> ids;
                        std::size_t len = 1 + uniform_index(rng, 5);
                        for (std::size_t t = 0; t < len; ++t) {
                            ids.push_back(static_cast<int>(uniform_index(rng, vocab_size)));
                        }
                        batch.push_back(ids);
                    }
                    Matrix upstream = random_matrix(rng, n, d);
                    auto value = [&]() {
                        EncodedBatch encoded = encode(batch, params);
                        double total = 0.0;
                        for (std::size_t i = 0; i < encoded.reps.data.size(); ++i) {
                            total += upstream.data[i] * encoded.reps.data[i];
                        }
                        return total;
                    };
                    EncodedBatch encoded = encode(batch, params);
                    ParamGrads grads = encode_backward(encoded, params, upstream);

                    const double step = 1e-5;
                    std::vector<double> fd;
                    std::vector<double> an;
                    for (double& slot : params.embedding.data) {
                        fd.push_back(central_difference(&slot, step, value));
                    }
                    for (double& slot : params.projection.data) {
                        fd.push_back(central_difference(&slot, step, value));
                    }
                    for (double& slot : params.bias) {
                        fd.push_back(central_difference(&slot, step, value));
                    }
                    for (double v : grads.d_embedding.data) an.push_back(v);
                    for (double v : grads.d_projection.data) an.push_back(v);
                    for (double v : grads.d_bias) an.push_back(v);
                    double err = gradient_relative_error(an, fd);
                    encoder_report.worst = std::max(encoder_report.worst, err);
                    encoder_report.instances += 1;
                    require(err <= 1e-4,
                            "encode_backward relative error " + format_double(err));
                }
            }
        }
    }

    for (const FdReport* report :
         {&contrastive_report, &triplet_report, &align_report, &cross_con_report,
          &cross_tri_report, &total_report, &encoder_report}) {
        require(report->instances >= 20, "needs >= 20 instances per function");
    }
    double elapsed = seconds_since(start);
    require(elapsed < 60.0, "gradient suite exceeded 1 minute");
    std::ostringstream out;
    out << "7 functions x 24 instances, worst rel err "
        << format_double(std::max({contrastive_report.worst, triplet_report.worst,
                                   align_report.worst, cross_con_report.worst,
                                   cross_tri_report.worst, total_report.worst,
                                   encoder_report.worst}))
        << ", " << format_double(elapsed) << "s";
    *detail = out.str();
}

void criterion_oracle_equivalence(std::string* detail) {
    Rng rng(20240202);
    double worst = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        std::size_t n = 1 + uniform_index(rng, 4);
        std::size_t d = 3 + uniform_index(rng, 6);
        double tau = uniform_range(rng, 0.05, 1.0);
        double alpha = uniform_range(rng, 0.0, 2.0);
        LossConfig cfg;
        cfg.tau = tau;
        cfg.lambda = uniform_range(rng, 0.0, 2.0);
        cfg.alpha = alpha;

        RepSextet reps = random_sextet(rng, n, d);
        auto check = [&](double vectorized, double naive, const char* what) {
            double err = std::abs(vectorized - naive);
            worst = std::max(worst, err);
            require(err <= 1e-10, std::string(what) + " differs from the naive loop by " +
                                      format_double(err));
        };
        check(contrastive_term(reps.h, reps.h_pos, reps.h_neg, tau),
              oracle_contrastive(reps.h, reps.h_pos, reps.h_neg, tau), "contrastive_term");
        check(triplet_term(reps.h, reps.h_pos, reps.h_neg, alpha),
              oracle_triplet(reps.h, reps.h_pos, reps.h_neg, alpha), "triplet_term");
        check(align_negative(reps.h_neg, reps.hc_neg, tau),
              oracle_align_softmax(reps.h_neg, reps.hc_neg, tau), "align_negative");
        check(cross_contrastive(reps, cfg),
              oracle_cross_contrastive(reps, cfg.combinations, tau), "cross_contrastive");
        check(cross_triplet(reps, cfg), oracle_cross_triplet(reps, cfg.combinations, alpha),
              "cross_triplet");
        check(total_loss(reps, cfg).total, oracle_total(reps, cfg), "total_loss");
    }
    *detail = "6 losses x 100 instances, worst abs diff " + format_double(worst);
}

void criterion_baseline_equivalence(std::string* detail) {
    Rng rng(20240303);
    double worst = 0.0;
    for (int instance = 0; instance < 50; ++instance) {
        std::size_t n = 1 + uniform_index(rng, 4);
        std::size_t d = 3 + uniform_index(rng, 6);
        RepSextet reps = random_sextet(rng, n, d);
        LossConfig cfg;
        cfg.tau = uniform_range(rng, 0.05, 1.0);
        cfg.combinations = {0};
        cfg.enable_tri = false;
        cfg.enable_neg = false;

        double ours = total_loss(reps, cfg).total;
        double simcse = oracle_contrastive(reps.h, reps.h_pos, reps.h_neg, cfg.tau);
        double err = std::abs(ours - simcse);
        worst = std::max(worst, err);
        require(err <= 1e-10, "baseline restriction differs by " + format_double(err));
    }
    *detail = "H1-only total equals the supervised objective, worst abs diff " +
              format_double(worst);
}

void criterion_additivity(std::string* detail) {
    Rng rng(20240404);
    for (int instance = 0; instance < 50; ++instance) {
        std::size_t n = 1 + uniform_index(rng, 4);
        std::size_t d = 3 + uniform_index(rng, 6);
        RepSextet reps = random_sextet(rng, n, d);
        LossConfig cfg;
        cfg.tau = uniform_range(rng, 0.05, 1.0);
        cfg.alpha = uniform_range(rng, 0.0, 2.0);

        double con_sum = 0.0;
        double tri_sum = 0.0;
        for (int k = 0; k < 6; ++k) {
            ComboSlots slots = combo_slots(k);
            con_sum += contrastive_term(reps.group(slots.anchor), reps.group(slots.positive),
                                        reps.group(slots.negative), cfg.tau);
            tri_sum += triplet_term(reps.group(slots.anchor), reps.group(slots.positive),
                                    reps.group(slots.negative), cfg.alpha);
        }
        require(cross_contrastive(reps, cfg) == con_sum,
                "cross_contrastive != sum of six terms under fixed order");
        require(cross_triplet(reps, cfg) == tri_sum,
                "cross_triplet != sum of six terms under fixed order");
    }
    *detail = "exact equality with the six-term sums on 50 instances";
}

void criterion_augmentation_fixtures(std::string* detail) {
    TempDir dir;
    write_file(dir.file("dict.tsv"), std::string("The movie\t") + kKoreanMovie + "\n");

    // library-level fixture
    {
        auto backend = dictionary_backend(dir.file("dict.tsv"));
        ParseTree tree = parse_bracketed(kFig1Tree);
        auto plan = select_switch_spans(tree);
        require(std::holds_alternative<SwitchPlan>(plan), "fixture tree must be accepted");
        auto outcome =
            apply_switch(tree, std::get<SwitchPlan>(plan), *backend, AugmentPolicy{});
        require(std::holds_alternative<CSOutcome>(outcome), "fixture must translate");
        require(std::get<CSOutcome>(outcome).cs_text ==
                    std::string(kKoreanMovie) + " was very dull",
                "expected exactly the published code-switched sentence");
    }
    // rejection fixtures
    {
        auto whole = select_switch_spans(parse_bracketed("(NP (DT The) (NN movie))"));
        require(std::holds_alternative<Rejection>(whole) &&
                    std::get<Rejection>(whole).reason == RejectReason::WholeSentenceNP,
                "whole-sentence NP fixture must reject with WholeSentenceNP");

        auto pronoun = select_switch_spans(parse_bracketed(
            "(S (NP (PRP It)) (VP (VBZ is) (NP (DT a) (JJ good) (NN movie))))"));
        require(std::holds_alternative<SwitchPlan>(pronoun),
                "pronoun-descent fixture must select the subsequent NP");
        const SwitchPlan& plan = std::get<SwitchPlan>(pronoun);
        require(plan.spans.size() == 1 && plan.spans[0].start == 2 && plan.spans[0].end == 5,
                "pronoun-descent fixture must select tokens [2, 5)");

        auto exhausted =
            select_switch_spans(parse_bracketed("(S (NP (PRP It)) (VP (VBZ works)))"));
        require(std::holds_alternative<Rejection>(exhausted) &&
                    std::get<Rejection>(exhausted).reason ==
                        RejectReason::PronounOnlyExhausted,
                "pronoun-only fixture must reject with PronounOnlyExhausted");

        auto no_np = select_switch_spans(parse_bracketed("(S (VP (VB Run)))"));
        require(std::holds_alternative<Rejection>(no_np) &&
                    std::get<Rejection>(no_np).reason == RejectReason::NoEligibleSpan,
                "NP-free fixture must reject with NoEligibleSpan");
    }
    // CLI-level determinism: identical reruns produce byte-identical outputs
    {
        nlohmann::ordered_json record;
        record["id"] = "fig1";
        record["sentence0"] = "The movie was very dull";
        record["sentence1"] = "The movie was very dull";
        record["score"] = 5.0;
        write_file(dir.file("pairs.jsonl"), record.dump() + "\n");
        nlohmann::ordered_json trees;
        trees["id"] = "fig1";
        trees["trees"] = {kFig1Tree, kFig1Tree};
        write_file(dir.file("trees.jsonl"), trees.dump() + "\n");

        std::string arguments = "augment --trees " + dir.file("trees.jsonl") + " --pairs " +
                                dir.file("pairs.jsonl") + " --dict " + dir.file("dict.tsv") +
                                " --out " + dir.file("out.jsonl");
        require(run_cli(arguments, dir.file("cli1.log")) == 0, "CLI augment must exit 0");
        std::string first = read_file(dir.file("out.jsonl"));
        require(first.find(std::string(kKoreanMovie) + " was very dull") != std::string::npos,
                "CLI output must contain the code-switched sentence");
        std::string report_first = read_file(dir.file("out.jsonl.report.json"));
        require(run_cli(arguments, dir.file("cli2.log")) == 0, "CLI rerun must exit 0");
        require(read_file(dir.file("out.jsonl")) == first,
                "rerun output must be byte-identical");
        require(read_file(dir.file("out.jsonl.report.json")) == report_first,
                "rerun report must be byte-identical");
        auto report = nlohmann::json::parse(report_first);
        require(report["accepted"] == 1 && report["total"] == 1,
                "fixture report must accept the one record");
    }
    *detail = "published sentence reproduced; rejection fixtures and CLI reruns deterministic";
}

void criterion_split_exactness(std::string* detail) {
    SplitSpec spec{{0.64, 0.16, 0.20}, 5};
    auto parts = split_indices(100, spec);
    require(parts[0].size() == 64 && parts[1].size() == 16 && parts[2].size() == 20,
            "100 records at (0.64, 0.16, 0.20) must split 64/16/20");
    require(split_indices(100, spec) == parts, "same seed must give identical partitions");

    SplitSpec halves{{0.5, 0.5}, 6};
    auto two = split_indices(100, halves);
    require(two[0].size() == 50 && two[1].size() == 50,
            "(0.5, 0.5) on 100 records must split 50/50");

    TempDir dir;
    std::string content;
    for (int i = 0; i < 100; ++i) content += "{\"row\":" + std::to_string(i) + "}\n";
    write_file(dir.file("records.jsonl"), content);
    auto sizes = run_split(dir.file("records.jsonl"), {0.64, 0.16, 0.20}, 5,
                           dir.file("part"));
    require((sizes == std::vector<std::size_t>{64, 16, 20}), "file split must match 64/16/20");
    std::string train_part = read_file(dir.file("part.train.jsonl"));
    run_split(dir.file("records.jsonl"), {0.64, 0.16, 0.20}, 5, dir.file("part"));
    require(read_file(dir.file("part.train.jsonl")) == train_part,
            "file split must be seed-deterministic");
    *detail = "64/16/20 and 50/50 exact, partitions seed-deterministic";
}

struct SyntheticOutcome {
    std::vector<double> concse;
    std::vector<double> baseline;
};

SyntheticOutcome run_synthetic_comparison() {
    SynthCorpus corpus = make_synthetic_corpus(acceptance_synth(1));
    Vocab vocab = Vocab::from_tokens(corpus.vocab_tokens, true);

    SyntheticOutcome outcome;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        TrainResult concse_run = train(corpus.train, vocab, synthetic_config(seed));
        StsOptions options;
        options.use_cs = true;
        options.scenario = "EN2CS";
        options.seed = seed;
        outcome.concse.push_back(
            evaluate_sts(concse_run.params, vocab, corpus.sts, options).value);

        TrainResult baseline_run = train(corpus.train, vocab, baseline_config(seed));
        outcome.baseline.push_back(
            evaluate_sts(baseline_run.params, vocab, corpus.sts, options).value);
    }
    return outcome;
}

void criterion_synthetic_end_to_end(std::string* detail) {
    auto start = std::chrono::steady_clock::now();
    SyntheticOutcome outcome = run_synthetic_comparison();

    int wins = 0;
    double min_concse = 1.0;
    for (std::size_t i = 0; i < 5; ++i) {
        if (outcome.concse[i] >= outcome.baseline[i]) ++wins;
        min_concse = std::min(min_concse, outcome.concse[i]);
    }
    double elapsed = seconds_since(start);

    std::ostringstream out;
    out << "spearman per seed:";
    for (double v : outcome.concse) out << " " << format_double(v);
    out << " | baseline:";
    for (double v : outcome.baseline) out << " " << format_double(v);
    out << " | " << format_double(elapsed) << "s";
    *detail = out.str();

    require(min_concse >= 0.90,
            "held-out CS spearman must be >= 0.90 for every seed; " + *detail);
    require(wins >= 4, "full objective must match or beat the baseline in >= 4 of 5 seeds; " +
                           *detail);
    require(elapsed < 300.0, "synthetic end-to-end exceeded 5 minutes");
}

void criterion_ablation_structure(std::string* detail) {
    TempDir dir;
    run_synth(acceptance_synth(1), dir.path());
    write_file(dir.file("base.cfg"),
               "epochs = 1000\n"
               "max_steps = 200\n"
               "batch_size = 32\n"
               "learning_rate = 0.02\n"
               "optimizer = adam\n"
               "seed = 1\n"
               "dim = 16\n"
               "init_scale = 0.1\n"
               "tau = 0.05\n"
               "lambda = 1.2\n"
               "alpha = 1\n");

    struct Sweep {
        std::string grid;
        std::size_t rows;
    };
    const std::vector<Sweep> sweeps = {
        {"variants=v1,v2,v3,v4,v5,v6", 6},
        {"tau=0.001,0.01,0.05,0.1,1", 5},
        {"lambda=na,1,1.2,1.4,1.5,2", 6},
        {"alpha=0.5,1,1.2,1.4,1.5,2", 6},
    };

    std::size_t total_cells = 0;
    for (std::size_t s = 0; s < sweeps.size(); ++s) {
        std::string out_path = dir.file("rows" + std::to_string(s) + ".jsonl");
        std::string arguments = "ablate --data " + dir.file("train.jsonl") + " --eval " +
                                dir.file("sts.jsonl") + " --vocab " + dir.file("vocab.txt") +
                                " --config " + dir.file("base.cfg") + " --grid \"" +
                                sweeps[s].grid + "\" --out " + out_path;
        int exit_code = run_cli(arguments, dir.file("ablate" + std::to_string(s) + ".log"));
        require(exit_code == 0, "ablate sweep '" + sweeps[s].grid + "' exited " +
                                    std::to_string(exit_code) + ": " +
                                    read_file(dir.file("ablate" + std::to_string(s) + ".log")));
        std::vector<std::string> rows = read_lines(out_path);
        require(rows.size() == sweeps[s].rows,
                "sweep '" + sweeps[s].grid + "' produced " + std::to_string(rows.size()) +
                    " rows, expected " + std::to_string(sweeps[s].rows));
        for (const std::string& row : rows) {
            auto parsed = nlohmann::json::parse(row);
            require(parsed.contains("value") && parsed["value"].is_number() &&
                        std::isfinite(parsed["value"].get<double>()),
                    "every ablation cell must emit one finite metric");
        }
        total_cells += rows.size();
    }
    *detail = std::to_string(total_cells) + " cells over 4 sweeps, all finite";
}

void criterion_metric_units(std::string* detail) {
    require(spearman({1, 2, 3}, {1, 2, 3}) == 1.0, "spearman identity must be exactly 1");
    require(spearman({1, 2, 3}, {3, 2, 1}) == -1.0, "spearman reversal must be exactly -1");
    require(std::abs(spearman({1, 2, 3, 4}, {1, 3, 2, 4}) - 0.8) <= 1e-12,
            "spearman derived case must be 0.8 within 1e-12");

    std::vector<int> preds = {1, 1, 1, 0, 0};
    std::vector<int> golds = {1, 1, 0, 1, 0};
    require(std::abs(f1_binary(preds, golds) - 2.0 / 3.0) <= 1e-12,
            "F1 derived case must be 2/3 within 1e-12");

    TTestResult same = welch_ttest({1, 2, 3}, {1, 2, 3});
    require(same.t == 0.0 && same.p == 1.0, "welch_ttest(a, a) must give t = 0, p = 1");

    TTestResult derived = welch_ttest({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
    require(std::abs(derived.t - (-1.0)) <= 1e-12, "derived t must be -1");
    require(std::abs(derived.df - 8.0) <= 1e-12, "derived df must be 8");
    require(std::abs(derived.p - 0.3466) <= 1e-3,
            "derived p must match the reference table within 1e-3");
    *detail = "spearman/F1/welch reference values reproduced";
}

void criterion_determinism(std::string* detail) {
    TempDir dir;
    run_synth(acceptance_synth(1), dir.path());

    std::string config_text =
        "epochs = 1000\n"
        "max_steps = 300\n"
        "batch_size = 32\n"
        "learning_rate = 0.02\n"
        "optimizer = adam\n"
        "seed = 1\n"
        "dim = 32\n"
        "init_scale = 0.1\n"
        "tau = 0.05\n"
        "lambda = 1.2\n"
        "alpha = 1\n";
    write_file(dir.file("run.cfg"), config_text);

    auto run_once = [&](const std::string& tag) {
        TrainFilesOptions options;
        options.data_path = dir.file("train.jsonl");
        options.vocab_path = dir.file("vocab.txt");
        options.config_path = dir.file("run.cfg");
        options.params_out = dir.file("params-" + tag + ".json");
        options.history_out = dir.file("history-" + tag + ".jsonl");
        run_train(options);
    };
    run_once("a");
    run_once("b");
    require(read_file(dir.file("params-a.json")) == read_file(dir.file("params-b.json")),
            "two same-seed runs must produce byte-identical parameters");
    require(read_file(dir.file("history-a.jsonl")) == read_file(dir.file("history-b.jsonl")),
            "two same-seed runs must produce byte-identical histories");
    require(!read_file(dir.file("history-a.jsonl")).empty(), "history must be nonempty");
    *detail = "byte-identical parameters and histories across same-seed reruns";
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "gradient suite (analytic vs central differences)", criterion_gradient_suite},
        {2, "oracle equivalence (vectorized vs naive loops)", criterion_oracle_equivalence},
        {3, "baseline equivalence (H1-only restriction)", criterion_baseline_equivalence},
        {4, "six-combination additivity", criterion_additivity},
        {5, "augmentation fixtures", criterion_augmentation_fixtures},
        {6, "split exactness", criterion_split_exactness},
        {7, "synthetic end-to-end training", criterion_synthetic_end_to_end},
        {8, "ablation structure", criterion_ablation_structure},
        {9, "metric unit suite", criterion_metric_units},
        {10, "determinism of training runs", criterion_determinism},
    };

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        std::string detail;
        try {
            criterion.body(&detail);
            std::printf("[PASS] criterion %2d: %s%s%s\n", criterion.number,
                        criterion.title.c_str(), detail.empty() ? "" : " -- ",
                        detail.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] criterion %2d: %s -- %s\n", criterion.number,
                        criterion.title.c_str(), e.what());
        }
        std::fflush(stdout);
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria failed\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
