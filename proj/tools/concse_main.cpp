// Command-line front end over the concse C API: dataset augmentation,
// NLI reconstruction, splits, training, evaluation, ablation grids and
// t-tests. Exit codes: 0 ok, 2 usage/config, 3 I/O, 4 internal.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "concse.h"

namespace {

int report_status(concse_status status) {
    if (status != CONCSE_OK) {
        std::fprintf(stderr, "error: %s\n", concse_last_error());
    }
    return static_cast<int>(status);
}

std::vector<double> parse_ratios(const std::string& csv) {
    std::vector<double> ratios;
    std::string current;
    for (char c : csv + ",") {
        if (c == ',') {
            if (!current.empty()) {
                ratios.push_back(std::stod(current));
                current.clear();
            }
        } else {
            current += c;
        }
    }
    return ratios;
}

const char* opt(const std::string& value) { return value.empty() ? nullptr : value.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concse: code-switching dataset forge and contrastive sentence "
                 "embedding trainer"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(concse_version()));

    // ---- augment ----
    auto* augment = app.add_subcommand(
        "augment", "Code-switch records by substituting parsed noun phrases");
    std::string aug_trees, aug_pairs, aug_triplets, aug_dict, aug_http, aug_out, aug_report;
    std::string aug_source = "en", aug_target = "ko";
    int aug_max_spans = -1;
    bool aug_keep = false;
    augment->add_option("--trees", aug_trees, "Trees JSONL aligned with the records")
        ->required();
    auto* pairs_opt = augment->add_option("--pairs", aug_pairs, "Pair records (JSONL or TSV)");
    auto* triplets_opt =
        augment->add_option("--triplets", aug_triplets, "NLI triplet records (JSONL)");
    pairs_opt->excludes(triplets_opt);
    augment->add_option("--dict", aug_dict, "Dictionary TSV backend");
    augment->add_option("--http", aug_http, "HTTP backend config file");
    augment->add_option("--out", aug_out, "Output records path")->required();
    augment->add_option("--report", aug_report, "Report JSON path");
    augment->add_option("--max-spans", aug_max_spans, "Cap on switched spans (-1 = all)");
    augment->add_flag("--keep-on-miss", aug_keep,
                      "Keep the original span when translation fails");
    augment->add_option("--source-lang", aug_source, "Source language code");
    augment->add_option("--target-lang", aug_target, "Target language code");
    augment->callback([&]() {
        if (aug_pairs.empty() == aug_triplets.empty()) {
            throw CLI::ValidationError("augment", "exactly one of --pairs/--triplets required");
        }
        concse_augment_opts opts{};
        opts.trees_path = aug_trees.c_str();
        opts.records_path = aug_pairs.empty() ? aug_triplets.c_str() : aug_pairs.c_str();
        opts.triplets = aug_pairs.empty() ? 1 : 0;
        opts.dict_path = opt(aug_dict);
        opts.http_config_path = opt(aug_http);
        opts.out_path = aug_out.c_str();
        opts.report_path = opt(aug_report);
        opts.max_spans = aug_max_spans;
        opts.keep_on_translation_error = aug_keep ? 1 : 0;
        opts.source_lang = aug_source.c_str();
        opts.target_lang = aug_target.c_str();
        concse_augment_report report{};
        concse_status status = concse_augment(&opts, &report);
        if (status == CONCSE_OK) {
            std::printf("augment: total=%ld accepted=%ld rejected=%ld "
                        "translation_failures=%ld row_errors=%ld\n",
                        report.total, report.accepted,
                        report.rejected_whole_sentence_np + report.rejected_no_eligible_span +
                            report.rejected_pronoun_only + report.rejected_malformed_tree,
                        report.translation_failures, report.input_row_errors);
        }
        std::exit(report_status(status));
    });

    // ---- build-nli ----
    auto* build_nli = app.add_subcommand(
        "build-nli", "Reconstruct (premise, entailment, contradiction) triplets");
    std::string nli_rows, nli_out;
    build_nli->add_option("--rows", nli_rows, "NLI rows (premise, hypothesis, label)")
        ->required();
    build_nli->add_option("--out", nli_out, "Output triplet JSONL")->required();
    build_nli->callback([&]() {
        long rows = 0, triplets = 0;
        concse_status status = concse_build_nli(nli_rows.c_str(), nli_out.c_str(), &rows, &triplets);
        if (status == CONCSE_OK) {
            std::printf("build-nli: rows=%ld triplets=%ld\n", rows, triplets);
        }
        std::exit(report_status(status));
    });

    // ---- split ----
    auto* split = app.add_subcommand("split", "Seeded dataset split");
    std::string split_in, split_ratios = "0.64,0.16,0.20", split_prefix;
    std::uint64_t split_seed = 0;
    split->add_option("--in", split_in, "Input records (JSONL or TSV)")->required();
    split->add_option("--ratios", split_ratios, "Comma-separated ratios (2 or 3, sum 1)");
    split->add_option("--seed", split_seed, "Shuffle seed");
    split->add_option("--out-prefix", split_prefix, "Output path prefix")->required();
    split->callback([&]() {
        std::vector<double> ratios;
        try {
            ratios = parse_ratios(split_ratios);
        } catch (const std::exception&) {
            std::fprintf(stderr, "error: --ratios must be comma-separated numbers\n");
            std::exit(2);
        }
        std::vector<long> sizes(ratios.size(), 0);
        concse_status status = concse_split(split_in.c_str(), ratios.data(),
                                            static_cast<int>(ratios.size()), split_seed,
                                            split_prefix.c_str(), sizes.data());
        if (status == CONCSE_OK) {
            std::printf("split:");
            for (long size : sizes) std::printf(" %ld", size);
            std::printf("\n");
        }
        std::exit(report_status(status));
    });

    // ---- train ----
    auto* train = app.add_subcommand("train", "Train the sentence encoder");
    std::string train_data, train_vocab, train_config, train_out, train_history;
    train->add_option("--data", train_data, "Sixtuple training JSONL")->required();
    train->add_option("--vocab", train_vocab, "Vocab file")->required();
    train->add_option("--config", train_config, "Run config (key = value)")->required();
    train->add_option("--out", train_out, "Checkpoint output path")->required();
    train->add_option("--history", train_history, "History JSONL path");
    train->callback([&]() {
        concse_train_opts opts{};
        opts.data_path = train_data.c_str();
        opts.vocab_path = train_vocab.c_str();
        opts.config_path = train_config.c_str();
        opts.params_out = train_out.c_str();
        opts.history_out = opt(train_history);
        concse_status status = concse_train(&opts);
        if (status == CONCSE_OK) std::printf("train: wrote %s\n", train_out.c_str());
        std::exit(report_status(status));
    });

    // ---- eval ----
    auto* eval = app.add_subcommand("eval", "Spearman evaluation of a checkpoint");
    std::string eval_params, eval_data, eval_scenario = "EN2EN", eval_task = "sts", eval_out;
    std::uint64_t eval_seed = 0;
    eval->add_option("--params", eval_params, "Checkpoint path")->required();
    eval->add_option("--data", eval_data, "Pair records with score targets")->required();
    eval->add_option("--scenario", eval_scenario, "EN2EN, EN2CS or CS2CS");
    eval->add_option("--task", eval_task, "Task label for the report");
    eval->add_option("--seed", eval_seed, "Seed recorded in the report");
    eval->add_option("--out", eval_out, "Report JSONL path");
    eval->callback([&]() {
        concse_eval_opts opts{};
        opts.params_path = eval_params.c_str();
        opts.data_path = eval_data.c_str();
        opts.scenario = eval_scenario.c_str();
        opts.task = eval_task.c_str();
        opts.seed = eval_seed;
        opts.report_out = opt(eval_out);
        double metric = 0.0;
        long n = 0;
        concse_status status = concse_eval(&opts, &metric, &n);
        if (status == CONCSE_OK) {
            std::printf("eval: scenario=%s task=%s spearman=%.6f n=%ld\n",
                        eval_scenario.c_str(), eval_task.c_str(), metric, n);
        }
        std::exit(report_status(status));
    });

    // ---- ablate ----
    auto* ablate = app.add_subcommand("ablate", "Loss-variant / hyperparameter grid");
    std::string ab_data, ab_eval, ab_vocab, ab_config, ab_out, ab_scenario = "EN2CS";
    std::vector<std::string> ab_grids;
    int ab_threads = 0;
    ablate->add_option("--data", ab_data, "Sixtuple training JSONL")->required();
    ablate->add_option("--eval", ab_eval, "Evaluation pair records")->required();
    ablate->add_option("--vocab", ab_vocab, "Vocab file")->required();
    ablate->add_option("--config", ab_config, "Base run config")->required();
    ablate->add_option("--grid", ab_grids,
                       "Grid spec dim=v1,v2,... (repeatable; dims: variants, tau, "
                       "lambda, alpha; lambda accepts na)");
    ablate->add_option("--scenario", ab_scenario, "Evaluation side");
    ablate->add_option("--out", ab_out, "Report rows JSONL")->required();
    ablate->add_option("--threads", ab_threads, "Worker threads (0 = auto)");
    ablate->callback([&]() {
        std::string grid;
        for (const std::string& spec : ab_grids) {
            if (!grid.empty()) grid += ';';
            grid += spec;
        }
        concse_ablate_opts opts{};
        opts.data_path = ab_data.c_str();
        opts.eval_path = ab_eval.c_str();
        opts.vocab_path = ab_vocab.c_str();
        opts.config_path = ab_config.c_str();
        opts.grid = grid.c_str();
        opts.scenario = ab_scenario.c_str();
        opts.out_path = ab_out.c_str();
        opts.threads = ab_threads;
        long cells = 0;
        concse_status status = concse_ablate(&opts, &cells);
        if (status == CONCSE_OK) std::printf("ablate: %ld cells -> %s\n", cells, ab_out.c_str());
        std::exit(report_status(status));
    });

    // ---- ttest ----
    auto* ttest = app.add_subcommand("ttest", "Two-sided t-test between two result files");
    std::string tt_a, tt_b;
    bool tt_paired = false;
    ttest->add_option("--a", tt_a, "First sample, one value per line")->required();
    ttest->add_option("--b", tt_b, "Second sample, one value per line")->required();
    ttest->add_flag("--paired", tt_paired, "Paired test on per-line differences");
    ttest->callback([&]() {
        double t = 0.0, df = 0.0, p = 0.0;
        concse_status status =
            concse_ttest_files(tt_a.c_str(), tt_b.c_str(), tt_paired ? 1 : 0, &t, &df, &p);
        if (status == CONCSE_OK) std::printf("t=%.6f df=%.4f p=%.6g\n", t, df, p);
        std::exit(report_status(status));
    });

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate the synthetic bilingual benchmark");
    std::string synth_dir;
    std::uint64_t synth_seed = 1;
    int synth_concepts = 200, synth_tuples = 500, synth_pairs = 100;
    synth->add_option("--out-dir", synth_dir, "Output directory")->required();
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--concepts", synth_concepts, "Concept inventory size");
    synth->add_option("--tuples", synth_tuples, "Training sixtuples");
    synth->add_option("--eval-pairs", synth_pairs, "Held-out STS pairs");
    synth->callback([&]() {
        concse_synth_opts opts{};
        opts.seed = synth_seed;
        opts.n_concepts = synth_concepts;
        opts.n_tuples = synth_tuples;
        opts.n_eval_pairs = synth_pairs;
        opts.out_dir = synth_dir.c_str();
        concse_status status = concse_synth(&opts);
        if (status == CONCSE_OK) {
            std::printf("synth: seed=%" PRIu64 " -> %s\n", synth_seed, synth_dir.c_str());
        }
        std::exit(report_status(status));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}
