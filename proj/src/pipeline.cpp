#include "pipeline.hpp"

#include <atomic>
#include <filesystem>
#include <thread>

#include "json.hpp"

namespace concse {

namespace {

using nlohmann::ordered_json;

std::string digest_file(const std::string& path) {
    return "fnv1a64:" + fnv1a64_hex(read_file(path));
}

struct TreesLine {
    std::string id;  // empty when absent
    std::vector<std::string> trees;
};

std::vector<TreesLine> read_trees_file(const std::string& path) {
    std::vector<TreesLine> out;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        ordered_json obj = ordered_json::parse(lines[i], nullptr, false);
        if (obj.is_discarded() || !obj.is_object() || !obj.contains("trees") ||
            !obj["trees"].is_array()) {
            throw ConfigError(path + ":" + std::to_string(i + 1) +
                              ": expected {\"id\"?, \"trees\": [...]}");
        }
        TreesLine line;
        if (obj.contains("id") && obj["id"].is_string()) line.id = obj["id"].get<std::string>();
        for (const auto& tree : obj["trees"]) {
            if (!tree.is_string()) {
                throw ConfigError(path + ":" + std::to_string(i + 1) + ": non-string tree");
            }
            line.trees.push_back(tree.get<std::string>());
        }
        out.push_back(std::move(line));
    }
    return out;
}

}  // namespace

std::string default_manifest_path(const std::string& out_path) {
    return out_path + ".manifest.json";
}

void write_manifest(const std::string& manifest_path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths, std::uint64_t seed) {
    ordered_json manifest;
    manifest["command"] = command;
    ordered_json config_obj;
    for (const auto& [key, value] : config) config_obj[key] = value;
    manifest["config"] = config_obj;
    nlohmann::json inputs;  // alphabetical keys
    for (const std::string& path : input_paths) inputs[path] = digest_file(path);
    manifest["inputs"] = inputs;
    manifest["outputs"] = output_paths;
    manifest["seed"] = seed;
    manifest["versions"] = {{"concse", kVersion}};
    write_file(manifest_path, manifest.dump(2) + "\n");
}

AugmentFilesResult run_augment(const AugmentFilesOptions& options) {
    if (options.dict_path.empty() == options.http_config_path.empty()) {
        throw ConfigError("augment: exactly one of --dict / --http must be given");
    }
    std::unique_ptr<TranslationBackend> backend;
    if (!options.dict_path.empty()) {
        backend = dictionary_backend(options.dict_path);
    } else {
        backend = http_backend(HttpBackendConfig::load(options.http_config_path));
    }

    std::vector<TreesLine> trees = read_trees_file(options.trees_path);
    const std::size_t sentences_per_record = options.triplets ? 3 : 2;

    AugmentFilesResult result;
    std::vector<PairRecord> pair_records;
    std::vector<NliTriplet> triplet_records;
    if (options.triplets) {
        triplet_records = read_triplets(options.records_path);
    } else {
        PairReadResult read = read_pairs(options.records_path,
                                         format_from_path(options.records_path));
        pair_records = std::move(read.records);
        result.input_errors = std::move(read.errors);
    }
    const std::size_t n_records =
        options.triplets ? triplet_records.size() : pair_records.size();
    if (trees.size() != n_records) {
        throw ConfigError("augment: " + std::to_string(n_records) + " records but " +
                          std::to_string(trees.size()) + " tree lines");
    }

    std::vector<PairRecord> accepted_pairs;
    std::vector<SixTuple> accepted_tuples;
    AugmentReport& report = result.report;
    report.total = static_cast<long>(n_records);

    for (std::size_t i = 0; i < n_records; ++i) {
        const TreesLine& line = trees[i];
        if (!options.triplets && !line.id.empty() && line.id != pair_records[i].id) {
            throw ConfigError("augment: tree line " + std::to_string(i + 1) + " has id '" +
                              line.id + "' but record id is '" + pair_records[i].id + "'");
        }
        if (line.trees.size() != sentences_per_record) {
            throw ConfigError("augment: tree line " + std::to_string(i + 1) + " has " +
                              std::to_string(line.trees.size()) + " trees, expected " +
                              std::to_string(sentences_per_record));
        }

        std::vector<ParseTree> parsed;
        bool malformed = false;
        for (const std::string& text : line.trees) {
            try {
                parsed.push_back(parse_bracketed(text));
            } catch (const MalformedTreeError&) {
                malformed = true;
                break;
            }
        }
        if (malformed) {
            report.count_rejection(RejectReason::MalformedTree);
            continue;
        }

        if (options.triplets) {
            TripletOutcome outcome =
                augment_triplet(triplet_records[i], parsed[0], parsed[1], parsed[2],
                                options.policy, *backend);
            if (const auto* tuple = std::get_if<SixTuple>(&outcome)) {
                ++report.accepted;
                accepted_tuples.push_back(*tuple);
            } else if (const auto* rejection = std::get_if<Rejection>(&outcome)) {
                report.count_rejection(rejection->reason);
            } else {
                ++report.translation_failures;
            }
        } else {
            PairOutcome outcome = augment_pair(pair_records[i], parsed[0], parsed[1],
                                               options.policy, *backend);
            if (const auto* record = std::get_if<PairRecord>(&outcome)) {
                ++report.accepted;
                accepted_pairs.push_back(*record);
            } else if (const auto* rejection = std::get_if<Rejection>(&outcome)) {
                report.count_rejection(rejection->reason);
            } else {
                ++report.translation_failures;
            }
        }
    }

    if (options.triplets) {
        write_sixtuples(accepted_tuples, options.out_path);
    } else {
        write_pairs(accepted_pairs, options.out_path, FileFormat::Jsonl);
    }

    std::string report_path = options.report_path.empty()
                                  ? options.out_path + ".report.json"
                                  : options.report_path;
    ordered_json report_obj;
    report_obj["total"] = report.total;
    report_obj["accepted"] = report.accepted;
    nlohmann::json reasons;
    for (const auto& [reason, count] : report.rejected_by_reason) reasons[reason] = count;
    report_obj["rejected_by_reason"] = reasons;
    report_obj["translation_failures"] = report.translation_failures;
    report_obj["input_row_errors"] = result.input_errors.size();
    write_file(report_path, report_obj.dump(2) + "\n");

    std::vector<std::string> inputs = {options.trees_path, options.records_path};
    inputs.push_back(options.dict_path.empty() ? options.http_config_path : options.dict_path);
    std::vector<std::pair<std::string, std::string>> config = {
        {"triplets", options.triplets ? "true" : "false"},
        {"max_spans", std::to_string(options.policy.selection.max_spans)},
        {"on_translation_error",
         options.policy.on_translation_error == OnTranslationError::RejectRecord ? "reject"
                                                                                 : "keep"},
        {"source_lang", options.policy.source_lang},
        {"target_lang", options.policy.target_lang},
        {"backend", backend->name()},
    };
    std::string manifest = options.manifest_path.empty()
                               ? default_manifest_path(options.out_path)
                               : options.manifest_path;
    write_manifest(manifest, "augment", config, inputs, {options.out_path, report_path}, 0);
    return result;
}

BuildNliResult run_build_nli(const std::string& rows_path, const std::string& out_path,
                             const std::string& manifest_path) {
    NliRowReadResult rows = read_nli_rows(rows_path, format_from_path(rows_path));
    std::vector<NliTriplet> triplets = reconstruct_nli(rows.rows);
    write_triplets(triplets, out_path);

    std::string manifest = manifest_path.empty() ? default_manifest_path(out_path)
                                                 : manifest_path;
    write_manifest(manifest, "build-nli", {}, {rows_path}, {out_path}, 0);

    BuildNliResult result;
    result.rows_in = rows.rows.size();
    result.triplets_out = triplets.size();
    result.input_errors = std::move(rows.errors);
    return result;
}

std::vector<std::size_t> run_split(const std::string& in_path,
                                   const std::vector<double>& ratios, std::uint64_t seed,
                                   const std::string& out_prefix,
                                   const std::string& manifest_path) {
    SplitSpec spec{ratios, seed};
    validate_split_spec(spec);

    FileFormat format = format_from_path(in_path);
    std::vector<std::string> lines = read_lines(in_path);
    std::string header;
    if (format == FileFormat::Tsv) {
        if (lines.empty()) throw ConfigError("TSV file has no header row: " + in_path);
        header = lines.front();
        lines.erase(lines.begin());
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

    std::vector<std::vector<std::size_t>> parts = split_indices(lines.size(), spec);
    std::vector<std::string> names =
        ratios.size() == 3 ? std::vector<std::string>{"train", "dev", "test"}
                           : std::vector<std::string>{"dev", "test"};
    std::string extension = format == FileFormat::Tsv ? ".tsv" : ".jsonl";

    std::vector<std::size_t> sizes;
    std::vector<std::string> outputs;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        std::string content;
        if (!header.empty()) content += header + "\n";
        for (std::size_t index : parts[p]) content += lines[index] + "\n";
        std::string path = out_prefix + "." + names[p] + extension;
        write_file(path, content);
        outputs.push_back(path);
        sizes.push_back(parts[p].size());
    }

    std::vector<std::string> ratio_strings;
    for (double r : ratios) ratio_strings.push_back(format_double(r));
    std::string manifest = manifest_path.empty() ? default_manifest_path(out_prefix)
                                                 : manifest_path;
    write_manifest(manifest, "split", {{"ratios", join(ratio_strings, ",")}}, {in_path},
                   outputs, seed);
    return sizes;
}

void run_train(const TrainFilesOptions& options) {
    TrainConfig config = TrainConfig::load(options.config_path);
    Vocab vocab = Vocab::load(options.vocab_path, config.lowercase);
    std::vector<SixTuple> records = read_sixtuples(options.data_path);

    TrainResult result = train(records, vocab, config);

    save_checkpoint(result.params, vocab, options.params_out);
    std::string history_path = options.history_out.empty()
                                   ? options.params_out + ".history.jsonl"
                                   : options.history_out;
    write_file(history_path, result.history.to_history_jsonl());

    std::string manifest = options.manifest_path.empty()
                               ? default_manifest_path(options.params_out)
                               : options.manifest_path;
    write_manifest(manifest, "train", config.to_pairs(),
                   {options.data_path, options.vocab_path, options.config_path},
                   {options.params_out, history_path}, config.seed);
}

EvalFilesResult run_eval(const EvalFilesOptions& options) {
    Checkpoint checkpoint = load_checkpoint(options.params_path);
    PairReadResult pairs = read_pairs(options.data_path, format_from_path(options.data_path));

    Scenario scenario = parse_scenario(options.scenario);
    StsOptions sts;
    sts.use_cs = scenario_evals_on_cs(scenario);
    sts.task = options.task;
    sts.scenario = to_string(scenario);
    sts.seed = options.seed;

    EvalFilesResult result;
    result.report = evaluate_sts(checkpoint.params, checkpoint.vocab, pairs.records, sts);
    result.input_errors = std::move(pairs.errors);

    if (!options.report_out.empty()) {
        write_file(options.report_out, reports_to_jsonl({result.report}));
        std::string manifest = options.manifest_path.empty()
                                   ? default_manifest_path(options.report_out)
                                   : options.manifest_path;
        write_manifest(manifest, "eval",
                       {{"scenario", sts.scenario}, {"task", sts.task}},
                       {options.params_path, options.data_path}, {options.report_out},
                       options.seed);
    }
    return result;
}

namespace {

struct AblateGrid {
    std::vector<std::string> variants;
    std::vector<double> taus;
    std::vector<std::pair<bool, double>> lambdas;  // (is_na, value)
    std::vector<double> alphas;
};

double parse_grid_number(const std::string& text, const std::string& dim) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        throw ConfigError("ablate grid " + dim + ": not a number: '" + text + "'");
    }
}

AblateGrid parse_grids(const std::vector<std::string>& specs, const TrainConfig& base) {
    AblateGrid grid;
    for (const std::string& spec : specs) {
        std::size_t eq = spec.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("ablate grid must look like dim=v1,v2,... got '" + spec + "'");
        }
        std::string dim = ascii_lower(trim(spec.substr(0, eq)));
        std::vector<std::string> values;
        for (const std::string& part : split_char(spec.substr(eq + 1), ',')) {
            std::string v = trim(part);
            if (!v.empty()) values.push_back(v);
        }
        if (values.empty()) throw ConfigError("ablate grid " + dim + " is empty");

        if (dim == "variants" || dim == "variant") {
            for (const std::string& v : values) {
                LossConfig probe;  // validates the name
                apply_variant(v, &probe);
                grid.variants.push_back(ascii_lower(v));
            }
        } else if (dim == "tau") {
            for (const std::string& v : values) grid.taus.push_back(parse_grid_number(v, dim));
        } else if (dim == "lambda") {
            for (const std::string& v : values) {
                if (ascii_lower(v) == "na" || ascii_lower(v) == "n/a") {
                    grid.lambdas.emplace_back(true, 0.0);
                } else {
                    grid.lambdas.emplace_back(false, parse_grid_number(v, dim));
                }
            }
        } else if (dim == "alpha") {
            for (const std::string& v : values) grid.alphas.push_back(parse_grid_number(v, dim));
        } else {
            throw ConfigError("unknown ablate grid dimension '" + dim +
                              "' (expected variants, tau, lambda or alpha)");
        }
    }
    // unspecified dimensions stay pinned to the base config
    if (grid.variants.empty()) {
        std::string variant = "v6";
        if (!base.loss.enable_tri || !base.loss.enable_neg || !base.loss.enable_con) {
            // synthesize the matching variant name for the manifest rows
            if (base.loss.enable_con && !base.loss.enable_tri && !base.loss.enable_neg) variant = "v1";
            else if (!base.loss.enable_con && base.loss.enable_tri && !base.loss.enable_neg) variant = "v2";
            else if (base.loss.enable_con && !base.loss.enable_tri && base.loss.enable_neg) variant = "v3";
            else if (!base.loss.enable_con && base.loss.enable_tri && base.loss.enable_neg) variant = "v4";
            else if (base.loss.enable_con && base.loss.enable_tri && !base.loss.enable_neg) variant = "v5";
        }
        grid.variants.push_back(variant);
    }
    if (grid.taus.empty()) grid.taus.push_back(base.loss.tau);
    if (grid.lambdas.empty()) grid.lambdas.emplace_back(false, base.loss.lambda);
    if (grid.alphas.empty()) grid.alphas.push_back(base.loss.alpha);
    return grid;
}

}  // namespace

std::vector<AblateCell> run_ablate(const AblateOptions& options) {
    TrainConfig base = TrainConfig::load(options.config_path);
    Vocab vocab = Vocab::load(options.vocab_path, base.lowercase);
    std::vector<SixTuple> records = read_sixtuples(options.data_path);
    PairReadResult pairs = read_pairs(options.eval_path, format_from_path(options.eval_path));
    Scenario scenario = parse_scenario(options.scenario);

    AblateGrid grid = parse_grids(options.grid_specs, base);

    std::vector<AblateCell> cells;
    for (const std::string& variant : grid.variants) {
        for (double tau : grid.taus) {
            for (const auto& [lambda_na, lambda] : grid.lambdas) {
                for (double alpha : grid.alphas) {
                    AblateCell cell;
                    cell.variant = variant;
                    cell.tau = tau;
                    cell.lambda_na = lambda_na;
                    cell.lambda = lambda;
                    cell.alpha = alpha;
                    cells.push_back(cell);
                }
            }
        }
    }

    // Worker pool over fully independent cells; results land in their cell
    // slot so the report order is the deterministic grid order.
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto work = [&]() {
        while (true) {
            std::size_t index = next.fetch_add(1);
            if (index >= cells.size() || failed.load()) return;
            AblateCell& cell = cells[index];
            try {
                TrainConfig config = base;
                apply_variant(cell.variant, &config.loss);
                config.loss.tau = cell.tau;
                if (cell.lambda_na) {
                    config.loss.enable_tri = false;
                } else {
                    config.loss.lambda = cell.lambda;
                }
                config.loss.alpha = cell.alpha;
                config.validate();

                TrainResult trained = train(records, vocab, config);
                StsOptions sts;
                sts.use_cs = scenario_evals_on_cs(scenario);
                sts.task = "sts";
                sts.scenario = to_string(scenario);
                sts.seed = config.seed;
                EvalReport report = evaluate_sts(trained.params, vocab, pairs.records, sts);
                cell.value = report.value;
                cell.n = report.n;
                cell.steps = trained.history.steps.empty()
                                 ? 0
                                 : trained.history.steps.back().step;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                failed.store(true);
                if (failure_message.empty()) failure_message = e.what();
                return;
            }
        }
    };

    unsigned n_threads = options.threads > 0
                             ? static_cast<unsigned>(options.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(cells.size()));
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> workers;
        for (unsigned i = 0; i < n_threads; ++i) workers.emplace_back(work);
        for (std::thread& worker : workers) worker.join();
    }
    if (failed.load()) throw ConfigError("ablate cell failed: " + failure_message);

    std::string out;
    for (const AblateCell& cell : cells) {
        ordered_json row;
        row["variant"] = cell.variant;
        row["tau"] = cell.tau;
        if (cell.lambda_na) {
            row["lambda"] = nullptr;
        } else {
            row["lambda"] = cell.lambda;
        }
        row["alpha"] = cell.alpha;
        row["metric"] = "spearman";
        row["value"] = cell.value;
        row["n"] = cell.n;
        row["steps"] = cell.steps;
        out += row.dump();
        out += '\n';
    }
    write_file(options.out_path, out);

    std::string manifest = options.manifest_path.empty()
                               ? default_manifest_path(options.out_path)
                               : options.manifest_path;
    std::vector<std::pair<std::string, std::string>> manifest_config = base.to_pairs();
    manifest_config.emplace_back("grid", join(options.grid_specs, ";"));
    manifest_config.emplace_back("scenario", options.scenario);
    write_manifest(manifest, "ablate", manifest_config,
                   {options.data_path, options.eval_path, options.vocab_path,
                    options.config_path},
                   {options.out_path}, base.seed);
    return cells;
}

std::vector<double> read_number_file(const std::string& path) {
    std::vector<double> values;
    std::vector<std::string> lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            std::size_t used = 0;
            double value = std::stod(line, &used);
            if (used != line.size()) throw std::invalid_argument("trailing");
            values.push_back(value);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(i + 1) + ": not a number: " + line);
        }
    }
    return values;
}

TTestResult run_ttest_files(const std::string& a_path, const std::string& b_path,
                            bool paired) {
    std::vector<double> a = read_number_file(a_path);
    std::vector<double> b = read_number_file(b_path);
    return paired ? paired_ttest(a, b) : welch_ttest(a, b);
}

void run_synth(const SynthConfig& config, const std::string& out_dir,
               const std::string& manifest_path) {
    SynthCorpus corpus = make_synthetic_corpus(config);
    std::filesystem::create_directories(out_dir);

    std::string vocab_path = out_dir + "/vocab.txt";
    std::string train_path = out_dir + "/train.jsonl";
    std::string sts_path = out_dir + "/sts.jsonl";

    std::string vocab_text;
    for (const std::string& token : corpus.vocab_tokens) vocab_text += token + "\n";
    write_file(vocab_path, vocab_text);
    write_sixtuples(corpus.train, train_path);
    write_pairs(corpus.sts, sts_path, FileFormat::Jsonl);

    std::string manifest = manifest_path.empty() ? out_dir + "/manifest.json"
                                                 : manifest_path;
    write_manifest(manifest, "synth",
                   {{"n_concepts", std::to_string(config.n_concepts)},
                    {"n_tuples", std::to_string(config.n_tuples)},
                    {"n_eval_pairs", std::to_string(config.n_eval_pairs)},
                    {"min_len", std::to_string(config.min_len)},
                    {"max_len", std::to_string(config.max_len)},
                    {"switch_prob", format_double(config.switch_prob)}},
                   {}, {vocab_path, train_path, sts_path}, config.seed);
}

}  // namespace concse
