#include "concse.h"

#include <cstring>
#include <string>

#include "encoder.hpp"
#include "evalsuite.hpp"
#include "loss.hpp"
#include "pipeline.hpp"
#include "treebank.hpp"
#include "util.hpp"

namespace {

thread_local std::string g_last_error;

concse_status set_error(int code, const std::string& message) {
    g_last_error = message;
    switch (code) {
        case 2: return CONCSE_ERR_CONFIG;
        case 3: return CONCSE_ERR_IO;
        default: return CONCSE_ERR_INTERNAL;
    }
}

// Runs `fn`, translating the exception taxonomy into status codes.
template <typename Fn>
concse_status guarded(Fn&& fn) {
    try {
        fn();
        return CONCSE_OK;
    } catch (const concse::Error& e) {
        return set_error(e.code(), e.what());
    } catch (const std::exception& e) {
        return set_error(4, e.what());
    } catch (...) {
        return set_error(4, "unknown error");
    }
}

concse_status fill_buffer(const std::string& value, char* buffer, size_t buffer_size,
                          size_t* required_size) {
    if (required_size != nullptr) *required_size = value.size() + 1;
    if (buffer != nullptr && buffer_size > 0) {
        size_t n = value.size() < buffer_size - 1 ? value.size() : buffer_size - 1;
        std::memcpy(buffer, value.data(), n);
        buffer[n] = '\0';
    }
    return CONCSE_OK;
}

const char* value_or(const char* value, const char* fallback) {
    return value != nullptr ? value : fallback;
}

}  // namespace

struct concse_tree {
    concse::ParseTree tree;
};

struct concse_backend {
    std::unique_ptr<concse::TranslationBackend> backend;
};

struct concse_model {
    concse::Checkpoint checkpoint;
};

extern "C" {

const char* concse_version(void) { return concse::kVersion; }

const char* concse_last_error(void) { return g_last_error.c_str(); }

concse_status concse_tree_parse(const char* text, concse_tree** out_tree) {
    if (text == nullptr || out_tree == nullptr) return set_error(2, "NULL argument");
    *out_tree = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<concse_tree>();
        handle->tree = concse::parse_bracketed(text);
        *out_tree = handle.release();
    });
}

void concse_tree_free(concse_tree* tree) { delete tree; }

int concse_tree_token_count(const concse_tree* tree) {
    return tree == nullptr ? 0 : static_cast<int>(tree->tree.token_count);
}

concse_status concse_tree_fringe(const concse_tree* tree, char* buffer,
                                 size_t buffer_size, size_t* required_size) {
    if (tree == nullptr) return set_error(2, "NULL tree");
    return guarded([&] {
        std::string joined = concse::join(concse::fringe(tree->tree), " ");
        fill_buffer(joined, buffer, buffer_size, required_size);
    });
}

concse_status concse_tree_select_spans(const concse_tree* tree, int max_spans,
                                       int* starts, int* ends, int capacity,
                                       int* out_count, concse_rejection* out_rejection) {
    if (tree == nullptr || out_count == nullptr || out_rejection == nullptr) {
        return set_error(2, "NULL argument");
    }
    return guarded([&] {
        concse::SelectionPolicy policy;
        policy.max_spans = max_spans;
        auto outcome = concse::select_switch_spans(tree->tree, policy);
        if (const auto* rejection = std::get_if<concse::Rejection>(&outcome)) {
            *out_count = 0;
            switch (rejection->reason) {
                case concse::RejectReason::WholeSentenceNP:
                    *out_rejection = CONCSE_REJECT_WHOLE_SENTENCE_NP;
                    break;
                case concse::RejectReason::NoEligibleSpan:
                    *out_rejection = CONCSE_REJECT_NO_ELIGIBLE_SPAN;
                    break;
                case concse::RejectReason::PronounOnlyExhausted:
                    *out_rejection = CONCSE_REJECT_PRONOUN_ONLY;
                    break;
                case concse::RejectReason::MalformedTree:
                    *out_rejection = CONCSE_REJECT_MALFORMED_TREE;
                    break;
            }
            return;
        }
        const auto& plan = std::get<concse::SwitchPlan>(outcome);
        *out_rejection = CONCSE_ACCEPTED;
        *out_count = static_cast<int>(plan.spans.size());
        if (starts != nullptr && ends != nullptr) {
            int n = std::min(capacity, *out_count);
            for (int i = 0; i < n; ++i) {
                starts[i] = static_cast<int>(plan.spans[static_cast<size_t>(i)].start);
                ends[i] = static_cast<int>(plan.spans[static_cast<size_t>(i)].end);
            }
        }
    });
}

concse_status concse_backend_open_dict(const char* table_path, concse_backend** out_backend) {
    if (table_path == nullptr || out_backend == nullptr) return set_error(2, "NULL argument");
    *out_backend = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<concse_backend>();
        handle->backend = concse::dictionary_backend(table_path);
        *out_backend = handle.release();
    });
}

concse_status concse_backend_open_http(const char* config_path, concse_backend** out_backend) {
    if (config_path == nullptr || out_backend == nullptr) return set_error(2, "NULL argument");
    *out_backend = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<concse_backend>();
        handle->backend = concse::http_backend(concse::HttpBackendConfig::load(config_path));
        *out_backend = handle.release();
    });
}

concse_status concse_backend_translate(concse_backend* backend, const char* phrase,
                                       const char* source_lang, const char* target_lang,
                                       char* buffer, size_t buffer_size,
                                       size_t* required_size) {
    if (backend == nullptr || phrase == nullptr) return set_error(2, "NULL argument");
    concse_status status = CONCSE_OK;
    concse_status guard = guarded([&] {
        auto result = backend->backend->translate(phrase, value_or(source_lang, "en"),
                                                  value_or(target_lang, "ko"));
        if (const auto* error = std::get_if<concse::TranslationError>(&result)) {
            status = set_error(
                error->kind == concse::TranslationErrorKind::MissingEntry ? 2 : 3,
                error->message);
            return;
        }
        fill_buffer(std::get<std::string>(result), buffer, buffer_size, required_size);
    });
    return guard != CONCSE_OK ? guard : status;
}

void concse_backend_free(concse_backend* backend) { delete backend; }

concse_status concse_model_load(const char* checkpoint_path, concse_model** out_model) {
    if (checkpoint_path == nullptr || out_model == nullptr) return set_error(2, "NULL argument");
    *out_model = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<concse_model>();
        handle->checkpoint = concse::load_checkpoint(checkpoint_path);
        *out_model = handle.release();
    });
}

int concse_model_dim(const concse_model* model) {
    return model == nullptr ? 0 : static_cast<int>(model->checkpoint.params.dim());
}

concse_status concse_model_encode(const concse_model* model, const char* text,
                                  double* out_vector) {
    if (model == nullptr || text == nullptr || out_vector == nullptr) {
        return set_error(2, "NULL argument");
    }
    return guarded([&] {
        std::vector<std::vector<int>> ids = {
            concse::tokenize(text, model->checkpoint.vocab)};
        concse::EncodedBatch encoded = concse::encode(ids, model->checkpoint.params);
        std::memcpy(out_vector, encoded.reps.row(0), encoded.reps.cols * sizeof(double));
    });
}

void concse_model_free(concse_model* model) { delete model; }

concse_status concse_augment(const concse_augment_opts* opts,
                             concse_augment_report* out_report) {
    if (opts == nullptr || opts->trees_path == nullptr || opts->records_path == nullptr ||
        opts->out_path == nullptr) {
        return set_error(2, "NULL augment options");
    }
    return guarded([&] {
        concse::AugmentFilesOptions options;
        options.trees_path = opts->trees_path;
        options.records_path = opts->records_path;
        options.triplets = opts->triplets != 0;
        options.dict_path = value_or(opts->dict_path, "");
        options.http_config_path = value_or(opts->http_config_path, "");
        options.out_path = opts->out_path;
        options.report_path = value_or(opts->report_path, "");
        options.manifest_path = value_or(opts->manifest_path, "");
        options.policy.selection.max_spans = opts->max_spans;
        options.policy.on_translation_error = opts->keep_on_translation_error != 0
                                                  ? concse::OnTranslationError::KeepOriginal
                                                  : concse::OnTranslationError::RejectRecord;
        options.policy.source_lang = value_or(opts->source_lang, "en");
        options.policy.target_lang = value_or(opts->target_lang, "ko");

        concse::AugmentFilesResult result = concse::run_augment(options);
        if (out_report != nullptr) {
            const concse::AugmentReport& report = result.report;
            auto reason_count = [&](concse::RejectReason reason) {
                auto it = report.rejected_by_reason.find(concse::to_string(reason));
                return it == report.rejected_by_reason.end() ? 0L : it->second;
            };
            out_report->total = report.total;
            out_report->accepted = report.accepted;
            out_report->translation_failures = report.translation_failures;
            out_report->rejected_whole_sentence_np =
                reason_count(concse::RejectReason::WholeSentenceNP);
            out_report->rejected_no_eligible_span =
                reason_count(concse::RejectReason::NoEligibleSpan);
            out_report->rejected_pronoun_only =
                reason_count(concse::RejectReason::PronounOnlyExhausted);
            out_report->rejected_malformed_tree =
                reason_count(concse::RejectReason::MalformedTree);
            out_report->input_row_errors = static_cast<long>(result.input_errors.size());
        }
    });
}

concse_status concse_build_nli(const char* rows_path, const char* out_path,
                               long* out_rows, long* out_triplets) {
    if (rows_path == nullptr || out_path == nullptr) return set_error(2, "NULL argument");
    return guarded([&] {
        concse::BuildNliResult result = concse::run_build_nli(rows_path, out_path);
        if (out_rows != nullptr) *out_rows = static_cast<long>(result.rows_in);
        if (out_triplets != nullptr) *out_triplets = static_cast<long>(result.triplets_out);
    });
}

concse_status concse_split(const char* in_path, const double* ratios, int n_ratios,
                           uint64_t seed, const char* out_prefix, long* out_sizes) {
    if (in_path == nullptr || ratios == nullptr || out_prefix == nullptr) {
        return set_error(2, "NULL argument");
    }
    return guarded([&] {
        std::vector<double> ratio_vector(ratios, ratios + n_ratios);
        std::vector<size_t> sizes = concse::run_split(in_path, ratio_vector, seed, out_prefix);
        if (out_sizes != nullptr) {
            for (size_t i = 0; i < sizes.size(); ++i) {
                out_sizes[i] = static_cast<long>(sizes[i]);
            }
        }
    });
}

concse_status concse_train(const concse_train_opts* opts) {
    if (opts == nullptr || opts->data_path == nullptr || opts->vocab_path == nullptr ||
        opts->config_path == nullptr || opts->params_out == nullptr) {
        return set_error(2, "NULL train options");
    }
    return guarded([&] {
        concse::TrainFilesOptions options;
        options.data_path = opts->data_path;
        options.vocab_path = opts->vocab_path;
        options.config_path = opts->config_path;
        options.params_out = opts->params_out;
        options.history_out = value_or(opts->history_out, "");
        options.manifest_path = value_or(opts->manifest_path, "");
        concse::run_train(options);
    });
}

concse_status concse_eval(const concse_eval_opts* opts, double* out_metric,
                          long* out_n_pairs) {
    if (opts == nullptr || opts->params_path == nullptr || opts->data_path == nullptr) {
        return set_error(2, "NULL eval options");
    }
    return guarded([&] {
        concse::EvalFilesOptions options;
        options.params_path = opts->params_path;
        options.data_path = opts->data_path;
        options.scenario = value_or(opts->scenario, "EN2EN");
        options.task = value_or(opts->task, "sts");
        options.seed = opts->seed;
        options.report_out = value_or(opts->report_out, "");
        options.manifest_path = value_or(opts->manifest_path, "");
        concse::EvalFilesResult result = concse::run_eval(options);
        if (out_metric != nullptr) *out_metric = result.report.value;
        if (out_n_pairs != nullptr) *out_n_pairs = static_cast<long>(result.report.n);
    });
}

concse_status concse_ablate(const concse_ablate_opts* opts, long* out_cells) {
    if (opts == nullptr || opts->data_path == nullptr || opts->eval_path == nullptr ||
        opts->vocab_path == nullptr || opts->config_path == nullptr ||
        opts->out_path == nullptr) {
        return set_error(2, "NULL ablate options");
    }
    return guarded([&] {
        concse::AblateOptions options;
        options.data_path = opts->data_path;
        options.eval_path = opts->eval_path;
        options.vocab_path = opts->vocab_path;
        options.config_path = opts->config_path;
        if (opts->grid != nullptr) {
            for (const std::string& spec : concse::split_char(opts->grid, ';')) {
                if (!concse::trim(spec).empty()) options.grid_specs.push_back(spec);
            }
        }
        options.scenario = value_or(opts->scenario, "EN2CS");
        options.out_path = opts->out_path;
        options.manifest_path = value_or(opts->manifest_path, "");
        options.threads = opts->threads;
        std::vector<concse::AblateCell> cells = concse::run_ablate(options);
        if (out_cells != nullptr) *out_cells = static_cast<long>(cells.size());
    });
}

concse_status concse_ttest(const double* a, int n_a, const double* b, int n_b,
                           int paired, double* out_t, double* out_df, double* out_p) {
    if (a == nullptr || b == nullptr || n_a < 0 || n_b < 0) return set_error(2, "NULL argument");
    return guarded([&] {
        std::vector<double> va(a, a + n_a);
        std::vector<double> vb(b, b + n_b);
        concse::TTestResult result =
            paired != 0 ? concse::paired_ttest(va, vb) : concse::welch_ttest(va, vb);
        if (out_t != nullptr) *out_t = result.t;
        if (out_df != nullptr) *out_df = result.df;
        if (out_p != nullptr) *out_p = result.p;
    });
}

concse_status concse_ttest_files(const char* a_path, const char* b_path, int paired,
                                 double* out_t, double* out_df, double* out_p) {
    if (a_path == nullptr || b_path == nullptr) return set_error(2, "NULL argument");
    return guarded([&] {
        concse::TTestResult result = concse::run_ttest_files(a_path, b_path, paired != 0);
        if (out_t != nullptr) *out_t = result.t;
        if (out_df != nullptr) *out_df = result.df;
        if (out_p != nullptr) *out_p = result.p;
    });
}

concse_status concse_synth(const concse_synth_opts* opts) {
    if (opts == nullptr || opts->out_dir == nullptr) return set_error(2, "NULL synth options");
    return guarded([&] {
        concse::SynthConfig config;
        config.seed = opts->seed;
        if (opts->n_concepts > 0) config.n_concepts = opts->n_concepts;
        if (opts->n_tuples > 0) config.n_tuples = opts->n_tuples;
        if (opts->n_eval_pairs > 0) config.n_eval_pairs = opts->n_eval_pairs;
        concse::run_synth(config, opts->out_dir);
    });
}

}  // extern "C"
