#ifndef CONCSE_PIPELINE_HPP
#define CONCSE_PIPELINE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "augment.hpp"
#include "corpus.hpp"
#include "evalsuite.hpp"
#include "synthetic.hpp"
#include "trainer.hpp"

namespace concse {

// Every pipeline run emits a manifest: the command, a config snapshot,
// content digests of the inputs, the output paths and the seed. Manifests
// carry no timestamps, so identical runs produce identical manifests.
void write_manifest(const std::string& manifest_path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& config,
                    const std::vector<std::string>& input_paths,
                    const std::vector<std::string>& output_paths, std::uint64_t seed);

std::string default_manifest_path(const std::string& out_path);

// ---- augment ----
struct AugmentFilesOptions {
    std::string trees_path;    // JSONL, one {"id"?, "trees": [...]} per record
    std::string records_path;  // pair JSONL/TSV or triplet JSONL
    bool triplets = false;
    std::string dict_path;         // exactly one of dict_path /
    std::string http_config_path;  // http_config_path must be set
    std::string out_path;
    std::string report_path;    // empty = out_path + ".report.json"
    std::string manifest_path;  // empty = out_path + ".manifest.json"
    AugmentPolicy policy;
};

struct AugmentFilesResult {
    AugmentReport report;
    std::vector<RowError> input_errors;
};

AugmentFilesResult run_augment(const AugmentFilesOptions& options);

// ---- build-nli ----
struct BuildNliResult {
    std::size_t rows_in = 0;
    std::size_t triplets_out = 0;
    std::vector<RowError> input_errors;
};

BuildNliResult run_build_nli(const std::string& rows_path, const std::string& out_path,
                             const std::string& manifest_path = "");

// ---- split ----
// Splits a record file line-wise (TSV headers are replicated into every
// partition). Partitions are named train/dev/test for three ratios and
// dev/test for two.
std::vector<std::size_t> run_split(const std::string& in_path,
                                   const std::vector<double>& ratios, std::uint64_t seed,
                                   const std::string& out_prefix,
                                   const std::string& manifest_path = "");

// ---- train ----
struct TrainFilesOptions {
    std::string data_path;    // sixtuple JSONL
    std::string vocab_path;   // one token per line
    std::string config_path;  // key = value run config
    std::string params_out;
    std::string history_out;   // empty = params_out + ".history.jsonl"
    std::string manifest_path;
};

void run_train(const TrainFilesOptions& options);

// ---- eval ----
struct EvalFilesOptions {
    std::string params_path;
    std::string data_path;  // pair JSONL/TSV with score targets
    std::string scenario = "EN2EN";
    std::string task = "sts";
    std::uint64_t seed = 0;
    std::string report_out;
    std::string manifest_path;
};

struct EvalFilesResult {
    EvalReport report;
    std::vector<RowError> input_errors;
};

EvalFilesResult run_eval(const EvalFilesOptions& options);

// ---- ablate ----
// Grid dimensions: variants (v1..v6), tau, lambda ("na" disables the triplet
// term), alpha. The run covers the cross-product of the given grids with
// unspecified dimensions pinned to the base config, one report row per cell.
struct AblateOptions {
    std::string data_path;
    std::string eval_path;
    std::string vocab_path;
    std::string config_path;
    std::vector<std::string> grid_specs;  // e.g. "tau=0.001,0.01,0.05,0.1,1"
    std::string scenario = "EN2CS";       // evaluation side
    std::string out_path;
    std::string manifest_path;
    int threads = 0;  // 0 = hardware concurrency
};

struct AblateCell {
    std::string variant;
    double tau = 0.0;
    bool lambda_na = false;
    double lambda = 0.0;
    double alpha = 0.0;
    double value = 0.0;
    std::size_t n = 0;
    long steps = 0;
};

std::vector<AblateCell> run_ablate(const AblateOptions& options);

// ---- ttest ----
// Inputs are one number per line; '#' comments and blank lines are skipped.
TTestResult run_ttest_files(const std::string& a_path, const std::string& b_path,
                            bool paired = false);
std::vector<double> read_number_file(const std::string& path);

// ---- synth ----
// Writes vocab.txt, train.jsonl and sts.jsonl under out_dir.
void run_synth(const SynthConfig& config, const std::string& out_dir,
               const std::string& manifest_path = "");

}  // namespace concse

#endif  // CONCSE_PIPELINE_HPP
