#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dx/classifier.hpp"
#include "dx/induction.hpp"
#include "dx/label_mapping.hpp"
#include "dx/sdt.hpp"

namespace dx {

inline constexpr std::string_view kToolName = "dxplain";
inline constexpr std::string_view kToolVersion = "0.1.0";

// Process exit codes; stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNoExplanation = 2,
  kExitEstimator = 3,
};

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

// "# dxplain 0.1.0 <command>\n# config: k=v ...\n# seed: S\n"
std::string report_header(std::string_view command, const ConfigEcho& config,
                          std::optional<std::uint64_t> seed);

struct BuildIndexOptions {
  std::string edges;
  std::string memberships;
  std::string out;
  bool lenient = false;
};
int cmd_build_index(const BuildIndexOptions& o, std::ostream& out, std::ostream& err);

struct ExplainOptions {
  std::string index;
  std::string positives;
  std::string negatives;
  InductionConfig induction;
  // How many ranked candidates feed explanation assembly.
  std::size_t ranking_depth = 100;
  std::optional<std::uint64_t> baseline_seed;
  std::string concreteness;
  double threshold = 3.5;
  bool alphabetize = false;
  std::string out_text;
  std::string out_json;
};
int cmd_explain(const ExplainOptions& o, std::ostream& out, std::ostream& err);

struct ClassifyOptions {
  std::string items;
  std::string target;
  std::string out_dir;
  std::size_t k = 10;
  std::size_t cap = 9;
  std::uint64_t seed = 1;
  TrainOptions train;
  IngestOptions ingest;
};
int cmd_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& err);

// The four comparisons explained for a classifier: (positive group, negative
// group) and the file stem used for their example lists.
struct Comparison {
  std::string_view stem;
  std::string_view positive;
  std::string_view negative;
};
inline constexpr Comparison kComparisons[] = {
    {"fp_vs_tn", "FP", "TN"},
    {"tp_vs_fn", "TP", "FN"},
    {"tp_vs_fp", "TP", "FP"},
    {"fn_vs_tn", "FN", "TN"},
};

struct BtOptions {
  std::string tally;
  std::string reference;
  double penalty = 0;
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  std::string out;
};
int cmd_bt(const BtOptions& o, std::ostream& out, std::ostream& err);

struct SdtOptions {
  std::string counts;
  SdtCorrection correction = SdtCorrection::kLogLinear;
  std::string out;
};
int cmd_sdt(const SdtOptions& o, std::ostream& out, std::ostream& err);

struct MapLabelsOptions {
  std::string labels;  // one label per line
  std::string items;   // or: item file whose tags are the labels
  std::string mapfile;
  std::string cache;
  std::optional<ServiceConfig> service;
  std::string out;
};
int cmd_map_labels(const MapLabelsOptions& o, std::ostream& out, std::ostream& err);

// Runs a command, mapping exceptions to exit codes and messages on `err`.
int run_guarded(const std::function<int()>& command, std::ostream& err);

}  // namespace dx
