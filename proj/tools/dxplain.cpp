#include <chrono>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dx/commands.hpp"
#include "dx/error.hpp"

namespace {

std::string metric_name = "f1";
std::string correction_name = "loglinear";
std::string service_url;
std::string service_path = "/rest/annotate";
std::vector<std::string> service_params;
double service_delay = 0;
double service_timeout = 10;

// key=value lines (or [subcommand] sections) for the selected subcommand;
// flags given on the command line win.
void apply_config(const std::string& path, CLI::App& sub) {
  for (const auto& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents.front() != sub.get_name()) continue;
    auto* opt = sub.get_option_no_throw("--" + item.name);
    if (opt == nullptr) {
      throw dx::UsageError(path + ": '" + item.name + "' is not an option of " + sub.get_name());
    }
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Concept-based explanations over a class taxonomy", "dxplain"};
  app.set_version_flag("--version", std::string(dx::kToolVersion));
  std::string config_path;
  app.add_option("--config", config_path, "Read subcommand options from a key=value file")
      ->check(CLI::ExistingFile);
  app.require_subcommand(1);

  dx::BuildIndexOptions build;
  auto* build_cmd = app.add_subcommand("build-index", "Load edges and memberships into a binary index");
  build_cmd->add_option("--edges", build.edges, "Child/parent TSV")->required();
  build_cmd->add_option("--memberships", build.memberships, "Individual/concept TSV")->required();
  build_cmd->add_option("--out,-o", build.out, "Index file to write")->required();
  build_cmd->add_flag("--lenient", build.lenient, "Add unknown membership concepts as isolated roots");

  dx::ExplainOptions explain;
  std::uint64_t baseline_seed = 0;
  auto* explain_cmd = app.add_subcommand("explain", "Induce and rank class expressions for P vs N");
  explain_cmd->add_option("--index", explain.index, "Index from build-index")->required();
  explain_cmd->add_option("--positives", explain.positives, "Positive individuals, one per line")->required();
  explain_cmd->add_option("--negatives", explain.negatives, "Negative individuals, one per line")->required();
  explain_cmd->add_option("--metric", metric_name, "f1, precision, recall or hybrid")
      ->check(CLI::IsMember({"f1", "precision", "recall", "hybrid"}));
  explain_cmd->add_option("--max-conjuncts,--max_conjuncts", explain.induction.max_conjuncts);
  explain_cmd->add_option("--max-disjuncts,--max_disjuncts", explain.induction.max_disjuncts);
  explain_cmd->add_option("--beam-width,--beam_width", explain.induction.beam_width);
  explain_cmd->add_option("--top-k,--top_k", explain.induction.top_k, "Explanation length");
  explain_cmd->add_option("--alpha", explain.induction.alpha, "Hybrid metric weight on F1");
  explain_cmd->add_option("--ranking-depth,--ranking_depth", explain.ranking_depth,
                          "Ranked candidates reported and considered for the explanation");
  auto* seed_opt = explain_cmd->add_option("--baseline-seed,--baseline_seed", baseline_seed,
                                           "Shuffle P and N first (semi-random baseline)");
  explain_cmd->add_option("--concreteness", explain.concreteness, "Word rating CSV for filtering");
  explain_cmd->add_option("--threshold", explain.threshold, "Minimum concreteness rating");
  explain_cmd->add_flag("--alphabetize", explain.alphabetize);
  explain_cmd->add_option("--out-text,--out_text", explain.out_text);
  explain_cmd->add_option("--out-json,--out_json", explain.out_json);

  dx::ClassifyOptions classify;
  auto* classify_cmd = app.add_subcommand("classify", "Cross-validated tag classifier and confusion groups");
  classify_cmd->add_option("--items", classify.items, "id<TAB>label<TAB>tag;tag;...")->required();
  classify_cmd->add_option("--target", classify.target, "Label treated as the positive class")->required();
  classify_cmd->add_option("--out-dir,--out_dir", classify.out_dir)->required();
  classify_cmd->add_option("--folds,-k", classify.k)->check(CLI::Range(2, 1000));
  classify_cmd->add_option("--cap", classify.cap, "Items sampled per confusion group");
  classify_cmd->add_option("--seed", classify.seed);
  classify_cmd->add_option("--l2", classify.train.l2);
  classify_cmd->add_option("--max-iter,--max_iter", classify.train.max_iter);
  classify_cmd->add_option("--tol", classify.train.tol);
  classify_cmd->add_option("--min-tags,--min_tags", classify.ingest.min_tags);
  bool no_balance = false;
  classify_cmd->add_flag("--no-balance,--no_balance", no_balance);

  dx::BtOptions bt;
  auto* bt_cmd = app.add_subcommand("bt", "Fit Bradley-Terry abilities to pairwise preference tallies");
  bt_cmd->add_option("--tally", bt.tally, "CSV [set,]item_a,item_b,wins_a,wins_b")->required();
  bt_cmd->add_option("--reference", bt.reference, "Item whose ability is fixed at 0")->required();
  bt_cmd->add_option("--penalty", bt.penalty, "Ridge penalty on free abilities")->check(CLI::NonNegativeNumber);
  bt_cmd->add_option("--tol", bt.tol);
  bt_cmd->add_option("--max-iter,--max_iter", bt.max_iter);
  bt_cmd->add_option("--out,-o", bt.out);

  dx::SdtOptions sdt;
  auto* sdt_cmd = app.add_subcommand("sdt", "Signal-detection d' and c from response counts");
  sdt_cmd->add_option("--counts", sdt.counts, "CSV [label,]hits,misses,false_alarms,correct_rejections")
      ->required();
  sdt_cmd->add_option("--correction", correction_name, "loglinear or none")
      ->check(CLI::IsMember({"loglinear", "none"}));
  sdt_cmd->add_option("--out,-o", sdt.out);

  dx::MapLabelsOptions map;
  auto* map_cmd = app.add_subcommand("map-labels", "Map free-text labels to concept IRIs");
  map_cmd->add_option("--labels", map.labels);
  map_cmd->add_option("--items", map.items);
  map_cmd->add_option("--mapfile", map.mapfile, "label<TAB>iri");
  map_cmd->add_option("--cache", map.cache, "Sidecar cache of service answers");
  map_cmd->add_option("--service", service_url, "Annotation service base URL");
  map_cmd->add_option("--service-path,--service_path", service_path);
  map_cmd->add_option("--service-param,--service_param", service_params, "Extra query parameter key=value");
  map_cmd->add_option("--delay", service_delay, "Seconds between service requests");
  map_cmd->add_option("--timeout", service_timeout, "Service timeout in seconds");
  map_cmd->add_option("--out,-o", map.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dx::kExitOk : dx::kExitUsage;
  }

  return dx::run_guarded(
      [&]() -> int {
        if (!config_path.empty()) apply_config(config_path, *app.get_subcommands().front());
        if (*build_cmd) return dx::cmd_build_index(build, std::cout, std::cerr);
        if (*explain_cmd) {
          explain.induction.metric = dx::parse_metric(metric_name);
          if (*seed_opt) explain.baseline_seed = baseline_seed;
          return dx::cmd_explain(explain, std::cout, std::cerr);
        }
        if (*classify_cmd) {
          classify.ingest.balance = !no_balance;
          return dx::cmd_classify(classify, std::cout, std::cerr);
        }
        if (*bt_cmd) return dx::cmd_bt(bt, std::cout, std::cerr);
        if (*sdt_cmd) {
          sdt.correction = dx::parse_correction(correction_name);
          return dx::cmd_sdt(sdt, std::cout, std::cerr);
        }
        if (!service_url.empty()) {
          dx::ServiceConfig config;
          config.base_url = service_url;
          config.path = service_path;
          for (const auto& kv : service_params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw dx::UsageError("--service-param expects key=value: " + kv);
            config.extra_params[kv.substr(0, eq)] = kv.substr(eq + 1);
          }
          config.delay = std::chrono::milliseconds(static_cast<long>(service_delay * 1000));
          config.timeout = std::chrono::seconds(static_cast<long>(service_timeout));
          map.service = config;
        }
        return dx::cmd_map_labels(map, std::cout, std::cerr);
      },
      std::cerr);
}
