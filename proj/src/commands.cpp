#include "dx/commands.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "dx/bradley_terry.hpp"
#include "dx/error.hpp"
#include "dx/explain.hpp"
#include "dx/index_file.hpp"
#include "dx/rng.hpp"
#include "dx/text.hpp"

namespace dx {

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  std::string out = buf;
  // no "-0.000000" for values that round to zero
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string or_dash(const std::string& s) { return s.empty() ? "-" : s; }

template <typename T>
std::string opt_str(const std::optional<T>& v) {
  return v ? std::to_string(*v) : "-";
}

std::string display_render(const CandidateConcept& c, const Interner& names) {
  std::string out;
  const bool multi = c.terms().size() > 1;
  for (std::size_t i = 0; i < c.terms().size(); ++i) {
    const auto& t = c.terms()[i];
    if (i) out += " or ";
    if (multi && t.size() > 1) out += '(';
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j) out += " and ";
      out += display_label(names.name(t[j]));
    }
    if (multi && t.size() > 1) out += ')';
  }
  return out;
}

}  // namespace

std::string report_header(std::string_view command, const ConfigEcho& config,
                          std::optional<std::uint64_t> seed) {
  std::string out = "# " + std::string(kToolName) + " " + std::string(kToolVersion) + " " +
                    std::string(command) + "\n# config:";
  for (const auto& [k, v] : config) out += " " + k + "=" + v;
  out += "\n# seed: " + opt_str(seed) + "\n";
  return out;
}

int cmd_build_index(const BuildIndexOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto raw = load_edges(o.edges);
  KnowledgeIndex index;
  index.taxonomy = break_cycles(raw);
  index.closure = materialize_closure(index.taxonomy);
  index.memberships = load_memberships(o.memberships, index.taxonomy, index.closure,
                                       {.strict = !o.lenient});
  save_index(index, o.out);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& t = index.taxonomy;
  out << report_header("build-index",
                       {{"edges", o.edges},
                        {"memberships", o.memberships},
                        {"out", o.out},
                        {"lenient", o.lenient ? "true" : "false"}},
                       std::nullopt);
  out << "concepts\t" << t.size() << '\n'
      << "individuals\t" << index.memberships.size() << '\n'
      << "edges_loaded\t" << raw.edges.size() << '\n'
      << "duplicate_edges\t" << t.duplicate_edges() << '\n'
      << "dag_edges\t" << t.dag_edges().size() << '\n'
      << "removed_cycle_edges\t" << t.removed_edges().size() << '\n'
      << "duplicate_memberships\t" << index.memberships.duplicate_rows() << '\n'
      << "closure_entries\t" << index.closure.total_entries() << '\n'
      << "closure_bytes_actual\t" << index.closure.memory_bytes() << '\n'
      << "closure_bytes_predicted\t"
      << ClosureIndex::predicted_memory_bytes(t.size(), index.closure.total_entries()) << '\n';
  err << "build-index: " << fixed(seconds, 2) << " s\n";
  return kExitOk;
}

int cmd_explain(const ExplainOptions& o, std::ostream& out, std::ostream& err) {
  validate(o.induction);
  const auto index = load_index(o.index);
  auto positives = read_list_file(o.positives);
  auto negatives = read_list_file(o.negatives);
  if (positives.empty() || negatives.empty()) {
    throw UsageError("example files must be nonempty (" + o.positives + ", " + o.negatives + ")");
  }
  if (o.baseline_seed) {
    auto [a, b] = semi_random_baseline(std::span<const std::string>(positives),
                                       std::span<const std::string>(negatives),
                                       derive_seed(*o.baseline_seed, Stream::kSemiRandomBaseline));
    positives = std::move(a);
    negatives = std::move(b);
  }
  const auto examples = resolve_examples(positives, negatives, index.memberships);

  std::optional<ConcretenessTable> table;
  if (!o.concreteness.empty()) {
    table = load_concreteness(o.concreteness);
    for (const auto& w : table->warnings()) err << "warning: " << o.concreteness << ": " << w << '\n';
  }

  auto config = o.induction;
  config.top_k = std::max(config.top_k, o.ranking_depth);
  const auto result = induce(examples, index.memberships, index.taxonomy, index.closure, config);

  const ConfigEcho echo{
      {"index", o.index},
      {"positives", o.positives},
      {"negatives", o.negatives},
      {"metric", std::string(to_string(o.induction.metric))},
      {"max_conjuncts", std::to_string(o.induction.max_conjuncts)},
      {"max_disjuncts", std::to_string(o.induction.max_disjuncts)},
      {"beam_width", std::to_string(o.induction.beam_width)},
      {"top_k", std::to_string(o.induction.top_k)},
      {"alpha", fixed(o.induction.alpha, 6)},
      {"ranking_depth", std::to_string(o.ranking_depth)},
      {"baseline_seed", opt_str(o.baseline_seed)},
      {"concreteness", or_dash(o.concreteness)},
      {"threshold", fixed(o.threshold, 6)},
      {"alphabetize", o.alphabetize ? "true" : "false"},
  };

  std::vector<std::string> labels;
  for (const auto& sc : result.ranked) {
    labels.push_back(display_render(sc.candidate, index.taxonomy.concepts()));
  }

  std::optional<Explanation> explanation;
  if (!result.no_explanation()) {
    MachineExplanationOptions mo;
    mo.k = std::min(o.induction.top_k, kMaxExplanationLength);
    mo.table = table ? &*table : nullptr;
    mo.threshold = o.threshold;
    mo.metric = o.induction.metric;
    mo.seed = o.baseline_seed;
    mo.kind = o.baseline_seed ? ExplanationKind::kSemiRandom : ExplanationKind::kEcii;
    explanation = assemble_machine_explanation(std::span<const std::string>(labels), mo);
    if (explanation && o.alphabetize) explanation = alphabetize(std::move(*explanation));
  }

  std::ostringstream text;
  text << report_header("explain", echo, o.baseline_seed);
  text << "# positives=" << examples.positives().size()
       << " negatives=" << examples.negatives().size()
       << " candidates_scored=" << result.candidates_scored << '\n';
  text << "# rank\tlabel\tconcept\ttp\tfp\tfn\ttn\tprecision\trecall\tf1\thybrid\n";
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& sc = result.ranked[i];
    const auto& s = sc.scores;
    text << "# " << (i + 1) << '\t' << labels[i] << '\t' << sc.label << '\t' << s.tp << '\t'
         << s.fp << '\t' << s.fn << '\t' << s.tn << '\t' << fixed(s.precision, 6) << '\t'
         << fixed(s.recall, 6) << '\t' << fixed(s.f1, 6) << '\t' << fixed(s.hybrid, 6) << '\n';
  }
  if (explanation) text << to_text_line(*explanation) << '\n';

  nlohmann::ordered_json json;
  json["tool"] = std::string(kToolName) + " " + std::string(kToolVersion);
  json["command"] = "explain";
  auto& jconfig = json["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : echo) jconfig[k] = v;
  json["seed"] = o.baseline_seed ? nlohmann::ordered_json(*o.baseline_seed) : nlohmann::ordered_json();
  auto& jranked = json["ranked"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.ranked.size(); ++i) {
    const auto& s = result.ranked[i].scores;
    jranked.push_back({{"label", labels[i]},
                       {"concept", result.ranked[i].label},
                       {"tp", s.tp},
                       {"fp", s.fp},
                       {"fn", s.fn},
                       {"tn", s.tn},
                       {"precision", s.precision},
                       {"recall", s.recall},
                       {"f1", s.f1},
                       {"hybrid", s.hybrid}});
  }
  auto& jexp = json["explanations"] = nlohmann::ordered_json::array();
  if (explanation) {
    jexp.push_back({{"kind", to_string(explanation->kind)},
                    {"metric", explanation->metric ? nlohmann::ordered_json(std::string(to_string(*explanation->metric)))
                                                   : nlohmann::ordered_json()},
                    {"seed", explanation->seed ? nlohmann::ordered_json(*explanation->seed) : nlohmann::ordered_json()},
                    {"filtered", explanation->filtered},
                    {"alphabetized", explanation->alphabetized},
                    {"short", explanation->short_list},
                    {"concepts", explanation->concepts}});
  }

  out << text.str();
  if (!o.out_text.empty()) write_text_file(o.out_text, text.str());
  if (!o.out_json.empty()) write_text_file(o.out_json, json.dump(2) + "\n");

  if (result.no_explanation()) {
    err << "no explanation: no concept covers any positive example\n";
    return kExitNoExplanation;
  }
  if (!explanation) {
    err << "no explanation: insufficient concepts survive the concreteness filter\n";
    return kExitNoExplanation;
  }
  return kExitOk;
}

int cmd_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& err) {
  auto items = load_items(o.items);
  auto ds = make_binary_dataset(std::move(items), o.target, o.ingest, o.seed);
  const auto vocab = TagVocabulary::from_items(ds.items);
  std::vector<Example> data;
  data.reserve(ds.items.size());
  for (std::size_t i = 0; i < ds.items.size(); ++i) {
    data.push_back({vectorize(ds.items[i].tags, vocab).features, ds.truth[i]});
  }
  const auto preds = kfold_eval(data, o.k, derive_seed(o.seed, Stream::kFolds), o.train);
  std::vector<int> predicted;
  for (const auto& p : preds) predicted.push_back(p.predicted);
  const auto groups = confusion_groups(predicted, ds.truth);

  const std::map<std::string_view, const std::vector<std::size_t>*> by_name{
      {"TP", &groups.tp}, {"TN", &groups.tn}, {"FP", &groups.fp}, {"FN", &groups.fn}};
  std::vector<std::string> group_of(ds.items.size());
  for (const auto& [name, members] : by_name) {
    for (auto i : *members) group_of[i] = std::string(name);
  }

  const ConfigEcho echo{{"items", o.items},
                        {"target", o.target},
                        {"k", std::to_string(o.k)},
                        {"l2", fixed(o.train.l2, 6)},
                        {"max_iter", std::to_string(o.train.max_iter)},
                        {"tol", fixed(o.train.tol, 12)},
                        {"min_tags", std::to_string(o.ingest.min_tags)},
                        {"balance", o.ingest.balance ? "true" : "false"},
                        {"cap", std::to_string(o.cap)}};
  const auto header = report_header("classify", echo, o.seed);

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  {
    std::ostringstream csv;
    csv << header << "item_id,truth,pred,prob,group\n";
    for (std::size_t i = 0; i < ds.items.size(); ++i) {
      csv << ds.items[i].id << ',' << ds.truth[i] << ',' << preds[i].predicted << ','
          << fixed(preds[i].probability, 6) << ',' << group_of[i] << '\n';
    }
    write_text_file((dir / "predictions.csv").string(), csv.str());
  }
  const auto ids = [&](const std::vector<std::size_t>& members) {
    std::string s;
    for (auto i : members) s += ds.items[i].id + "\n";
    return s;
  };
  for (const auto& cmp : kComparisons) {
    const auto& pos = *by_name.at(cmp.positive);
    const auto& neg = *by_name.at(cmp.negative);
    if (pos.empty() || neg.empty()) {
      err << "warning: " << cmp.stem << ": empty group "
          << (pos.empty() ? cmp.positive : cmp.negative) << "; comparison cannot be explained\n";
    }
    write_text_file((dir / (std::string(cmp.stem) + ".positives.txt")).string(), ids(pos));
    write_text_file((dir / (std::string(cmp.stem) + ".negatives.txt")).string(), ids(neg));
  }
  {
    std::ostringstream samples;
    samples << header << "group\titem_id\n";
    std::uint64_t counter = 0;
    for (const auto* name : {"TP", "TN", "FP", "FN"}) {
      const auto& members = *by_name.at(name);
      for (auto i : sample_group(members, o.cap, derive_seed(o.seed, Stream::kGroupSample, counter++))) {
        samples << name << '\t' << ds.items[i].id << '\n';
      }
    }
    write_text_file((dir / "samples.tsv").string(), samples.str());
  }

  out << header;
  out << "items\t" << ds.items.size() << '\n'
      << "dropped_few_tags\t" << ds.dropped_few_tags << '\n'
      << "dropped_balance\t" << ds.dropped_balance << '\n'
      << "vocabulary\t" << vocab.size() << '\n'
      << "TP\t" << groups.tp.size() << '\n'
      << "TN\t" << groups.tn.size() << '\n'
      << "FP\t" << groups.fp.size() << '\n'
      << "FN\t" << groups.fn.size() << '\n';
  return kExitOk;
}

int cmd_bt(const BtOptions& o, std::ostream& out, std::ostream& err) {
  const auto tallies = load_tallies(o.tally);
  BTOptions bo;
  bo.penalty = o.penalty;
  bo.tol = o.tol;
  bo.max_iter = o.max_iter;

  std::ostringstream report;
  report << report_header("bt",
                          {{"tally", o.tally},
                           {"reference", o.reference},
                           {"penalty", fixed(o.penalty, 6)},
                           {"tol", fixed(o.tol, 12)},
                           {"max_iter", std::to_string(o.max_iter)}},
                          std::nullopt);
  report << "set,reference,abilities,loglik,deviance,iterations,converged\n";
  std::size_t failures = 0;
  for (const auto& [name, tally] : tallies) {
    try {
      const auto fit = fit_bradley_terry(tally, o.reference, bo);
      std::string abilities;
      for (std::size_t i = 0; i < fit.items.size(); ++i) {
        if (i) abilities += ';';
        abilities += fit.items[i] + "=" + fixed(fit.abilities[i], 4);
      }
      report << name << ',' << o.reference << ',' << abilities << ',' << fixed(fit.loglik, 4) << ','
             << fixed(bt_deviance(tally, fit), 4) << ',' << fit.iterations << ','
             << (fit.converged ? "true" : "false") << '\n';
    } catch (const EstimatorError& e) {
      ++failures;
      err << "set '" << name << "': " << e.what() << '\n';
    }
  }
  out << report.str();
  if (!o.out.empty()) write_text_file(o.out, report.str());
  if (failures) {
    err << failures << " tally(ies) could not be fitted";
    if (o.penalty == 0) err << "; try --penalty 0.01";
    err << '\n';
    return kExitEstimator;
  }
  return kExitOk;
}

int cmd_sdt(const SdtOptions& o, std::ostream& out, std::ostream& err) {
  const auto rows = load_sdt_counts(o.counts);
  std::ostringstream report;
  report << report_header("sdt",
                          {{"counts", o.counts}, {"correction", std::string(to_string(o.correction))}},
                          std::nullopt);
  report << "label,hits,misses,false_alarms,correct_rejections,hit_rate,false_alarm_rate,d_prime,c,corrected\n";
  std::size_t failures = 0;
  for (const auto& r : rows) {
    try {
      const auto e = sdt_estimate(r.hits, r.misses, r.false_alarms, r.correct_rejections, o.correction);
      report << r.label << ',' << r.hits << ',' << r.misses << ',' << r.false_alarms << ','
             << r.correct_rejections << ',' << fixed(e.hit_rate, 6) << ','
             << fixed(e.false_alarm_rate, 6) << ',' << fixed(e.d_prime, 6) << ',' << fixed(e.c, 6)
             << ',' << (e.corrected ? "true" : "false") << '\n';
    } catch (const Error& e) {
      ++failures;
      err << "row '" << r.label << "': " << e.what() << '\n';
    }
  }
  out << report.str();
  if (!o.out.empty()) write_text_file(o.out, report.str());
  return failures ? kExitEstimator : kExitOk;
}

int cmd_map_labels(const MapLabelsOptions& o, std::ostream& out, std::ostream& err) {
  if (o.labels.empty() == o.items.empty()) throw UsageError("give exactly one of --labels or --items");
  std::vector<Item> items;
  std::vector<std::string> labels;
  if (!o.items.empty()) {
    items = load_items(o.items);
    std::set<std::string> seen;
    for (const auto& item : items) {
      for (const auto& tag : item.tags) {
        if (seen.insert(tag).second) labels.push_back(tag);
      }
    }
  } else {
    labels = read_list_file(o.labels);
  }

  std::unique_ptr<HttpAnnotationClient> client;
  if (o.service) client = std::make_unique<HttpAnnotationClient>(*o.service);
  const auto result = map_labels(labels, o.mapfile, client.get(), o.cache);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  std::ostringstream body;
  body << report_header("map-labels",
                        {{"labels", or_dash(o.labels)},
                         {"items", or_dash(o.items)},
                         {"mapfile", or_dash(o.mapfile)},
                         {"cache", or_dash(o.cache)},
                         {"service", o.service ? o.service->base_url + o.service->path : "-"}},
                        std::nullopt);
  if (!o.items.empty()) {
    std::map<std::string, const LabelMapping*> by_label;
    for (const auto& m : result.mapped) by_label.emplace(m.label, &m);
    for (const auto& item : items) {
      std::set<std::string> written;
      for (const auto& tag : item.tags) {
        auto it = by_label.find(tag);
        if (it == by_label.end()) continue;
        for (const auto& c : it->second->concepts) {
          if (written.insert(c).second) body << item.id << '\t' << c << '\n';
        }
      }
    }
  } else {
    for (const auto& m : result.mapped) {
      for (const auto& c : m.concepts) body << m.label << '\t' << c << '\t' << to_string(m.source) << '\n';
    }
  }
  if (!o.out.empty()) {
    write_text_file(o.out, body.str());
  } else {
    out << body.str();
  }
  err << "mapped " << result.mapped.size() << ", unmapped " << result.unmapped.size()
      << ", service calls " << result.service_calls << '\n';
  for (const auto& u : result.unmapped) err << "unmapped\t" << u << '\n';
  return kExitOk;
}

int run_guarded(const std::function<int()>& command, std::ostream& err) {
  try {
    return command();
  } catch (const EstimatorError& e) {
    err << "error: " << e.what() << '\n';
    return kExitEstimator;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace dx
