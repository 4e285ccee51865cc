#include "dx/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "dx/text.hpp"

namespace dx {

std::string_view to_string(ExplanationKind k) {
  switch (k) {
    case ExplanationKind::kEcii: return "ecii";
    case ExplanationKind::kHumanGold: return "human_gold";
    case ExplanationKind::kSemiRandom: return "semi_random";
  }
  return "?";
}

void ConcretenessTable::add(std::string_view word, double rating, std::size_t line) {
  auto key = normalize_key(word);
  if (!ratings_.emplace(key, rating).second) {
    warnings_.push_back("duplicate word '" + key + "'" +
                        (line ? " on line " + std::to_string(line) : std::string()) +
                        " ignored; keeping the first rating");
  }
}

std::optional<double> ConcretenessTable::find(std::string_view word) const {
  auto it = ratings_.find(normalize_key(word));
  if (it == ratings_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ConcretenessTable::rate(std::string_view label) const {
  if (auto r = find(label)) return r;
  double sum = 0;
  std::size_t words = 0;
  std::string_view rest = label;
  while (!rest.empty()) {
    const auto cut = rest.find_first_of(" _-\t");
    const auto word = rest.substr(0, cut);
    rest = cut == std::string_view::npos ? std::string_view{} : rest.substr(cut + 1);
    if (word.empty()) continue;
    const auto r = find(word);
    if (!r) return std::nullopt;
    sum += *r;
    ++words;
  }
  if (words < 2) return std::nullopt;
  return sum / static_cast<double>(words);
}

ConcretenessTable load_concreteness(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, 1, "missing header 'word,rating'");
  const auto header = split(line, ',');
  std::size_t word_col = header.size(), rating_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = normalize_key(header[i]);
    if (name == "word") word_col = i;
    if (name == "rating") rating_col = i;
  }
  if (word_col == header.size() || rating_col == header.size()) {
    throw ParseError(path, 1, "header must name 'word' and 'rating' columns");
  }
  ConcretenessTable table;
  while (reader.next(line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw ParseError(path, reader.line_number(),
                       "expected " + std::to_string(header.size()) + " columns");
    }
    const std::string text(trim(fields[rating_col]));
    char* end = nullptr;
    const double rating = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(rating)) {
      throw ParseError(path, reader.line_number(), "non-numeric rating '" + text + "'");
    }
    table.add(fields[word_col], rating, reader.line_number());
  }
  return table;
}

std::string display_label(std::string_view iri) {
  auto slash = iri.find_last_of('/');
  if (slash != std::string_view::npos && slash + 1 < iri.size()) iri.remove_prefix(slash + 1);
  constexpr std::string_view kCategory = "Category:";
  if (iri.substr(0, kCategory.size()) == kCategory && iri.size() > kCategory.size()) {
    iri.remove_prefix(kCategory.size());
  }
  std::string out(iri);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

std::optional<Explanation> assemble_machine_explanation(std::span<const std::string> ranked_labels,
                                                        const MachineExplanationOptions& options) {
  Explanation e;
  e.kind = options.kind;
  e.metric = options.metric;
  e.seed = options.seed;
  e.filtered = options.table != nullptr;
  const std::size_t k = std::min(options.k, kMaxExplanationLength);
  std::set<std::string> seen;
  for (const auto& label : ranked_labels) {
    if (e.concepts.size() == k) break;
    if (!seen.insert(label).second) continue;
    if (options.table) {
      const auto rating = options.table->rate(label);
      if (!rating || *rating < options.threshold) continue;
    }
    e.concepts.push_back(label);
  }
  if (e.concepts.empty()) return std::nullopt;
  e.short_list = e.concepts.size() < k;
  return e;
}

std::optional<Explanation> assemble_machine_explanation(std::span<const ScoredConcept> ranked,
                                                        const MachineExplanationOptions& options) {
  std::vector<std::string> labels;
  labels.reserve(ranked.size());
  for (const auto& sc : ranked) labels.push_back(sc.label);
  return assemble_machine_explanation(std::span<const std::string>(labels), options);
}

RaterLists::RaterLists(std::vector<std::vector<std::string>> lists) : lists_(std::move(lists)) {
  if (lists_.size() != 3) {
    throw UsageError("expected exactly 3 rater lists, got " + std::to_string(lists_.size()));
  }
  for (const auto& l : lists_) {
    if (l.size() < 7 || l.size() > 10) {
      throw UsageError("each rater list must hold 7 to 10 concepts, got " +
                       std::to_string(l.size()));
    }
  }
}

Explanation pool_gold_standard(const RaterLists& raters, std::uint64_t seed) {
  struct Entry {
    std::string display;
    std::size_t raters = 0;
  };
  std::map<std::string, Entry> by_key;
  for (const auto& list : raters.lists()) {
    std::set<std::string> mine;
    for (const auto& raw : list) {
      const auto label = trim(raw);
      if (label.empty()) continue;
      auto key = normalize_key(label);
      auto& entry = by_key[key];
      if (entry.display.empty() || label < entry.display) entry.display = std::string(label);
      if (mine.insert(key).second) ++entry.raters;
    }
  }

  Explanation e;
  e.kind = ExplanationKind::kHumanGold;
  e.seed = seed;
  // by_key iterates in key order, so each tier is alphabetical.
  for (std::size_t tier : {std::size_t{3}, std::size_t{2}}) {
    for (const auto& [key, entry] : by_key) {
      if (entry.raters == tier && e.concepts.size() < kMaxExplanationLength) {
        e.concepts.push_back(entry.display);
      }
    }
  }
  std::vector<std::string> rest;
  for (const auto& [key, entry] : by_key) {
    if (entry.raters < 2) rest.push_back(entry.display);
  }
  Rng rng(seed);
  const auto need = kMaxExplanationLength - e.concepts.size();
  for (auto& label : rng.sample(std::span<const std::string>(rest), need)) {
    e.concepts.push_back(std::move(label));
  }
  e.short_list = e.concepts.size() < kMaxExplanationLength;
  return e;
}

Explanation alphabetize(Explanation e) {
  std::stable_sort(e.concepts.begin(), e.concepts.end(),
                   [](const std::string& a, const std::string& b) {
                     return less_case_insensitive(a, b);
                   });
  e.alphabetized = true;
  return e;
}

std::string to_text_line(const Explanation& e) {
  std::string out(to_string(e.kind));
  out += '\t';
  out += e.metric ? std::string(to_string(*e.metric)) : "-";
  out += '\t';
  out += e.seed ? std::to_string(*e.seed) : "-";
  out += '\t';
  for (std::size_t i = 0; i < e.concepts.size(); ++i) {
    if (i) out += ';';
    out += e.concepts[i];
  }
  return out;
}

}  // namespace dx
