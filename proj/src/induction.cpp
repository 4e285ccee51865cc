#include "dx/induction.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <unordered_map>

namespace dx {

Metric parse_metric(std::string_view name) {
  if (name == "f1") return Metric::kF1;
  if (name == "precision") return Metric::kPrecision;
  if (name == "recall") return Metric::kRecall;
  if (name == "hybrid") return Metric::kHybrid;
  throw UsageError("unknown metric '" + std::string(name) +
                   "' (expected f1, precision, recall or hybrid)");
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::kF1: return "f1";
    case Metric::kPrecision: return "precision";
    case Metric::kRecall: return "recall";
    case Metric::kHybrid: return "hybrid";
  }
  return "?";
}

ExampleSets ExampleSets::make(std::vector<IndividualId> positives,
                              std::vector<IndividualId> negatives) {
  const auto dedupe = [](std::vector<IndividualId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  dedupe(positives);
  dedupe(negatives);
  if (positives.empty()) throw UsageError("positive example set is empty");
  if (negatives.empty()) throw UsageError("negative example set is empty");
  std::vector<IndividualId> both;
  std::set_intersection(positives.begin(), positives.end(), negatives.begin(), negatives.end(),
                        std::back_inserter(both));
  if (!both.empty()) {
    throw UsageError(std::to_string(both.size()) +
                     " individual(s) appear in both positive and negative examples");
  }
  ExampleSets ex;
  ex.positives_ = std::move(positives);
  ex.negatives_ = std::move(negatives);
  return ex;
}

ExampleSets resolve_examples(std::span<const std::string> positives,
                             std::span<const std::string> negatives, const MembershipIndex& idx) {
  std::vector<std::string> missing;
  const auto resolve = [&](std::span<const std::string> iris) {
    std::vector<IndividualId> ids;
    for (const auto& iri : iris) {
      if (auto id = idx.find(iri)) {
        ids.push_back(*id);
      } else {
        missing.push_back(iri);
      }
    }
    return ids;
  };
  auto p = resolve(positives);
  auto n = resolve(negatives);
  if (!missing.empty()) {
    std::string msg = std::to_string(missing.size()) + " example individual(s) not in the index:";
    for (std::size_t i = 0; i < missing.size() && i < 5; ++i) msg += " '" + missing[i] + "'";
    if (missing.size() > 5) msg += " ...";
    throw LookupError(msg);
  }
  return ExampleSets::make(std::move(p), std::move(n));
}

CandidateConcept CandidateConcept::atom(ConceptId c) {
  CandidateConcept out;
  out.terms_ = {{c}};
  return out;
}

CandidateConcept CandidateConcept::conjunction(std::vector<ConceptId> atoms) {
  if (atoms.empty()) throw UsageError("empty conjunction");
  auto sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw UsageError("conjunction repeats an atom");
  }
  CandidateConcept out;
  out.terms_ = {std::move(atoms)};
  return out;
}

CandidateConcept CandidateConcept::disjunction(std::vector<std::vector<ConceptId>> terms) {
  if (terms.empty()) throw UsageError("empty disjunction");
  for (auto& t : terms) {
    auto sorted = t;
    std::sort(sorted.begin(), sorted.end());
    if (t.empty() || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw UsageError("malformed disjunction term");
    }
  }
  std::vector<std::vector<ConceptId>> keys;
  for (auto t : terms) {
    std::sort(t.begin(), t.end());
    keys.push_back(std::move(t));
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
    throw UsageError("disjunction repeats a term");
  }
  CandidateConcept out;
  out.terms_ = std::move(terms);
  return out;
}

Shape CandidateConcept::shape() const {
  if (terms_.size() > 1) return Shape::kOr;
  return terms_.front().size() > 1 ? Shape::kAnd : Shape::kAtom;
}

std::size_t CandidateConcept::atom_count() const {
  std::size_t n = 0;
  for (const auto& t : terms_) n += t.size();
  return n;
}

void CandidateConcept::canonicalize(const Interner& names) {
  const auto by_name = [&](ConceptId a, ConceptId b) { return names.name(a) < names.name(b); };
  for (auto& t : terms_) std::sort(t.begin(), t.end(), by_name);
  std::sort(terms_.begin(), terms_.end(), [&](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), by_name);
  });
}

std::string render(const CandidateConcept& c, const Interner& names) {
  std::string out;
  const bool multi = c.terms().size() > 1;
  for (std::size_t i = 0; i < c.terms().size(); ++i) {
    const auto& t = c.terms()[i];
    if (i) out += " or ";
    const bool parens = multi && t.size() > 1;
    if (parens) out += '(';
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (j) out += " and ";
      out += names.name(t[j]);
    }
    if (parens) out += ')';
  }
  return out;
}

double ScoreSet::value(Metric m) const {
  switch (m) {
    case Metric::kF1: return f1;
    case Metric::kPrecision: return precision;
    case Metric::kRecall: return recall;
    case Metric::kHybrid: return hybrid;
  }
  return 0;
}

ScoreSet make_scores(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn,
                     double alpha) {
  ScoreSet s{tp, fp, fn, tn};
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  // 2PR/(P+R) reduces to 2tp/(2tp+fp+fn).
  s.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  s.hybrid = alpha * s.f1 + (1.0 - alpha) * s.precision;
  return s;
}

bool candidate_covers(const CandidateConcept& cand, const MembershipIndex& idx, IndividualId i) {
  for (const auto& term : cand.terms()) {
    bool all = true;
    for (ConceptId c : term) {
      if (!idx.covers(c, i)) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

ScoreSet score(const CandidateConcept& cand, const ExampleSets& examples,
               const MembershipIndex& idx, double alpha) {
  std::uint64_t tp = 0, fp = 0;
  for (auto p : examples.positives()) tp += candidate_covers(cand, idx, p);
  for (auto n : examples.negatives()) fp += candidate_covers(cand, idx, n);
  const std::uint64_t np = examples.positives().size(), nn = examples.negatives().size();
  return make_scores(tp, fp, np - tp, nn - fp, alpha);
}

void validate(const InductionConfig& config) {
  if (config.max_conjuncts < 1) throw UsageError("max_conjuncts must be >= 1");
  if (config.max_disjuncts < 1) throw UsageError("max_disjuncts must be >= 1");
  if (config.beam_width < 1) throw UsageError("beam_width must be >= 1");
  if (config.top_k < 1) throw UsageError("top_k must be >= 1");
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
}

namespace {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }
  Bits operator|(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] |= o.words_[k];
    return r;
  }
  bool operator==(const Bits&) const = default;

  // Bits set in [0, n).
  std::uint64_t count_below(std::size_t n) const {
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < words_.size() && k * 64 < n; ++k) {
      std::uint64_t w = words_[k];
      const std::size_t hi = n - k * 64;
      if (hi < 64) w &= (std::uint64_t{1} << hi) - 1;
      total += static_cast<std::uint64_t>(std::popcount(w));
    }
    return total;
  }
  std::uint64_t count() const {
    std::uint64_t total = 0;
    for (auto w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
  }

 private:
  std::vector<std::uint64_t> words_;
};

using Term = std::vector<std::uint32_t>;  // pool atom indices, ascending

struct Cand {
  std::vector<Term> terms;  // ascending lexicographic
  Bits cov;
  ScoreSet scores;
  std::size_t atoms = 0;
};

// Atoms covering at least one positive, indexed in ascending IRI order so that
// comparing index sequences is comparing IRI sequences.
struct Pool {
  std::vector<ConceptId> concept_of;
  std::vector<Bits> cover;
  std::size_t np = 0, nn = 0;
};

Pool build_pool(const ExampleSets& ex, const MembershipIndex& idx, const Taxonomy& taxonomy) {
  Pool pool;
  pool.np = ex.positives().size();
  pool.nn = ex.negatives().size();
  const std::size_t total = pool.np + pool.nn;

  std::unordered_map<ConceptId, Bits> covers;
  std::size_t pos = 0;
  const auto add = [&](IndividualId ind) {
    for (ConceptId c : idx.inferred(ind)) {
      auto [it, inserted] = covers.try_emplace(c, total);
      it->second.set(pos);
    }
    ++pos;
  };
  for (auto p : ex.positives()) add(p);
  for (auto n : ex.negatives()) add(n);

  const auto& names = taxonomy.concepts();
  for (const auto& [c, bits] : covers) {
    if (bits.count_below(pool.np) > 0) pool.concept_of.push_back(c);
  }
  std::sort(pool.concept_of.begin(), pool.concept_of.end(),
            [&](ConceptId a, ConceptId b) { return names.name(a) < names.name(b); });
  pool.cover.reserve(pool.concept_of.size());
  for (ConceptId c : pool.concept_of) pool.cover.push_back(covers.at(c));
  return pool;
}

class Search {
 public:
  Search(const Pool& pool, const ClosureIndex& closure, const InductionConfig& config)
      : pool_(pool), closure_(closure), config_(config) {}

  bool better(const Cand& a, const Cand& b) const {
    const double va = a.scores.value(config_.metric), vb = b.scores.value(config_.metric);
    if (va != vb) return va > vb;
    if (a.atoms != b.atoms) return a.atoms < b.atoms;
    return a.terms < b.terms;
  }

  void sort(std::vector<Cand>& v) const {
    std::sort(v.begin(), v.end(), [this](const Cand& a, const Cand& b) { return better(a, b); });
  }

  Cand make(std::vector<Term> terms, Bits cov) {
    Cand c;
    for (const auto& t : terms) c.atoms += t.size();
    c.terms = std::move(terms);
    const auto tp = cov.count_below(pool_.np);
    const auto fp = cov.count() - tp;
    c.scores = make_scores(tp, fp, pool_.np - tp, pool_.nn - fp, config_.alpha);
    c.cov = std::move(cov);
    ++scored_;
    return c;
  }

  std::vector<Cand> atoms() {
    std::vector<Cand> out;
    out.reserve(pool_.concept_of.size());
    for (std::uint32_t a = 0; a < pool_.concept_of.size(); ++a) out.push_back(make({{a}}, pool_.cover[a]));
    return out;
  }

  bool related(std::uint32_t a, std::uint32_t b) const {
    const auto ca = pool_.concept_of[a], cb = pool_.concept_of[b];
    return closure_.contains(ca, cb) || closure_.contains(cb, ca);
  }

  Bits term_cover(const Term& t, std::size_t skip = static_cast<std::size_t>(-1)) const {
    Bits cov;
    bool first = true;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k == skip) continue;
      cov = first ? pool_.cover[t[k]] : cov & pool_.cover[t[k]];
      first = false;
    }
    return cov;
  }

  // Every atom strictly narrows the coverage of the others.
  bool conjunction_needed(const Term& t, const Bits& cov) const {
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (term_cover(t, k) == cov) return false;
    }
    return true;
  }

  // Every term covers a positive none of the other terms cover.
  bool disjunction_needed(const std::vector<Bits>& covers) const {
    for (std::size_t k = 0; k < covers.size(); ++k) {
      Bits others(pool_.np + pool_.nn);
      for (std::size_t j = 0; j < covers.size(); ++j) {
        if (j != k) others = others | covers[j];
      }
      if ((others | covers[k]).count_below(pool_.np) == others.count_below(pool_.np)) return false;
    }
    return true;
  }

  std::uint64_t scored() const { return scored_; }
  const Pool& pool() const { return pool_; }
  const InductionConfig& config() const { return config_; }

 private:
  const Pool& pool_;
  const ClosureIndex& closure_;
  const InductionConfig& config_;
  std::uint64_t scored_ = 0;
};

InductionResult finish(Search& search, std::vector<Cand> all, const Taxonomy& taxonomy) {
  const auto k = std::min(search.config().top_k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    [&](const Cand& a, const Cand& b) { return search.better(a, b); });
  InductionResult result;
  result.candidates_scored = search.scored();
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::vector<ConceptId>> terms;
    for (const auto& t : all[i].terms) {
      std::vector<ConceptId> ids;
      for (auto a : t) ids.push_back(search.pool().concept_of[a]);
      terms.push_back(std::move(ids));
    }
    auto cand = terms.size() == 1 ? CandidateConcept::conjunction(std::move(terms.front()))
                                  : CandidateConcept::disjunction(std::move(terms));
    auto label = render(cand, taxonomy.concepts());
    result.ranked.push_back({std::move(cand), all[i].scores, std::move(label)});
  }
  return result;
}

std::uint64_t saturating_binomial_sum(std::uint64_t n, std::uint64_t lo, std::uint64_t hi,
                                      std::uint64_t cap) {
  std::uint64_t total = 0;
  for (std::uint64_t j = lo; j <= hi && j <= n; ++j) {
    // C(n, j) computed incrementally; stop as soon as it passes cap.
    long double c = 1;
    for (std::uint64_t i = 1; i <= j; ++i) c = c * static_cast<long double>(n - j + i) / i;
    if (c > static_cast<long double>(cap)) return cap + 1;
    total += static_cast<std::uint64_t>(c + 0.5L);
    if (total > cap) return cap + 1;
  }
  return total;
}

}  // namespace

InductionResult induce(const ExampleSets& examples, const MembershipIndex& idx,
                       const Taxonomy& taxonomy, const ClosureIndex& closure,
                       const InductionConfig& config) {
  validate(config);
  const Pool pool = build_pool(examples, idx, taxonomy);
  Search search(pool, closure, config);
  std::vector<Cand> all = search.atoms();
  if (all.empty()) return {};
  search.sort(all);

  const std::size_t beam = std::min(config.beam_width, all.size());
  std::vector<std::uint32_t> beam_atoms;
  for (std::size_t i = 0; i < beam; ++i) beam_atoms.push_back(all[i].terms.front().front());

  // Conjunctions, one level per extra atom.
  std::vector<Cand> level(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(beam));
  std::set<Term> seen;
  for (std::size_t size = 2; size <= config.max_conjuncts && !level.empty(); ++size) {
    std::vector<Cand> next;
    for (const auto& base : level) {
      const Term& bt = base.terms.front();
      for (auto a : beam_atoms) {
        if (std::find(bt.begin(), bt.end(), a) != bt.end()) continue;
        Term t = bt;
        t.insert(std::upper_bound(t.begin(), t.end(), a), a);
        if (!seen.insert(t).second) continue;
        if (std::any_of(bt.begin(), bt.end(), [&](auto b) { return search.related(a, b); })) continue;
        Bits cov = base.cov & pool.cover[a];
        if (cov.count_below(pool.np) == 0) continue;
        if (!search.conjunction_needed(t, cov)) continue;
        next.push_back(search.make({t}, std::move(cov)));
      }
    }
    search.sort(next);
    all.insert(all.end(), next.begin(), next.end());
    if (next.size() > config.beam_width) next.resize(config.beam_width);
    level = std::move(next);
  }

  // Greedy unions seeded from the best atoms/conjunctions.
  if (config.max_disjuncts > 1) {
    search.sort(all);
    const std::vector<Cand> partners(
        all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(config.beam_width, all.size())));
    std::set<std::vector<Term>> seen_or;
    std::vector<Cand> unions;
    for (const auto& seed : partners) {
      Cand cur = seed;
      std::vector<Bits> covers{seed.cov};
      for (std::size_t round = 2; round <= config.max_disjuncts; ++round) {
        std::optional<Cand> best;
        std::size_t best_partner = 0;
        const auto cur_tp = cur.cov.count_below(pool.np);
        for (std::size_t q = 0; q < partners.size(); ++q) {
          const Term& qt = partners[q].terms.front();
          if (std::find(cur.terms.begin(), cur.terms.end(), qt) != cur.terms.end()) continue;
          Bits cov = cur.cov | partners[q].cov;
          if (cov.count_below(pool.np) <= cur_tp) continue;
          auto with = covers;
          with.push_back(partners[q].cov);
          if (!search.disjunction_needed(with)) continue;
          auto terms = cur.terms;
          terms.insert(std::upper_bound(terms.begin(), terms.end(), qt), qt);
          Cand c = search.make(std::move(terms), std::move(cov));
          if (c.scores.value(config.metric) < cur.scores.value(config.metric)) continue;
          if (!best || search.better(c, *best)) {
            best = std::move(c);
            best_partner = q;
          }
        }
        if (!best) break;
        covers.push_back(partners[best_partner].cov);
        cur = std::move(*best);
        if (seen_or.insert(cur.terms).second) unions.push_back(cur);
      }
    }
    all.insert(all.end(), unions.begin(), unions.end());
  }
  return finish(search, std::move(all), taxonomy);
}

InductionResult exhaustive_induce(const ExampleSets& examples, const MembershipIndex& idx,
                                  const Taxonomy& taxonomy, const ClosureIndex& closure,
                                  const InductionConfig& config) {
  validate(config);
  const Pool pool = build_pool(examples, idx, taxonomy);
  Search search(pool, closure, config);
  const std::uint64_t cap = config.exhaustive_cap;
  const std::uint64_t n_atoms = pool.concept_of.size();
  if (n_atoms > cap) throw CapExceeded("candidate space exceeds the exhaustive cap");

  // Upper bound on conjunction subsets before any pruning.
  if (n_atoms + saturating_binomial_sum(n_atoms, 2, config.max_conjuncts, cap) > cap) {
    throw CapExceeded("conjunction space exceeds the exhaustive cap of " + std::to_string(cap));
  }
  std::vector<Cand> all = search.atoms();
  if (all.empty()) return {};

  // Depth-first over ascending atom indices. Subsumption conflicts, lost
  // positive coverage and unneeded atoms all persist in supersets, so any of
  // them prunes the subtree.
  std::vector<Cand> conjunctions;
  Term term;
  const auto extend = [&](auto&& self, const Bits& cov, std::uint32_t from) -> void {
    for (std::uint32_t a = from; a < n_atoms; ++a) {
      if (std::any_of(term.begin(), term.end(), [&](auto b) { return search.related(a, b); })) continue;
      Bits next = cov & pool.cover[a];
      if (next.count_below(pool.np) == 0) continue;
      term.push_back(a);
      if (search.conjunction_needed(term, next)) {
        conjunctions.push_back(search.make({term}, next));
        if (term.size() < config.max_conjuncts) self(self, next, a + 1);
      }
      term.pop_back();
    }
  };
  if (config.max_conjuncts > 1) {
    for (std::uint32_t a = 0; a < n_atoms; ++a) {
      term = {a};
      extend(extend, pool.cover[a], a + 1);
    }
  }
  all.insert(all.end(), conjunctions.begin(), conjunctions.end());

  if (config.max_disjuncts > 1) {
    const std::uint64_t children = all.size();
    if (children + saturating_binomial_sum(children, 2, config.max_disjuncts, cap) > cap) {
      throw CapExceeded("disjunction space exceeds the exhaustive cap of " + std::to_string(cap));
    }
    std::sort(all.begin(), all.end(),
              [](const Cand& a, const Cand& b) { return a.terms < b.terms; });
    const std::size_t n_children = all.size();
    std::vector<std::size_t> chosen;
    std::vector<Bits> covers;
    std::vector<Cand> unions;
    const auto grow = [&](auto&& self, const Bits& cov, std::size_t from) -> void {
      for (std::size_t c = from; c < n_children; ++c) {
        Bits next = cov | all[c].cov;
        if (next.count_below(pool.np) == cov.count_below(pool.np)) continue;
        covers.push_back(all[c].cov);
        if (search.disjunction_needed(covers)) {
          chosen.push_back(c);
          std::vector<Term> terms;
          for (auto k : chosen) terms.push_back(all[k].terms.front());
          std::sort(terms.begin(), terms.end());
          unions.push_back(search.make(std::move(terms), next));
          if (chosen.size() < config.max_disjuncts) self(self, next, c + 1);
          chosen.pop_back();
        }
        covers.pop_back();
      }
    };
    for (std::size_t c = 0; c < n_children; ++c) {
      chosen = {c};
      covers = {all[c].cov};
      grow(grow, all[c].cov, c + 1);
    }
    all.insert(all.end(), unions.begin(), unions.end());
  }
  return finish(search, std::move(all), taxonomy);
}

}  // namespace dx
