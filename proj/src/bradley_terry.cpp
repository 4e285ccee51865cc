#include "dx/bradley_terry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "dx/error.hpp"
#include "dx/text.hpp"

namespace dx {

PairwiseTally::PairwiseTally(std::vector<std::string> items) {
  for (const auto& item : items) intern(item);
}

std::size_t PairwiseTally::intern(std::string_view item) {
  auto it = std::find(items_.begin(), items_.end(), item);
  if (it != items_.end()) return static_cast<std::size_t>(it - items_.begin());
  items_.emplace_back(item);
  for (auto& row : wins_) row.push_back(0);
  wins_.emplace_back(items_.size(), 0);
  return items_.size() - 1;
}

std::size_t PairwiseTally::index(std::string_view item) const {
  auto it = std::find(items_.begin(), items_.end(), item);
  if (it == items_.end()) throw LookupError("unknown item '" + std::string(item) + "'");
  return static_cast<std::size_t>(it - items_.begin());
}

void PairwiseTally::add(std::string_view a, std::string_view b, std::uint64_t wins_a,
                        std::uint64_t wins_b) {
  if (a == b) throw UsageError("an item cannot be compared with itself: '" + std::string(a) + "'");
  const auto ia = intern(a);
  const auto ib = intern(b);
  wins_[ia][ib] += wins_a;
  wins_[ib][ia] += wins_b;
}

double BTFit::ability(std::string_view item) const {
  auto it = std::find(items.begin(), items.end(), item);
  if (it == items.end()) throw LookupError("unknown item '" + std::string(item) + "'");
  return abilities[static_cast<std::size_t>(it - items.begin())];
}

namespace {

// log P(a beats b)
double log_win(double la, double lb) {
  const double d = lb - la;
  return d > 0 ? -d - std::log1p(std::exp(-d)) : -std::log1p(std::exp(d));
}

double win_prob(double la, double lb) {
  const double d = la - lb;
  if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

std::vector<std::size_t> reachable(const PairwiseTally& t, std::size_t from, bool directed,
                                   bool forward) {
  const auto n = t.size();
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> q;
  q.push(from);
  seen[from] = 1;
  while (!q.empty()) {
    const auto a = q.front();
    q.pop();
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[b]) continue;
      const bool edge = directed ? (forward ? t.wins(a, b) > 0 : t.wins(b, a) > 0)
                                 : t.wins(a, b) + t.wins(b, a) > 0;
      if (edge) {
        seen[b] = 1;
        q.push(b);
      }
    }
  }
  std::vector<std::size_t> missing;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) missing.push_back(i);
  }
  return missing;
}

std::string join_items(const PairwiseTally& t, const std::vector<std::size_t>& ids) {
  std::string out;
  for (auto i : ids) out += (out.empty() ? "'" : ", '") + t.items()[i] + "'";
  return out;
}

}  // namespace

double bt_loglik(const PairwiseTally& tally, const std::vector<double>& abilities) {
  double ll = 0;
  for (std::size_t a = 0; a < tally.size(); ++a) {
    for (std::size_t b = 0; b < tally.size(); ++b) {
      if (a != b && tally.wins(a, b) > 0) {
        ll += static_cast<double>(tally.wins(a, b)) * log_win(abilities[a], abilities[b]);
      }
    }
  }
  return ll;
}

BTFit fit_bradley_terry(const PairwiseTally& tally, std::string_view reference,
                        const BTOptions& options) {
  if (!(options.penalty >= 0) || !std::isfinite(options.penalty)) {
    throw UsageError("penalty must be finite and >= 0");
  }
  const auto n = tally.size();
  const auto ref = tally.index(reference);

  if (auto isolated = reachable(tally, ref, false, true); !isolated.empty()) {
    throw EstimatorError("comparison graph is disconnected; not linked to reference '" +
                         std::string(reference) + "': " + join_items(tally, isolated));
  }
  if (options.penalty == 0) {
    auto out = reachable(tally, ref, true, true);
    auto in = reachable(tally, ref, true, false);
    if (!out.empty() || !in.empty()) {
      throw EstimatorError(
          "no finite maximum-likelihood abilities: zero win cells separate the items (some item "
          "never wins or never loses against the rest); refit with penalty > 0");
    }
  }

  // Free parameters: every item but the reference.
  std::vector<std::size_t> free_ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (i != ref) free_ids.push_back(i);
  }
  const auto m = free_ids.size();
  std::vector<double> lambda(n, 0.0);

  const auto penalized = [&](const std::vector<double>& l) {
    double pen = 0;
    for (auto i : free_ids) pen += l[i] * l[i];
    return bt_loglik(tally, l) - 0.5 * options.penalty * pen;
  };

  BTFit fit;
  fit.items = tally.items();
  fit.reference = std::string(reference);
  double objective = penalized(lambda);

  for (fit.iterations = 0; fit.iterations <= options.max_iter; ++fit.iterations) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        const double games = static_cast<double>(tally.wins(a, b) + tally.wins(b, a));
        if (games == 0) continue;
        const double p = win_prob(lambda[a], lambda[b]);
        const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
        grad[ia] += static_cast<double>(tally.wins(a, b)) - games * p;
        grad[ib] += static_cast<double>(tally.wins(b, a)) - games * (1 - p);
        const double w = games * p * (1 - p);
        info(ia, ia) += w;
        info(ib, ib) += w;
        info(ia, ib) -= w;
        info(ib, ia) -= w;
      }
    }
    Eigen::VectorXd g(static_cast<Eigen::Index>(m));
    Eigen::MatrixXd h(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) {
      const auto fr = static_cast<Eigen::Index>(free_ids[r]);
      g[static_cast<Eigen::Index>(r)] = grad[fr] - options.penalty * lambda[free_ids[r]];
      for (std::size_t c = 0; c < m; ++c) {
        h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            info(fr, static_cast<Eigen::Index>(free_ids[c]));
      }
      h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) += options.penalty;
    }
    fit.gradient_norm = m ? g.cwiseAbs().maxCoeff() : 0.0;
    if (fit.gradient_norm < options.tol) {
      fit.converged = true;
      break;
    }
    if (fit.iterations == options.max_iter) break;

    const Eigen::VectorXd step = h.ldlt().solve(g);
    if (!step.allFinite()) break;
    // Step halving keeps the penalized log-likelihood from decreasing.
    double scale = 1.0;
    bool accepted = false;
    std::vector<double> trial = lambda;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t r = 0; r < m; ++r) {
        trial[free_ids[r]] = lambda[free_ids[r]] + scale * step[static_cast<Eigen::Index>(r)];
      }
      const double value = penalized(trial);
      if (std::isfinite(value) && value >= objective) {
        lambda = trial;
        objective = value;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    if (!accepted) break;
  }

  fit.abilities = lambda;
  fit.loglik = bt_loglik(tally, lambda);
  if (!fit.converged) {
    std::string msg = "Bradley-Terry fit did not converge after " + std::to_string(fit.iterations) +
                      " iterations (score norm " + std::to_string(fit.gradient_norm) + ")";
    if (options.penalty == 0) msg += "; refit with penalty > 0";
    throw EstimatorError(msg);
  }
  return fit;
}

double choice_probability(const BTFit& fit, std::string_view a, std::string_view b) {
  return win_prob(fit.ability(a), fit.ability(b));
}

double bt_deviance(const PairwiseTally& tally, const BTFit& fit) {
  double dev = 0;
  for (std::size_t a = 0; a < tally.size(); ++a) {
    for (std::size_t b = 0; b < tally.size(); ++b) {
      const auto w = static_cast<double>(tally.wins(a, b));
      if (a == b || w == 0) continue;
      const auto games = static_cast<double>(tally.wins(a, b) + tally.wins(b, a));
      const double expected = games * win_prob(fit.abilities[a], fit.abilities[b]);
      dev += 2 * w * std::log(w / expected);
    }
  }
  return dev;
}

std::vector<NamedTally> load_tallies(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw ParseError(path, 1, "missing header");
  std::vector<std::string> header;
  for (auto f : split(line, ',')) header.push_back(normalize_key(f));
  const std::vector<std::string> plain{"item_a", "item_b", "wins_a", "wins_b"};
  std::vector<std::string> grouped{"set"};
  grouped.insert(grouped.end(), plain.begin(), plain.end());
  const bool has_set = header == grouped;
  if (!has_set && header != plain) {
    throw ParseError(path, 1, "header must be 'item_a,item_b,wins_a,wins_b' (optionally after 'set')");
  }

  std::vector<NamedTally> out;
  std::map<std::string, std::size_t> pos;
  const auto parse_count = [&](std::string_view s) {
    const std::string text(trim(s));
    if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ParseError(path, reader.line_number(), "win count must be a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::uint64_t>(std::stoull(text));
  };
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != header.size()) {
      throw ParseError(path, reader.line_number(), "expected " + std::to_string(header.size()) + " columns");
    }
    const std::size_t o = has_set ? 1 : 0;
    const std::string name = has_set ? std::string(trim(f[0])) : std::string();
    auto [it, inserted] = pos.emplace(name, out.size());
    if (inserted) out.push_back({name, {}});
    try {
      out[it->second].tally.add(trim(f[o]), trim(f[o + 1]), parse_count(f[o + 2]), parse_count(f[o + 3]));
    } catch (const UsageError& e) {
      throw ParseError(path, reader.line_number(), e.what());
    }
  }
  return out;
}

}  // namespace dx
