#include "dx/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "dx/error.hpp"
#include "dx/rng.hpp"
#include "dx/text.hpp"

namespace dx {

std::vector<Item> load_items(const std::string& path) {
  std::vector<Item> out;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 || trim(fields[0]).empty() || trim(fields[1]).empty()) {
      throw ParseError(path, reader.line_number(), "expected 'item_id<TAB>scene_label<TAB>tags'");
    }
    Item item{std::string(trim(fields[0])), std::string(trim(fields[1])), {}};
    for (auto tag : split(fields[2], ';')) {
      tag = trim(tag);
      if (!tag.empty()) item.tags.emplace_back(tag);
    }
    out.push_back(std::move(item));
  }
  return out;
}

BinaryDataset make_binary_dataset(std::vector<Item> items, std::string_view target,
                                  const IngestOptions& options, std::uint64_t seed) {
  BinaryDataset ds;
  std::vector<Item> kept;
  for (auto& item : items) {
    const std::set<std::string> distinct(item.tags.begin(), item.tags.end());
    if (distinct.size() < options.min_tags) {
      ++ds.dropped_few_tags;
      continue;
    }
    kept.push_back(std::move(item));
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < kept.size(); ++i) (kept[i].label == target ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) {
    throw UsageError("after filtering, the '" + std::string(target) + "' problem has " +
                     std::to_string(pos.size()) + " target and " + std::to_string(neg.size()) +
                     " non-target items; need both");
  }
  std::vector<char> keep(kept.size(), 1);
  if (options.balance && pos.size() != neg.size()) {
    auto& major = pos.size() > neg.size() ? pos : neg;
    const auto minor_size = std::min(pos.size(), neg.size());
    Rng rng(derive_seed(seed, Stream::kClassBalance));
    const auto chosen = rng.sample(std::span<const std::size_t>(major), minor_size);
    for (auto i : major) keep[i] = 0;
    for (auto i : chosen) keep[i] = 1;
    ds.dropped_balance = major.size() - minor_size;
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!keep[i]) continue;
    ds.truth.push_back(kept[i].label == target ? 1 : 0);
    ds.items.push_back(std::move(kept[i]));
  }
  return ds;
}

TagVocabulary TagVocabulary::from_items(std::span<const Item> items) {
  std::set<std::string> all;
  for (const auto& item : items) all.insert(item.tags.begin(), item.tags.end());
  TagVocabulary v;
  v.tags_.assign(all.begin(), all.end());
  for (std::size_t i = 0; i < v.tags_.size(); ++i) v.index_.emplace(v.tags_[i], i);
  return v;
}

std::optional<std::size_t> TagVocabulary::find(std::string_view tag) const {
  auto it = index_.find(std::string(tag));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool FeatureVector::test(std::size_t j) const {
  return std::binary_search(active.begin(), active.end(), static_cast<std::uint32_t>(j));
}

Vectorized vectorize(std::span<const std::string> tags, const TagVocabulary& vocab) {
  Vectorized out;
  out.features.dimension = vocab.size();
  for (const auto& tag : tags) {
    if (auto j = vocab.find(tag)) {
      out.features.active.push_back(static_cast<std::uint32_t>(*j));
    } else {
      ++out.unknown_tags;
    }
  }
  auto& a = out.features.active;
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return out;
}

namespace {

double dot(const FeatureVector& x, std::span<const double> w, double b) {
  double z = b;
  for (auto j : x.active) z += w[j];
  return z;
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double objective(std::span<const Example> data, std::span<const double> w, double b, double l2) {
  double loss = 0;
  for (const auto& ex : data) {
    const double z = dot(ex.x, w, b);
    loss += softplus(z) - ex.y * z;
  }
  double sq = 0;
  for (double v : w) sq += v * v;
  return loss + 0.5 * l2 * sq;
}

}  // namespace

double LRModel::probability(const FeatureVector& x) const {
  if (x.dimension != weights.size()) throw UsageError("feature dimension does not match the model");
  return sigmoid(dot(x, weights, bias));
}

LossGradient loss_and_gradient(std::span<const Example> data, std::span<const double> weights,
                               double bias, double l2) {
  LossGradient out;
  out.grad_w.assign(weights.size(), 0.0);
  for (const auto& ex : data) {
    const double z = dot(ex.x, weights, bias);
    out.loss += softplus(z) - ex.y * z;
    const double r = sigmoid(z) - ex.y;
    for (auto j : ex.x.active) out.grad_w[j] += r;
    out.grad_b += r;
  }
  double sq = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    sq += weights[j] * weights[j];
    out.grad_w[j] += l2 * weights[j];
  }
  out.loss += 0.5 * l2 * sq;
  return out;
}

TrainReport train(std::span<const Example> data, const TrainOptions& options) {
  if (options.l2 < 0 || !std::isfinite(options.l2)) throw UsageError("l2 must be finite and >= 0");
  bool has0 = false, has1 = false;
  std::size_t dim = 0;
  for (const auto& ex : data) {
    has0 |= ex.y == 0;
    has1 |= ex.y == 1;
    if (ex.y != 0 && ex.y != 1) throw UsageError("labels must be 0 or 1");
    dim = std::max(dim, ex.x.dimension);
  }
  if (!has0 || !has1) throw UsageError("training data must contain both labels");

  TrainReport report;
  auto& m = report.model;
  m.weights.assign(dim, 0.0);
  m.bias = 0;
  m.l2 = options.l2;

  constexpr double kArmijo = 1e-4;
  double step = 1.0;
  auto lg = loss_and_gradient(data, m.weights, m.bias, m.l2);
  if (!std::isfinite(lg.loss)) throw EstimatorError("non-finite training loss");
  report.loss_history.push_back(lg.loss);

  std::vector<double> trial(dim);
  for (report.iterations = 0; report.iterations < options.max_iter; ++report.iterations) {
    double gnorm_inf = std::abs(lg.grad_b), gsq = lg.grad_b * lg.grad_b;
    for (double g : lg.grad_w) {
      gnorm_inf = std::max(gnorm_inf, std::abs(g));
      gsq += g * g;
    }
    if (gnorm_inf < options.tol) {
      report.converged = true;
      break;
    }
    // Backtracking: halve until the Armijo condition holds.
    bool accepted = false;
    double trial_bias = 0, trial_loss = 0;
    for (int tries = 0; tries < 80; ++tries) {
      for (std::size_t j = 0; j < dim; ++j) trial[j] = m.weights[j] - step * lg.grad_w[j];
      trial_bias = m.bias - step * lg.grad_b;
      trial_loss = objective(data, trial, trial_bias, m.l2);
      if (std::isfinite(trial_loss) && trial_loss <= lg.loss - kArmijo * step * gsq) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left
    m.weights.swap(trial);
    trial.resize(dim);
    m.bias = trial_bias;
    lg = loss_and_gradient(data, m.weights, m.bias, m.l2);
    if (!std::isfinite(lg.loss)) throw EstimatorError("non-finite training loss");
    report.loss_history.push_back(lg.loss);
    step *= 2.0;
  }
  return report;
}

std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("k must be at least 2");
  if (n < k) {
    throw UsageError("only " + std::to_string(n) + " items for " + std::to_string(k) +
                     " folds; use a smaller k");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> fold(n);
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fold[order[pos++]] = f;
  }
  return fold;
}

std::vector<Prediction> kfold_eval(std::span<const Example> data, std::size_t k,
                                   std::uint64_t seed, const TrainOptions& options) {
  const auto fold = fold_assignment(data.size(), k, seed);
  std::vector<Prediction> out(data.size());
  std::vector<Example> train_set;
  for (std::size_t f = 0; f < k; ++f) {
    train_set.clear();
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold[i] != f) train_set.push_back(data[i]);
    }
    const auto report = train(train_set, options);
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (fold[i] != f) continue;
      const double p = report.model.probability(data[i].x);
      out[i] = {p >= 0.5 ? 1 : 0, p, f};
    }
  }
  return out;
}

ConfusionGroups confusion_groups(std::span<const int> predictions, std::span<const int> truths) {
  if (predictions.size() != truths.size()) {
    throw UsageError("predictions and truths differ in length");
  }
  ConfusionGroups g;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool p = predictions[i] != 0, t = truths[i] != 0;
    (p ? (t ? g.tp : g.fp) : (t ? g.fn : g.tn)).push_back(i);
  }
  return g;
}

std::vector<std::size_t> sample_group(std::span<const std::size_t> group, std::size_t cap,
                                      std::uint64_t seed) {
  Rng rng(seed);
  return rng.sample(group, cap);
}

}  // namespace dx
