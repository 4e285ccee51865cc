#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dx {

// One tagged item (an image reduced to its object tags).
struct Item {
  std::string id;
  std::string label;
  std::vector<std::string> tags;
};

// `item_id<TAB>scene_label<TAB>tag1;tag2;...`
std::vector<Item> load_items(const std::string& path);

struct IngestOptions {
  // Items with fewer distinct tags are dropped.
  std::size_t min_tags = 6;
  // Down-sample the larger of target / non-target to the smaller.
  bool balance = true;
};

struct BinaryDataset {
  std::vector<Item> items;
  std::vector<int> truth;  // 1 = target label
  std::size_t dropped_few_tags = 0;
  std::size_t dropped_balance = 0;
};

// Filters and balances `items` for a one-vs-rest problem on `target`. Kept
// items stay in input order. Throws UsageError when a class ends up empty.
BinaryDataset make_binary_dataset(std::vector<Item> items, std::string_view target,
                                  const IngestOptions& options, std::uint64_t seed);

// tag -> feature index; indices follow ascending tag order.
class TagVocabulary {
 public:
  static TagVocabulary from_items(std::span<const Item> items);

  std::optional<std::size_t> find(std::string_view tag) const;
  std::size_t size() const { return tags_.size(); }
  const std::vector<std::string>& tags() const { return tags_; }

 private:
  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Binary presence vector stored as its sorted set-bit indices.
struct FeatureVector {
  std::size_t dimension = 0;
  std::vector<std::uint32_t> active;

  std::size_t popcount() const { return active.size(); }
  bool test(std::size_t j) const;
};

struct Vectorized {
  FeatureVector features;
  std::size_t unknown_tags = 0;
};

Vectorized vectorize(std::span<const std::string> tags, const TagVocabulary& vocab);

struct Example {
  FeatureVector x;
  int y = 0;
};

struct LRModel {
  std::vector<double> weights;
  double bias = 0;
  double l2 = 0;

  double probability(const FeatureVector& x) const;
  int predict(const FeatureVector& x) const { return probability(x) >= 0.5 ? 1 : 0; }
};

struct TrainOptions {
  double l2 = 1.0;
  std::size_t max_iter = 2000;
  double tol = 1e-6;
};

struct TrainReport {
  LRModel model;
  std::size_t iterations = 0;
  bool converged = false;
  // Objective after each accepted step, starting with the initial value.
  std::vector<double> loss_history;
};

// Objective: sum_i [log(1 + e^z_i) - y_i z_i] + (l2 / 2) ||w||^2 with
// z_i = w.x_i + b; the bias is not penalized.
struct LossGradient {
  double loss = 0;
  std::vector<double> grad_w;
  double grad_b = 0;
};

LossGradient loss_and_gradient(std::span<const Example> data, std::span<const double> weights,
                               double bias, double l2);

// Full-batch gradient descent with Armijo backtracking from zero weights.
// Throws UsageError unless both labels occur, EstimatorError on a non-finite
// loss.
TrainReport train(std::span<const Example> data, const TrainOptions& options);

struct Prediction {
  int predicted = 0;
  double probability = 0;
  std::size_t fold = 0;
};

// Seeded shuffle into k near-equal folds (the first n mod k folds get one
// extra item); each item is predicted by the model trained on the others.
std::vector<std::size_t> fold_assignment(std::size_t n, std::size_t k, std::uint64_t seed);
std::vector<Prediction> kfold_eval(std::span<const Example> data, std::size_t k,
                                   std::uint64_t seed, const TrainOptions& options);

// Item indices per outcome, each ascending.
struct ConfusionGroups {
  std::vector<std::size_t> tp, tn, fp, fn;
};

ConfusionGroups confusion_groups(std::span<const int> predictions, std::span<const int> truths);

// min(cap, |group|) seeded draws without replacement.
std::vector<std::size_t> sample_group(std::span<const std::size_t> group, std::size_t cap,
                                      std::uint64_t seed);

}  // namespace dx
