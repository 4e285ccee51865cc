#include "doctest.h"

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "dx/classifier.hpp"
#include "dx/error.hpp"
#include "fixtures.hpp"

namespace {

std::vector<dx::Example> make_data(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<dx::Example> data(n);
  std::vector<double> truth(d);
  for (auto& t : truth) t = std::normal_distribution<double>(0, 1.5)(gen);
  for (std::size_t i = 0; i < n; ++i) {
    auto& ex = data[i];
    ex.x.dimension = d;
    double z = -0.5;
    for (std::uint32_t j = 0; j < d; ++j) {
      if (std::bernoulli_distribution(0.3)(gen)) {
        ex.x.active.push_back(j);
        z += truth[j];
      }
    }
    ex.y = std::bernoulli_distribution(1.0 / (1.0 + std::exp(-z)))(gen) ? 1 : 0;
  }
  data[0].y = 0;
  data[1].y = 1;
  return data;
}

double norm2(const std::vector<double>& w) {
  double s = 0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("vectorize") {
  auto vocab = dx::TagVocabulary::from_items(std::vector<dx::Item>{{"a", "k", {"sink", "oven", "chair"}}});
  CHECK(vocab.size() == 3);
  CHECK(vocab.find("chair") == 0u);
  std::vector<std::string> tags = {"oven", "sink", "oven"};
  auto v = dx::vectorize(tags, vocab);
  CHECK(v.features.popcount() == 2);
  CHECK(v.features.test(*vocab.find("oven")));
  CHECK(v.unknown_tags == 0);
  CHECK(dx::vectorize(std::vector<std::string>{}, vocab).features.popcount() == 0);
  std::vector<std::string> odd = {"sink", "tree", "car", "sky"};
  auto u = dx::vectorize(odd, vocab);
  CHECK(u.features.popcount() == 1);
  CHECK(u.unknown_tags == 3);
  CHECK(u.features.dimension == 3);
}

TEST_CASE("analytic gradient matches central differences") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto data = make_data(50, 20, seed);
    std::mt19937_64 gen(seed + 100);
    std::vector<double> w(20);
    for (auto& v : w) v = std::normal_distribution<double>(0, 0.5)(gen);
    const double b = 0.3, l2 = 0.7;
    auto lg = dx::loss_and_gradient(data, w, b, l2);
    const double h = 1e-5;
    for (std::size_t j = 0; j <= w.size(); ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < w.size()) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      const double fd = (dx::loss_and_gradient(data, wp, bp, l2).loss -
                         dx::loss_and_gradient(data, wm, bm, l2).loss) / (2 * h);
      const double an = j < w.size() ? lg.grad_w[j] : lg.grad_b;
      CHECK(std::abs(an - fd) / (std::abs(an) + 1e-8) < 1e-5);
    }
  }
}

TEST_CASE("training") {
  SUBCASE("separable single feature learns a positive weight") {
    std::vector<dx::Example> data = {{{1, {0}}, 1}, {{1, {}}, 0}};
    auto r = dx::train(data, {.l2 = 0.1});
    CHECK(r.model.weights[0] > 0);
    CHECK(r.model.predict({1, {0}}) == 1);
    CHECK(r.model.predict({1, {}}) == 0);
  }
  SUBCASE("loss never increases across accepted steps") {
    auto data = make_data(80, 15, 3);
    auto r = dx::train(data, {.l2 = 0.5});
    REQUIRE(r.loss_history.size() > 2);
    for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
    CHECK(r.converged);
    auto lg = dx::loss_and_gradient(data, r.model.weights, r.model.bias, 0.5);
    double gmax = std::abs(lg.grad_b);
    for (double g : lg.grad_w) gmax = std::max(gmax, std::abs(g));
    CHECK(gmax < 1e-6);
  }
  SUBCASE("stronger regularization never grows the weights") {
    auto data = make_data(60, 10, 8);
    double prev = std::numeric_limits<double>::infinity();
    for (double l2 : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      auto r = dx::train(data, {.l2 = l2, .max_iter = 20000, .tol = 1e-9});
      const double n = norm2(r.model.weights);
      CHECK(n <= prev + 1e-9);
      prev = n;
    }
  }
  SUBCASE("single-class data is rejected") {
    std::vector<dx::Example> data = {{{1, {0}}, 1}, {{1, {}}, 1}};
    CHECK_THROWS_AS(dx::train(data, {}), dx::UsageError);
  }
  SUBCASE("deterministic") {
    auto data = make_data(40, 8, 5);
    CHECK(dx::train(data, {}).model.weights == dx::train(data, {}).model.weights);
  }
}

TEST_CASE("fold assignment") {
  auto folds = dx::fold_assignment(100, 10, 1);
  std::map<std::size_t, int> sizes;
  for (auto f : folds) ++sizes[f];
  CHECK(sizes.size() == 10);
  for (auto& [_, s] : sizes) CHECK(s == 10);

  auto odd = dx::fold_assignment(103, 10, 1);
  std::map<std::size_t, int> osizes;
  for (auto f : odd) ++osizes[f];
  std::vector<int> counts;
  for (auto& [_, s] : osizes) counts.push_back(s);
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<int>{10, 10, 10, 10, 10, 10, 10, 11, 11, 11});

  CHECK(dx::fold_assignment(103, 10, 1) == odd);
  CHECK(dx::fold_assignment(103, 10, 2) != odd);
  CHECK_THROWS_AS(dx::fold_assignment(5, 10, 1), dx::UsageError);
}

TEST_CASE("k-fold predictions come from models that never saw the item") {
  auto data = make_data(103, 12, 4);
  auto preds = dx::kfold_eval(data, 10, 7, {});
  REQUIRE(preds.size() == data.size());
  auto folds = dx::fold_assignment(data.size(), 10, 7);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(preds[i].fold == folds[i]);
    CHECK(preds[i].predicted == (preds[i].probability >= 0.5 ? 1 : 0));
  }
  // Recompute one fold by hand.
  std::vector<dx::Example> train_set;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (folds[i] != 3) train_set.push_back(data[i]);
  }
  auto model = dx::train(train_set, {}).model;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (folds[i] == 3) CHECK(preds[i].probability == doctest::Approx(model.probability(data[i].x)).epsilon(1e-12));
  }
}

TEST_CASE("confusion groups") {
  std::vector<int> truth = {1, 1, 0, 0, 1, 0};
  auto perfect = dx::confusion_groups(truth, truth);
  CHECK(perfect.fp.empty());
  CHECK(perfect.fn.empty());
  CHECK(perfect.tp.size() == 3);

  std::vector<int> inverted;
  for (int t : truth) inverted.push_back(1 - t);
  auto inv = dx::confusion_groups(inverted, truth);
  CHECK(inv.tp.empty());
  CHECK(inv.fn.size() == perfect.tp.size());
  CHECK(inv.fp.size() == perfect.tn.size());

  std::mt19937_64 gen(1);
  std::vector<int> p(500), t(500);
  for (std::size_t i = 0; i < 500; ++i) {
    p[i] = std::bernoulli_distribution(0.5)(gen);
    t[i] = std::bernoulli_distribution(0.5)(gen);
  }
  auto g = dx::confusion_groups(p, t);
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    tp += p[i] && t[i];
    tn += !p[i] && !t[i];
    fp += p[i] && !t[i];
    fn += !p[i] && t[i];
  }
  CHECK(g.tp.size() == tp);
  CHECK(g.tn.size() == tn);
  CHECK(g.fp.size() == fp);
  CHECK(g.fn.size() == fn);
  std::vector<std::size_t> all;
  for (auto* v : {&g.tp, &g.tn, &g.fp, &g.fn}) all.insert(all.end(), v->begin(), v->end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 500; ++i) CHECK(all[i] == i);

  CHECK_THROWS_AS(dx::confusion_groups(std::vector<int>{1}, std::vector<int>{1, 0}), dx::UsageError);
}

TEST_CASE("group sampling") {
  std::vector<std::size_t> small = {4, 8, 15, 16};
  auto s = dx::sample_group(small, 9, 1);
  std::sort(s.begin(), s.end());
  CHECK(s == small);

  std::vector<std::size_t> group(30);
  std::iota(group.begin(), group.end(), 100);
  auto nine = dx::sample_group(group, 9, 2);
  CHECK(nine.size() == 9);
  CHECK(std::set<std::size_t>(nine.begin(), nine.end()).size() == 9);

  std::map<std::size_t, int> freq;
  const int seeds = 2000;
  for (int seed = 0; seed < seeds; ++seed) {
    for (auto v : dx::sample_group(group, 9, static_cast<std::uint64_t>(seed))) ++freq[v];
  }
  // p = 0.3, sd over 2000 draws ~ 0.0102; 4 sd
  for (auto v : group) CHECK(std::abs(freq[v] / double(seeds) - 0.3) < 0.041);
}

TEST_CASE("ingest filters and balances") {
  std::vector<dx::Item> items;
  for (int i = 0; i < 30; ++i) {
    dx::Item it{"k" + std::to_string(i), "kitchen", {"a", "b", "c", "d", "e", "f"}};
    if (i < 4) it.tags.resize(5);
    items.push_back(it);
  }
  for (int i = 0; i < 10; ++i) items.push_back({"o" + std::to_string(i), "office", {"a", "b", "c", "d", "e", "g"}});
  auto ds = dx::make_binary_dataset(items, "kitchen", {}, 3);
  CHECK(ds.dropped_few_tags == 4);
  CHECK(ds.dropped_balance == 16);
  CHECK(std::count(ds.truth.begin(), ds.truth.end(), 1) == 10);
  CHECK(std::count(ds.truth.begin(), ds.truth.end(), 0) == 10);
  CHECK_THROWS_AS(dx::make_binary_dataset(items, "garage", {}, 3), dx::UsageError);

  dxt::TempDir dir;
  auto loaded = dx::load_items(dir.write("items.tsv", "a\tkitchen\tsink;oven\nb\toffice\t\n"));
  CHECK(loaded.size() == 2);
  CHECK(loaded[0].tags == std::vector<std::string>{"sink", "oven"});
  CHECK(loaded[1].tags.empty());
  CHECK_THROWS_AS(dx::load_items(dir.write("bad.tsv", "a\tkitchen\n")), dx::ParseError);
}
