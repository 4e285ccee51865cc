#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dx {

// wins(a, b) = number of times item a was chosen over item b.
class PairwiseTally {
 public:
  PairwiseTally() = default;
  explicit PairwiseTally(std::vector<std::string> items);

  // Adds to both cells of a pair, interning unseen item names.
  void add(std::string_view a, std::string_view b, std::uint64_t wins_a, std::uint64_t wins_b);

  std::size_t size() const { return items_.size(); }
  const std::vector<std::string>& items() const { return items_; }
  std::size_t index(std::string_view item) const;  // throws LookupError
  std::uint64_t wins(std::size_t a, std::size_t b) const { return wins_[a][b]; }

 private:
  std::size_t intern(std::string_view item);

  std::vector<std::string> items_;
  std::vector<std::vector<std::uint64_t>> wins_;
};

struct BTOptions {
  // Ridge on the free abilities; > 0 keeps the estimate finite under
  // (quasi-)separation.
  double penalty = 0;
  double tol = 1e-8;
  std::size_t max_iter = 10000;
};

struct BTFit {
  std::vector<std::string> items;
  std::vector<double> abilities;  // log-abilities, reference pinned to 0
  std::string reference;
  bool converged = false;
  double loglik = 0;  // unpenalized
  double gradient_norm = 0;  // inf-norm of the penalized score at exit
  std::size_t iterations = 0;

  double ability(std::string_view item) const;  // throws LookupError
};

// Newton-Raphson on the Bradley-Terry log-likelihood with
// P(a beats b) = e^la / (e^la + e^lb) and l_reference = 0.
//
// Throws EstimatorError when some item is not linked to the reference by any
// comparison, when penalty is 0 and the directed win graph is not strongly
// connected (the maximum is at infinity), or when Newton fails to converge.
BTFit fit_bradley_terry(const PairwiseTally& tally, std::string_view reference,
                        const BTOptions& options = {});

double choice_probability(const BTFit& fit, std::string_view a, std::string_view b);

double bt_loglik(const PairwiseTally& tally, const std::vector<double>& abilities);

// 2 * sum w_ab log(w_ab / (n_ab p_ab)) over cells with w_ab > 0.
double bt_deviance(const PairwiseTally& tally, const BTFit& fit);

struct NamedTally {
  std::string name;
  PairwiseTally tally;
};

// CSV with header `item_a,item_b,wins_a,wins_b`, optionally preceded by a
// `set` column grouping rows into separate tallies (kept in first-seen order).
std::vector<NamedTally> load_tallies(const std::string& path);

}  // namespace dx
