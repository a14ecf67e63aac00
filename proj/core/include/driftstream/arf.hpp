#pragma once

#include <random>
#include <vector>

#include "driftstream/hoeffding_tree.hpp"

namespace driftstream {

struct ArfParams {
  std::size_t n_trees = 10;
  double lambda = 6.0;
  /// Features per tree; 0 selects ceil(sqrt(dim)).
  std::size_t subspace_size = 0;
  /// Base-learner defaults of the original ARF configuration.
  HoeffdingParams tree{50.0, 0.01, 0.05, 32, LeafPrediction::majority};
  std::uint64_t seed = 1;
};

/// Draws an online-bagging instance weight k ~ Poisson(lambda).
unsigned poisson_weight(std::mt19937_64& rng, double lambda);

/// Malware iff strictly more than half of the votes are malware.
Label majority_vote(std::span<const Label> votes) noexcept;

/// Online random forest of Hoeffding trees: Poisson(lambda) instance weights,
/// one random feature subspace per tree and a majority vote (ties go to
/// goodware). There are no per-tree drift detectors or background trees.
class AdaptiveRandomForest final : public OnlineClassifier {
 public:
  AdaptiveRandomForest(std::size_t dim, ArfParams params = {});

  std::size_t dim() const noexcept override { return dim_; }
  void partial_fit(std::span<const double> x, Label y) override;
  Label predict(std::span<const double> x) const override;
  void reset() override;
  std::unique_ptr<OnlineClassifier> clone_untrained() const override;
  std::string_view name() const noexcept override { return "arf"; }

  const std::vector<HoeffdingTree>& trees() const noexcept { return trees_; }
  const ArfParams& params() const noexcept { return params_; }

  /// Seed of tree `i`'s private weight stream.
  static std::uint64_t tree_seed(std::uint64_t seed, std::size_t i) noexcept;

 private:
  std::size_t dim_;
  ArfParams params_;
  std::vector<HoeffdingTree> trees_;
  std::vector<std::mt19937_64> rngs_;
};

}  // namespace driftstream
