#include "driftstream/arf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftstream/errors.hpp"

namespace driftstream {

unsigned poisson_weight(std::mt19937_64& rng, double lambda) {
  std::poisson_distribution<unsigned> dist(lambda);
  return dist(rng);
}

Label majority_vote(std::span<const Label> votes) noexcept {
  const auto malware = std::count(votes.begin(), votes.end(), Label::malware);
  return label_from_bool(2 * static_cast<std::size_t>(malware) > votes.size());
}

std::uint64_t AdaptiveRandomForest::tree_seed(std::uint64_t seed, std::size_t i) noexcept {
  return split_seed(seed, 2 * i + 1);
}

AdaptiveRandomForest::AdaptiveRandomForest(std::size_t dim, ArfParams params)
    : dim_(dim), params_(params) {
  if (params_.n_trees == 0) throw ConfigError("forest needs at least one tree");
  if (!(params_.lambda > 0.0)) throw ConfigError("poisson lambda must be positive");
  reset();
}

void AdaptiveRandomForest::reset() {
  trees_.clear();
  rngs_.clear();
  std::size_t m = params_.subspace_size;
  if (m == 0) m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim_))));
  m = std::clamp<std::size_t>(m, 1, std::max<std::size_t>(dim_, 1));

  std::vector<std::size_t> all(dim_);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t t = 0; t < params_.n_trees; ++t) {
    std::vector<std::size_t> subset;
    if (m >= dim_) {
      subset = all;
    } else {
      std::mt19937_64 pick(split_seed(params_.seed, 2 * t));
      subset = all;
      // Partial Fisher-Yates; the chosen columns are kept sorted.
      for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> u(i, dim_ - 1);
        std::swap(subset[i], subset[u(pick)]);
      }
      subset.resize(m);
      std::sort(subset.begin(), subset.end());
    }
    trees_.emplace_back(dim_, params_.tree, std::move(subset));
    rngs_.emplace_back(tree_seed(params_.seed, t));
  }
}

void AdaptiveRandomForest::partial_fit(std::span<const double> x, Label y) {
  check_dim(x, dim_);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto k = poisson_weight(rngs_[t], params_.lambda);
    if (k > 0) trees_[t].update(x, y, static_cast<double>(k));
  }
}

Label AdaptiveRandomForest::predict(std::span<const double> x) const {
  check_dim(x, dim_);
  std::vector<Label> votes;
  votes.reserve(trees_.size());
  for (const auto& t : trees_) votes.push_back(t.predict(x));
  return majority_vote(votes);
}

std::unique_ptr<OnlineClassifier> AdaptiveRandomForest::clone_untrained() const {
  return std::make_unique<AdaptiveRandomForest>(dim_, params_);
}

}  // namespace driftstream
