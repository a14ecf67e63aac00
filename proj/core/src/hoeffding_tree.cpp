#include "driftstream/hoeffding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftstream/errors.hpp"

namespace driftstream {

double hoeffding_bound(double range, double delta, double n) {
  return std::sqrt(range * range * std::log(1.0 / delta) / (2.0 * n));
}

namespace {

double entropy(double a, double b) {
  const double n = a + b;
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : {a, b}) {
    if (c > 0.0) {
      const double p = c / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

constexpr double kMinBranchFraction = 0.01;

}  // namespace

HoeffdingTree::HoeffdingTree(std::size_t dim, HoeffdingParams params,
                             std::vector<std::size_t> features)
    : dim_(dim), params_(params), features_(std::move(features)) {
  if (params_.n_bins == 0) throw ConfigError("hoeffding tree needs at least one bin");
  if (features_.empty()) {
    features_.resize(dim_);
    std::iota(features_.begin(), features_.end(), std::size_t{0});
  }
  for (auto f : features_) {
    if (f >= dim_) throw DimensionMismatch("feature subset index out of range");
  }
  reset();
}

void HoeffdingTree::reset() {
  nodes_.clear();
  new_leaf({0.0, 0.0}, 0);
}

std::unique_ptr<OnlineClassifier> HoeffdingTree::clone_untrained() const {
  return std::make_unique<HoeffdingTree>(dim_, params_, features_);
}

std::size_t HoeffdingTree::new_leaf(std::array<double, 2> counts, std::size_t depth) {
  Node n;
  n.counts = counts;
  n.depth = depth;
  n.weight_at_last_eval = counts[0] + counts[1];
  n.histogram.assign(features_.size() * (params_.n_bins + 1) * 2, 0.0);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

std::size_t HoeffdingTree::bucket_of(double v) const noexcept {
  if (!(v > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(std::ceil(v * static_cast<double>(params_.n_bins)));
  return std::min(b, params_.n_bins);
}

std::size_t HoeffdingTree::find_leaf(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes_[i].leaf) {
    const auto& n = nodes_[i];
    i = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return i;
}

void HoeffdingTree::update(std::span<const double> x, Label y, double weight) {
  check_dim(x, dim_);
  if (!(weight > 0.0)) throw ValueOutOfRange("instance weight must be positive");
  const auto leaf = find_leaf(x);
  auto& n = nodes_[leaf];
  const auto c = static_cast<std::size_t>(to_int(y));
  n.counts[c] += weight;
  const auto buckets = params_.n_bins + 1;
  for (std::size_t s = 0; s < features_.size(); ++s) {
    n.histogram[(s * buckets + bucket_of(x[features_[s]])) * 2 + c] += weight;
  }
  const double seen = n.counts[0] + n.counts[1];
  if (seen - n.weight_at_last_eval >= params_.grace_period) {
    n.weight_at_last_eval = seen;
    attempt_split(leaf);
  }
}

void HoeffdingTree::attempt_split(std::size_t leaf) {
  const auto& n = nodes_[leaf];
  // Class-pure leaves never split.
  if (n.counts[0] <= 0.0 || n.counts[1] <= 0.0) return;

  const auto buckets = params_.n_bins + 1;
  double total[2] = {0.0, 0.0};
  for (std::size_t b = 0; b < buckets; ++b) {
    total[0] += n.histogram[b * 2];
    total[1] += n.histogram[b * 2 + 1];
  }
  const double weight = total[0] + total[1];
  if (weight <= 0.0) return;
  const double parent = entropy(total[0], total[1]);

  double best = 0.0, second = 0.0;
  std::size_t best_slot = 0, best_bucket = 0;
  bool found = false;
  for (std::size_t s = 0; s < features_.size(); ++s) {
    const double* h = &n.histogram[s * buckets * 2];
    double left[2] = {0.0, 0.0};
    double feature_best = 0.0;
    std::size_t feature_bucket = 0;
    bool feature_found = false;
    for (std::size_t b = 0; b + 1 < buckets; ++b) {
      left[0] += h[b * 2];
      left[1] += h[b * 2 + 1];
      const double lw = left[0] + left[1];
      const double rw = weight - lw;
      if (lw < kMinBranchFraction * weight || rw < kMinBranchFraction * weight) continue;
      const double gain = parent - (lw / weight) * entropy(left[0], left[1]) -
                          (rw / weight) * entropy(total[0] - left[0], total[1] - left[1]);
      if (!feature_found || gain > feature_best) {
        feature_best = gain;
        feature_bucket = b;
        feature_found = true;
      }
    }
    if (!feature_found) continue;
    if (!found || feature_best > best) {
      if (found) second = std::max(second, best);
      best = feature_best;
      best_slot = s;
      best_bucket = feature_bucket;
      found = true;
    } else {
      second = std::max(second, feature_best);
    }
  }
  if (!found || best <= 0.0) return;

  const double eps = hoeffding_bound(1.0, params_.split_confidence, n.counts[0] + n.counts[1]);
  if (!(best - second > eps || eps < params_.tie_threshold)) return;

  std::array<double, 2> lc{0.0, 0.0};
  const double* h = &n.histogram[best_slot * buckets * 2];
  for (std::size_t b = 0; b <= best_bucket; ++b) {
    lc[0] += h[b * 2];
    lc[1] += h[b * 2 + 1];
  }
  const std::array<double, 2> rc{total[0] - lc[0], total[1] - lc[1]};
  const auto feature = features_[best_slot];
  const double threshold =
      static_cast<double>(best_bucket) / static_cast<double>(params_.n_bins);
  const auto depth = n.depth;

  const auto l = new_leaf(lc, depth + 1);
  const auto r = new_leaf(rc, depth + 1);
  auto& parent_node = nodes_[leaf];  // new_leaf may have reallocated
  parent_node.leaf = false;
  parent_node.feature = feature;
  parent_node.threshold = threshold;
  parent_node.left = l;
  parent_node.right = r;
  parent_node.histogram.clear();
  parent_node.histogram.shrink_to_fit();
}

Label HoeffdingTree::leaf_label(const Node& n, std::span<const double> x) const {
  if (params_.leaf_prediction == LeafPrediction::naive_bayes) {
    const auto buckets = params_.n_bins + 1;
    double observed[2] = {0.0, 0.0};
    for (std::size_t b = 0; b < buckets; ++b) {
      observed[0] += n.histogram[b * 2];
      observed[1] += n.histogram[b * 2 + 1];
    }
    if (observed[0] > 0.0 && observed[1] > 0.0) {
      double score[2];
      const double total = n.counts[0] + n.counts[1];
      for (std::size_t c = 0; c < 2; ++c) {
        score[c] = std::log((n.counts[c] + 1.0) / (total + 2.0));
        const double denom = observed[c] + static_cast<double>(buckets);
        for (std::size_t s = 0; s < features_.size(); ++s) {
          const auto b = bucket_of(x[features_[s]]);
          score[c] += std::log((n.histogram[(s * buckets + b) * 2 + c] + 1.0) / denom);
        }
      }
      return label_from_bool(score[1] > score[0]);
    }
  }
  return label_from_bool(n.counts[1] > n.counts[0]);
}

Label HoeffdingTree::predict(std::span<const double> x) const {
  check_dim(x, dim_);
  return leaf_label(nodes_[find_leaf(x)], x);
}

std::size_t HoeffdingTree::n_leaves() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.leaf; }));
}

std::size_t HoeffdingTree::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

long HoeffdingTree::root_split_feature() const noexcept {
  return nodes_[0].leaf ? -1 : static_cast<long>(nodes_[0].feature);
}

}  // namespace driftstream
