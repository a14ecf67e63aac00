#pragma once

#include <array>
#include <vector>

#include "driftstream/learners.hpp"

namespace driftstream {

enum class LeafPrediction { majority, naive_bayes };

struct HoeffdingParams {
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;
  /// Features are expected in [0, 1]. Each leaf keeps a per-class histogram
  /// with one bucket for x <= 0 and `n_bins` equal-width buckets over (0, 1].
  std::size_t n_bins = 32;
  LeafPrediction leaf_prediction = LeafPrediction::majority;
};

/// Hoeffding bound sqrt(R^2 ln(1/delta) / (2n)).
double hoeffding_bound(double range, double delta, double n);

/// Incremental decision tree (VFDT) with information-gain splits on binned
/// numeric features. Internal nodes test `x[feature] <= threshold`.
class HoeffdingTree final : public OnlineClassifier {
 public:
  /// `features` restricts the tree to a subset of input columns (empty = all).
  HoeffdingTree(std::size_t dim, HoeffdingParams params = {},
                std::vector<std::size_t> features = {});

  std::size_t dim() const noexcept override { return dim_; }
  void partial_fit(std::span<const double> x, Label y) override { update(x, y, 1.0); }
  /// Adds `weight` copies of (x, y). Throws ValueOutOfRange unless weight > 0.
  void update(std::span<const double> x, Label y, double weight);
  Label predict(std::span<const double> x) const override;
  void reset() override;
  std::unique_ptr<OnlineClassifier> clone_untrained() const override;
  std::string_view name() const noexcept override { return "hoeffding"; }

  std::size_t n_nodes() const noexcept { return nodes_.size(); }
  std::size_t n_leaves() const noexcept;
  std::size_t depth() const noexcept;
  /// Input column tested at the root, or -1 while the root is a leaf.
  long root_split_feature() const noexcept;
  const std::vector<std::size_t>& features() const noexcept { return features_; }
  const HoeffdingParams& params() const noexcept { return params_; }

 private:
  struct Node {
    bool leaf = true;
    std::size_t feature = 0;  // input column
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t depth = 0;
    std::array<double, 2> counts{0.0, 0.0};
    double weight_at_last_eval = 0.0;
    // [feature slot][bucket][class], flattened.
    std::vector<double> histogram;
  };

  std::size_t bucket_of(double v) const noexcept;
  std::size_t find_leaf(std::span<const double> x) const;
  void attempt_split(std::size_t leaf);
  Label leaf_label(const Node& n, std::span<const double> x) const;
  std::size_t new_leaf(std::array<double, 2> counts, std::size_t depth);

  std::size_t dim_;
  HoeffdingParams params_;
  std::vector<std::size_t> features_;
  std::vector<Node> nodes_;
};

}  // namespace driftstream
