#pragma once
// Decision-tree and random-forest baselines over main-damage-per-location
// features. Multi-label targets are handled by binary relevance: one
// independent binary model per diagnosable cause.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bitforensics/aggregation.hpp"
#include "bitforensics/core_model.hpp"

namespace bitforensics {

/// Columns per location group: the 11 damage classes followed by "none".
inline constexpr std::size_t kFeatureGroupWidth = kDamageCount + 1;
inline constexpr std::size_t kFeatureDim = kBladeLocations.size() * kFeatureGroupWidth;

/// One-hot encoding, exactly one hot column per location group.
using FeatureVector = std::vector<std::uint8_t>;

/// One binary target per diagnosable cause, in FailureCause order (Green excluded).
using LabelVector = std::array<std::uint8_t, kDiagnosableCauseCount>;

FeatureVector build_features(const MainDamageSummary& summary);

/// Column of (location, damage) or of (location, none) when `damage` is nullopt.
std::size_t feature_index(LocationClass location, std::optional<DamageClass> damage);

LabelVector label_vector(const CauseLabels& causes);

/// Positive targets as a cause set; an empty set is reported as {Green}.
CauseLabels causes_from_labels(const LabelVector& labels);

/// 1 - p0^2 - p1^2. Throws EmptySetError on an empty multiset.
double gini(std::span<const std::uint8_t> labels);

/// Small seeded generator with a fully specified output sequence so bootstrap
/// draws reproduce across platforms: a 64-bit LCG (Knuth's MMIX constants)
/// whose state is passed through the splitmix64 finalizer.
class Mcg64 {
 public:
  explicit Mcg64(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ULL) {}

  std::uint64_t next();
  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

struct TreeParams {
  std::optional<int> max_depth;  // unlimited by default
  int min_samples_split{2};
};

/// A node is a leaf when `feature < 0`. Internal nodes send samples whose
/// feature is 0 to `left` and 1 to `right`.
struct TreeNode {
  int feature{-1};
  int left{-1};
  int right{-1};
  int n_samples{0};
  int n_positive{0};
  double probability{0.0};

  bool leaf() const { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary classification tree; node 0 is the root.
struct BinaryTree {
  std::vector<TreeNode> nodes;

  double predict_proba(std::span<const std::uint8_t> x) const;
  int depth() const;
  friend bool operator==(const BinaryTree&, const BinaryTree&) = default;
};

/// Greedy Gini tree for one binary target. Splits take the feature with the
/// largest impurity decrease among those that separate the node's samples,
/// lowest feature index on ties. Growth stops at purity, the depth limit,
/// min_samples_split, or when no feature separates the samples.
BinaryTree fit_tree(std::span<const FeatureVector> X, std::span<const std::uint8_t> y, const TreeParams& params = {});

/// Binary-relevance decision tree over all diagnosable causes.
struct TreeModel {
  std::vector<BinaryTree> trees;  // one per target
  TreeParams params;
  std::size_t feature_dim{kFeatureDim};
};

TreeModel fit_tree_model(std::span<const FeatureVector> X, std::span<const LabelVector> Y,
                         const TreeParams& params = {});

enum class FeatureSubset : std::uint8_t { All, Sqrt };

struct ForestParams {
  int n_trees{100};
  bool bootstrap{true};
  FeatureSubset feature_subset{FeatureSubset::Sqrt};
  std::uint64_t seed{0};
  TreeParams tree;
};

struct ForestModel {
  std::vector<std::vector<BinaryTree>> trees;  // [target][member]
  ForestParams params;
  std::size_t feature_dim{kFeatureDim};
};

/// Per target, `n_trees` trees grown on bootstrap resamples. At each node the
/// candidate features are drawn uniformly without replacement until
/// ceil(sqrt(d)) non-constant ones have been evaluated.
ForestModel fit_forest(std::span<const FeatureVector> X, std::span<const LabelVector> Y, const ForestParams& params = {});

/// Per-target positive probability (leaf probability for a tree, fraction of
/// positive member votes for a forest). Throws DimensionMismatchError.
std::array<double, kDiagnosableCauseCount> predict_proba(const TreeModel& model, std::span<const std::uint8_t> x);
std::array<double, kDiagnosableCauseCount> predict_proba(const ForestModel& model, std::span<const std::uint8_t> x);

/// Probability >= 0.5 marks a cause present; no cause present yields {Green}.
CauseLabels predict(const TreeModel& model, std::span<const std::uint8_t> x);
CauseLabels predict(const ForestModel& model, std::span<const std::uint8_t> x);

std::string to_json(const TreeModel& model);
std::string to_json(const ForestModel& model);

/// A persisted model of either kind.
struct SavedModel {
  std::optional<TreeModel> tree;
  std::optional<ForestModel> forest;

  CauseLabels predict(std::span<const std::uint8_t> x) const;
};

SavedModel model_from_json(std::string_view text);

enum class ModelKind : std::uint8_t { DecisionTree, RandomForest };

/// Leave-one-out predictions: sample i is predicted by a model fit on all
/// other samples.
std::vector<CauseLabels> leave_one_out(std::span<const FeatureVector> X, std::span<const LabelVector> Y,
                                       ModelKind kind, const ForestParams& params = {});

}  // namespace bitforensics
