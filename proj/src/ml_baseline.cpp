#include "bitforensics/ml_baseline.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "bitforensics/errors.hpp"

namespace bitforensics {

using nlohmann::json;

namespace {

constexpr double kTieEps = 1e-12;

double gini_counts(double positives, double n) {
  const double p1 = positives / n;
  const double p0 = 1.0 - p1;
  return 1.0 - p0 * p0 - p1 * p1;
}

std::uint64_t splitmix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t member_seed(std::uint64_t seed, std::size_t target, std::size_t member) {
  return splitmix(splitmix(seed + 0x9E3779B97F4A7C15ULL * (target + 1)) ^ (member + 1));
}

void check_shape(std::span<const FeatureVector> X, std::size_t n_labels) {
  if (X.empty() || X.size() != n_labels) throw ShapeMismatchError("feature and label counts differ or are zero");
  const auto d = X.front().size();
  if (d == 0) throw ShapeMismatchError("feature vectors are empty");
  for (const auto& row : X) {
    if (row.size() != d) throw ShapeMismatchError("feature vectors differ in length");
  }
}

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureVector> X, std::span<const std::uint8_t> y, const TreeParams& params,
              Mcg64* rng, std::size_t max_features)
      : X_(X), y_(y), params_(params), rng_(rng), dim_(X.front().size()), max_features_(max_features) {}

  BinaryTree build(std::vector<int> samples) {
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<int> samples, int depth) {
    const int n = static_cast<int>(samples.size());
    int pos = 0;
    for (int s : samples) pos += y_[s];
    const int idx = static_cast<int>(tree_.nodes.size());
    tree_.nodes.push_back({-1, -1, -1, n, pos, static_cast<double>(pos) / n});

    const bool pure = pos == 0 || pos == n;
    const bool depth_reached = params_.max_depth && depth >= *params_.max_depth;
    if (pure || depth_reached || n < params_.min_samples_split) return idx;

    const int feature = best_feature(samples, pos);
    if (feature < 0) return idx;

    std::vector<int> left, right;
    for (int s : samples) (X_[s][feature] ? right : left).push_back(s);
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    tree_.nodes[idx].feature = feature;
    tree_.nodes[idx].left = l;
    tree_.nodes[idx].right = r;
    return idx;
  }

  int best_feature(const std::vector<int>& samples, int pos) {
    const double n = static_cast<double>(samples.size());
    const double parent = gini_counts(pos, n);

    std::vector<int> order(dim_);
    std::iota(order.begin(), order.end(), 0);
    std::size_t evaluated = 0;
    int best = -1;
    double best_decrease = 0.0;
    for (std::size_t i = 0; i < dim_ && evaluated < max_features_; ++i) {
      if (rng_) std::swap(order[i], order[i + rng_->below(dim_ - i)]);
      const int f = order[i];
      int n1 = 0, pos1 = 0;
      for (int s : samples) {
        if (X_[s][f]) {
          ++n1;
          pos1 += y_[s];
        }
      }
      if (n1 == 0 || n1 == static_cast<int>(n)) continue;
      ++evaluated;
      const double n0 = n - n1;
      const double decrease =
          parent - (n0 / n) * gini_counts(pos - pos1, n0) - (n1 / n) * gini_counts(pos1, n1);
      if (best < 0 || decrease > best_decrease + kTieEps ||
          (std::abs(decrease - best_decrease) <= kTieEps && f < best)) {
        best = f;
        best_decrease = decrease;
      }
    }
    return best;
  }

  std::span<const FeatureVector> X_;
  std::span<const std::uint8_t> y_;
  TreeParams params_;
  Mcg64* rng_;
  std::size_t dim_;
  std::size_t max_features_;
  BinaryTree tree_;
};

std::vector<std::uint8_t> target_column(std::span<const LabelVector> Y, std::size_t t) {
  std::vector<std::uint8_t> y(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) y[i] = Y[i][t];
  return y;
}

std::vector<int> all_samples(std::size_t n) {
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

json tree_json(const BinaryTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"feature", n.feature},
                     {"left", n.left},
                     {"right", n.right},
                     {"n", n.n_samples},
                     {"pos", n.n_positive},
                     {"prob", n.probability}});
  }
  return nodes;
}

BinaryTree tree_from_json(const json& nodes) {
  BinaryTree t;
  for (const auto& n : nodes) {
    t.nodes.push_back({n.at("feature").get<int>(), n.at("left").get<int>(), n.at("right").get<int>(),
                       n.at("n").get<int>(), n.at("pos").get<int>(), n.at("prob").get<double>()});
  }
  const auto size = static_cast<int>(t.nodes.size());
  if (size == 0) throw Error("model tree has no nodes");
  for (const auto& n : t.nodes) {
    if (!n.leaf() && (n.left <= 0 || n.right <= 0 || n.left >= size || n.right >= size)) {
      throw Error("model tree has dangling child index");
    }
  }
  return t;
}

json tree_params_json(const TreeParams& p) {
  return {{"max_depth", p.max_depth ? json(*p.max_depth) : json(nullptr)}, {"min_samples_split", p.min_samples_split}};
}

TreeParams tree_params_from_json(const json& j) {
  TreeParams p;
  if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<int>();
  p.min_samples_split = j.at("min_samples_split").get<int>();
  return p;
}

json target_codes() {
  json t = json::array();
  for (std::size_t i = 0; i < kDiagnosableCauseCount; ++i) t.push_back(std::string(code(kAllCauses[i])));
  return t;
}

void check_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw DimensionMismatchError("feature vector has " + std::to_string(got) + " columns, model expects " +
                                 std::to_string(expected));
  }
}

CauseLabels causes_from_proba(const std::array<double, kDiagnosableCauseCount>& proba) {
  LabelVector labels{};
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) labels[t] = proba[t] >= 0.5 ? 1 : 0;
  return causes_from_labels(labels);
}

}  // namespace

std::size_t feature_index(LocationClass location, std::optional<DamageClass> damage) {
  for (std::size_t g = 0; g < kBladeLocations.size(); ++g) {
    if (kBladeLocations[g] == location) {
      return g * kFeatureGroupWidth + (damage ? index_of(*damage) : kDamageCount);
    }
  }
  throw Error("location has no feature group");
}

FeatureVector build_features(const MainDamageSummary& summary) {
  FeatureVector x(kFeatureDim, 0);
  for (auto l : kBladeLocations) x[feature_index(l, summary.at(l))] = 1;
  return x;
}

LabelVector label_vector(const CauseLabels& causes) {
  LabelVector v{};
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) v[t] = causes.contains(kAllCauses[t]) ? 1 : 0;
  return v;
}

CauseLabels causes_from_labels(const LabelVector& labels) {
  CauseLabels out;
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) {
    if (labels[t]) out.insert(kAllCauses[t]);
  }
  if (out.empty()) out.insert(FailureCause::Green);
  return out;
}

double gini(std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw EmptySetError("gini of an empty label multiset");
  double pos = 0;
  for (auto v : labels) pos += v ? 1 : 0;
  return gini_counts(pos, static_cast<double>(labels.size()));
}

std::uint64_t Mcg64::next() {
  state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
  return splitmix(state_);
}

std::uint64_t Mcg64::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const auto r = next();
    if (r >= threshold) return r % n;
  }
}

double BinaryTree::predict_proba(std::span<const std::uint8_t> x) const {
  int i = 0;
  while (!nodes[i].leaf()) {
    const auto f = static_cast<std::size_t>(nodes[i].feature);
    if (f >= x.size()) throw DimensionMismatchError("feature vector too short for tree");
    i = x[f] ? nodes[i].right : nodes[i].left;
  }
  return nodes[i].probability;
}

int BinaryTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].leaf()) continue;
    d[nodes[i].left] = d[nodes[i].right] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

BinaryTree fit_tree(std::span<const FeatureVector> X, std::span<const std::uint8_t> y, const TreeParams& params) {
  check_shape(X, y.size());
  TreeBuilder builder(X, y, params, nullptr, X.front().size());
  return builder.build(all_samples(X.size()));
}

TreeModel fit_tree_model(std::span<const FeatureVector> X, std::span<const LabelVector> Y, const TreeParams& params) {
  check_shape(X, Y.size());
  TreeModel m;
  m.params = params;
  m.feature_dim = X.front().size();
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) {
    const auto y = target_column(Y, t);
    m.trees.push_back(fit_tree(X, y, params));
  }
  return m;
}

ForestModel fit_forest(std::span<const FeatureVector> X, std::span<const LabelVector> Y, const ForestParams& params) {
  check_shape(X, Y.size());
  if (params.n_trees < 1) throw Error("n_trees must be positive");
  const std::size_t dim = X.front().size();
  const std::size_t k = params.feature_subset == FeatureSubset::All
                            ? dim
                            : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(dim))));
  ForestModel m;
  m.params = params;
  m.feature_dim = dim;
  m.trees.resize(kDiagnosableCauseCount);
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) {
    const auto y = target_column(Y, t);
    for (int member = 0; member < params.n_trees; ++member) {
      Mcg64 rng(member_seed(params.seed, t, static_cast<std::size_t>(member)));
      std::vector<int> samples;
      if (params.bootstrap) {
        samples.resize(X.size());
        for (auto& s : samples) s = static_cast<int>(rng.below(X.size()));
      } else {
        samples = all_samples(X.size());
      }
      Mcg64* feature_rng = params.feature_subset == FeatureSubset::All ? nullptr : &rng;
      TreeBuilder builder(X, y, params.tree, feature_rng, k);
      m.trees[t].push_back(builder.build(std::move(samples)));
    }
  }
  return m;
}

std::array<double, kDiagnosableCauseCount> predict_proba(const TreeModel& model, std::span<const std::uint8_t> x) {
  check_dim(model.feature_dim, x.size());
  std::array<double, kDiagnosableCauseCount> p{};
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) p[t] = model.trees.at(t).predict_proba(x);
  return p;
}

std::array<double, kDiagnosableCauseCount> predict_proba(const ForestModel& model, std::span<const std::uint8_t> x) {
  check_dim(model.feature_dim, x.size());
  std::array<double, kDiagnosableCauseCount> p{};
  for (std::size_t t = 0; t < kDiagnosableCauseCount; ++t) {
    const auto& members = model.trees.at(t);
    int votes = 0;
    for (const auto& tree : members) votes += tree.predict_proba(x) >= 0.5 ? 1 : 0;
    p[t] = static_cast<double>(votes) / static_cast<double>(members.size());
  }
  return p;
}

CauseLabels predict(const TreeModel& model, std::span<const std::uint8_t> x) {
  return causes_from_proba(predict_proba(model, x));
}

CauseLabels predict(const ForestModel& model, std::span<const std::uint8_t> x) {
  return causes_from_proba(predict_proba(model, x));
}

std::string to_json(const TreeModel& model) {
  json trees = json::array();
  for (const auto& t : model.trees) trees.push_back(tree_json(t));
  json doc{{"model", "decision_tree"},
           {"schema_version", 1},
           {"feature_dim", model.feature_dim},
           {"targets", target_codes()},
           {"params", tree_params_json(model.params)},
           {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

std::string to_json(const ForestModel& model) {
  json trees = json::array();
  for (const auto& members : model.trees) {
    json arr = json::array();
    for (const auto& t : members) arr.push_back(tree_json(t));
    trees.push_back(std::move(arr));
  }
  const auto& p = model.params;
  json params{{"n_trees", p.n_trees},
              {"bootstrap", p.bootstrap},
              {"feature_subset", p.feature_subset == FeatureSubset::All ? "all" : "sqrt"},
              {"seed", p.seed},
              {"tree", tree_params_json(p.tree)}};
  json doc{{"model", "random_forest"},
           {"schema_version", 1},
           {"feature_dim", model.feature_dim},
           {"targets", target_codes()},
           {"params", std::move(params)},
           {"trees", std::move(trees)}};
  return doc.dump(1) + "\n";
}

CauseLabels SavedModel::predict(std::span<const std::uint8_t> x) const {
  if (tree) return bitforensics::predict(*tree, x);
  if (forest) return bitforensics::predict(*forest, x);
  throw Error("empty model");
}

SavedModel model_from_json(std::string_view text) {
  SavedModel out;
  try {
    const auto doc = json::parse(text);
    const auto dim = doc.at("feature_dim").get<std::size_t>();
    if (dim == 0) throw DimensionMismatchError("model feature_dim must be positive");
    if (doc.at("targets") != target_codes()) throw Error("model targets do not match cause list");
    const auto kind = doc.at("model").get<std::string>();
    const auto& trees = doc.at("trees");
    if (trees.size() != kDiagnosableCauseCount) throw Error("model must hold one entry per cause");
    if (kind == "decision_tree") {
      TreeModel m;
      m.feature_dim = dim;
      m.params = tree_params_from_json(doc.at("params"));
      for (const auto& t : trees) m.trees.push_back(tree_from_json(t));
      out.tree = std::move(m);
    } else if (kind == "random_forest") {
      ForestModel m;
      m.feature_dim = dim;
      const auto& p = doc.at("params");
      m.params.n_trees = p.at("n_trees").get<int>();
      m.params.bootstrap = p.at("bootstrap").get<bool>();
      m.params.feature_subset = p.at("feature_subset").get<std::string>() == "all" ? FeatureSubset::All
                                                                                  : FeatureSubset::Sqrt;
      m.params.seed = p.at("seed").get<std::uint64_t>();
      m.params.tree = tree_params_from_json(p.at("tree"));
      for (const auto& members : trees) {
        std::vector<BinaryTree> v;
        for (const auto& t : members) v.push_back(tree_from_json(t));
        if (v.empty()) throw Error("forest target without trees");
        m.trees.push_back(std::move(v));
      }
      out.forest = std::move(m);
    } else {
      throw Error("unknown model kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  return out;
}

std::vector<CauseLabels> leave_one_out(std::span<const FeatureVector> X, std::span<const LabelVector> Y,
                                       ModelKind kind, const ForestParams& params) {
  check_shape(X, Y.size());
  if (X.size() < 2) throw ShapeMismatchError("leave-one-out needs at least two samples");
  std::vector<CauseLabels> out;
  for (std::size_t held = 0; held < X.size(); ++held) {
    std::vector<FeatureVector> xs;
    std::vector<LabelVector> ys;
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (i == held) continue;
      xs.push_back(X[i]);
      ys.push_back(Y[i]);
    }
    if (kind == ModelKind::DecisionTree) {
      out.push_back(predict(fit_tree_model(xs, ys, params.tree), X[held]));
    } else {
      out.push_back(predict(fit_forest(xs, ys, params), X[held]));
    }
  }
  return out;
}

}  // namespace bitforensics
