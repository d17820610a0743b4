#include "radioclass/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "radioclass/errors.hpp"
#include "radioclass/rng.hpp"

namespace radioclass {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// max(z,0) - z*y + log1p(exp(-|z|)): BCE on the logit, no overflow.
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::fabs(z)));
}

double dot(const std::vector<double>& w, const FeatureVector& x) {
  if (w.size() != x.size())
    throw DimensionMismatch("feature size " + std::to_string(x.size()) +
                            " vs model size " + std::to_string(w.size()));
  double acc = 0.0;
  for (size_t i = 0; i < w.size(); ++i) acc += w[i] * x[i];
  return acc;
}

Proba make_proba(double p_takeoff) {
  const double p = std::clamp(p_takeoff, 0.0, 1.0);
  return {1.0 - p, p};
}

void check_training_set(const FeatureMatrix& X, const LabelVector& y) {
  if (X.empty()) throw EmptyTrainingSet("no training examples");
  if (X.size() != y.size())
    throw DimensionMismatch("rows " + std::to_string(X.size()) +
                            " vs labels " + std::to_string(y.size()));
  const size_t d = X[0].size();
  for (const auto& row : X)
    if (row.size() != d)
      throw DimensionMismatch("ragged feature matrix");
  for (int label : y)
    if (label != 0 && label != 1)
      throw DimensionMismatch("labels must be 0 or 1");
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LogReg: return "logreg";
    case ModelKind::Svm: return "svm";
    case ModelKind::Knn: return "knn";
    case ModelKind::DTree: return "dtree";
    case ModelKind::RForest: return "rforest";
    case ModelKind::GBoost: return "gboost";
    case ModelKind::Ensemble: return "ensemble";
    case ModelKind::Cnn: return "cnn";
  }
  return "unknown";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  if (text == "logreg") return ModelKind::LogReg;
  if (text == "svm") return ModelKind::Svm;
  if (text == "knn") return ModelKind::Knn;
  if (text == "dtree") return ModelKind::DTree;
  if (text == "rforest") return ModelKind::RForest;
  if (text == "gboost") return ModelKind::GBoost;
  if (text == "ensemble") return ModelKind::Ensemble;
  if (text == "cnn") return ModelKind::Cnn;
  return std::nullopt;
}

std::string to_string(FeatureSpace space) {
  switch (space) {
    case FeatureSpace::TfIdf: return "tfidf";
    case FeatureSpace::PooledSpectral: return "pooled_spectral";
    case FeatureSpace::Spectrogram2d: return "spectrogram_2d";
  }
  return "unknown";
}

std::optional<FeatureSpace> parse_feature_space(std::string_view text) {
  if (text == "tfidf") return FeatureSpace::TfIdf;
  if (text == "pooled_spectral") return FeatureSpace::PooledSpectral;
  if (text == "spectrogram_2d") return FeatureSpace::Spectrogram2d;
  return std::nullopt;
}

Label Model::predict(const FeatureVector& x) const {
  const Proba p = predict_proba(x);
  return p.takeoff > p.landing ? Label::Takeoff : Label::Landing;
}

// ---- logistic regression ----

Proba LogRegModel::predict_proba(const FeatureVector& x) const {
  return make_proba(sigmoid(dot(weights_, x) + bias_));
}

double logreg_loss(const FeatureMatrix& X, const LabelVector& y,
                   const std::vector<double>& w, double b, double l2) {
  double loss = 0.0;
  for (size_t i = 0; i < X.size(); ++i)
    loss += bce_from_logit(dot(w, X[i]) + b, y[i]);
  loss /= static_cast<double>(X.size());
  double reg = 0.0;
  for (double wj : w) reg += wj * wj;
  return loss + 0.5 * l2 * reg;
}

void logreg_grad(const FeatureMatrix& X, const LabelVector& y,
                 const std::vector<double>& w, double b, double l2,
                 std::vector<double>& grad_w, double& grad_b) {
  const auto n = static_cast<double>(X.size());
  grad_w.assign(w.size(), 0.0);
  grad_b = 0.0;
  for (size_t i = 0; i < X.size(); ++i) {
    const double err = sigmoid(dot(w, X[i]) + b) - y[i];
    for (size_t j = 0; j < w.size(); ++j) grad_w[j] += err * X[i][j];
    grad_b += err;
  }
  for (size_t j = 0; j < w.size(); ++j)
    grad_w[j] = grad_w[j] / n + l2 * w[j];
  grad_b /= n;
}

LogRegModel train_logreg(const FeatureMatrix& X, const LabelVector& y,
                         const LogRegHyper& hyper) {
  check_training_set(X, y);
  std::vector<double> w(X[0].size(), 0.0);
  double b = 0.0;
  std::vector<double> gw;
  double gb = 0.0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    logreg_grad(X, y, w, b, hyper.l2, gw, gb);
    for (size_t j = 0; j < w.size(); ++j) w[j] -= hyper.lr * gw[j];
    b -= hyper.lr * gb;
    if (!std::isfinite(b))
      throw NumericError("logreg diverged at epoch " + std::to_string(epoch));
  }
  LogRegModel model(std::move(w), b);
  model.train_meta().epochs = hyper.epochs;
  model.train_meta().hyperparameters = {
      {"lr", hyper.lr}, {"epochs", double(hyper.epochs)}, {"l2", hyper.l2}};
  return model;
}

// ---- linear SVM ----

double SvmModel::margin(const FeatureVector& x) const {
  return dot(weights_, x) + bias_;
}

Proba SvmModel::predict_proba(const FeatureVector& x) const {
  return make_proba(sigmoid(platt_a_ * margin(x) + platt_b_));
}

namespace {

/// Fit p = sigmoid(a*m + b) to smoothed targets by Newton iterations.
std::pair<double, double> platt_fit(const std::vector<double>& margins,
                                    const LabelVector& y) {
  const auto n = static_cast<double>(margins.size());
  double n_pos = 0.0;
  for (int label : y) n_pos += label;
  const double n_neg = n - n_pos;
  const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
  const double t_neg = 1.0 / (n_neg + 2.0);

  double a = 0.0;
  double b = std::log((n_pos + 1.0) / (n_neg + 1.0));
  for (int iter = 0; iter < 100; ++iter) {
    double ga = 0.0, gb = 0.0, haa = 0.0, hab = 0.0, hbb = 0.0;
    for (size_t i = 0; i < margins.size(); ++i) {
      const double m = margins[i];
      const double p = sigmoid(a * m + b);
      const double t = y[i] == 1 ? t_pos : t_neg;
      const double err = p - t;
      const double curv = std::max(p * (1.0 - p), 1e-12);
      ga += err * m;
      gb += err;
      haa += curv * m * m;
      hab += curv * m;
      hbb += curv;
    }
    haa = haa / n + 1e-12;
    hab /= n;
    hbb = hbb / n + 1e-12;
    ga /= n;
    gb /= n;
    const double det = haa * hbb - hab * hab;
    double da, db;
    if (std::fabs(det) > 1e-18) {
      da = (hbb * ga - hab * gb) / det;
      db = (haa * gb - hab * ga) / det;
    } else {
      da = ga;
      db = gb;
    }
    a -= da;
    b -= db;
    if (std::fabs(da) + std::fabs(db) < 1e-12) break;
  }
  return {a, b};
}

}  // namespace

SvmModel train_svm(const FeatureMatrix& X, const LabelVector& y,
                   const SvmHyper& hyper) {
  check_training_set(X, y);
  const auto n = static_cast<double>(X.size());
  const size_t d = X[0].size();
  const double lambda = 1.0 / (hyper.C * n);

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::vector<double> gw(d, 0.0);
    double gb = 0.0;
    for (size_t i = 0; i < X.size(); ++i) {
      const double t = y[i] == 1 ? 1.0 : -1.0;
      if (t * (dot(w, X[i]) + b) < 1.0) {
        for (size_t j = 0; j < d; ++j) gw[j] -= t * X[i][j];
        gb -= t;
      }
    }
    for (size_t j = 0; j < d; ++j)
      w[j] -= hyper.lr * (lambda * w[j] + gw[j] / n);
    b -= hyper.lr * (gb / n);
    if (!std::isfinite(b))
      throw NumericError("svm diverged at epoch " + std::to_string(epoch));
  }

  std::vector<double> margins(X.size());
  for (size_t i = 0; i < X.size(); ++i) margins[i] = dot(w, X[i]) + b;
  const auto [a, pb] = platt_fit(margins, y);

  SvmModel model(std::move(w), b, a, pb);
  model.train_meta().epochs = hyper.epochs;
  model.train_meta().hyperparameters = {
      {"lr", hyper.lr}, {"epochs", double(hyper.epochs)}, {"C", hyper.C}};
  return model;
}

// ---- k-nearest neighbors ----

Proba knn_predict_proba(const FeatureMatrix& X_train, const LabelVector& y,
                        const FeatureVector& x, int k) {
  if (X_train.empty()) throw EmptyTrainingSet("knn with no training points");
  if (k < 1) throw ConfigError("knn requires k >= 1");
  const auto n = X_train.size();
  const auto kk = std::min<size_t>(k, n);

  std::vector<std::pair<double, size_t>> dist(n);
  for (size_t i = 0; i < n; ++i) {
    if (X_train[i].size() != x.size())
      throw DimensionMismatch("knn query size mismatch");
    double d2 = 0.0;
    for (size_t j = 0; j < x.size(); ++j) {
      const double diff = X_train[i][j] - x[j];
      d2 += diff * diff;
    }
    dist[i] = {d2, i};
  }
  // stable sort on distance alone keeps lower training indices first on
  // exact ties
  std::stable_sort(dist.begin(), dist.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  double takeoff = 0.0;
  for (size_t r = 0; r < kk; ++r) takeoff += y[dist[r].second];
  return make_proba(takeoff / static_cast<double>(kk));
}

Proba KnnModel::predict_proba(const FeatureVector& x) const {
  return knn_predict_proba(X_, y_, x, k_);
}

KnnModel train_knn(const FeatureMatrix& X, const LabelVector& y,
                   const KnnHyper& hyper) {
  check_training_set(X, y);
  KnnModel model(X, y, hyper.k);
  model.train_meta().hyperparameters = {{"k", double(hyper.k)}};
  return model;
}

// ---- tree machinery shared by CART, forest, boosting ----

double Tree::evaluate(const FeatureVector& x) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const auto& n = nodes[node];
    node = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[node].value;
}

namespace {

struct TreeBuild {
  const FeatureMatrix& X;
  const std::vector<double>& target;
  const std::vector<double>* hess;  // null for classification
  int max_depth;
  int min_leaf;
  bool regression;
  // fills candidate feature indices (ascending); identity when null
  std::function<void(std::vector<int>&)> sample_features;

  std::vector<TreeNode> nodes;

  double leaf_value(const std::vector<int>& idx) const {
    double sum = 0.0;
    for (int i : idx) sum += target[i];
    if (!regression) return sum / static_cast<double>(idx.size());
    double hsum = 0.0;
    for (int i : idx) hsum += (*hess)[i];
    return sum / (hsum + 1e-12);
  }

  // Gini for classification, SSE for regression; lower is better.
  static double gini_cost(double count, double pos_sum) {
    const double p = pos_sum / count;
    return count * 2.0 * p * (1.0 - p);
  }

  struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  Split best_split(const std::vector<int>& idx,
                   const std::vector<int>& features) const {
    const auto n = static_cast<double>(idx.size());
    double total = 0.0, total_sq = 0.0;
    for (int i : idx) {
      total += target[i];
      total_sq += target[i] * target[i];
    }
    const double parent_cost =
        regression ? total_sq - total * total / n : gini_cost(n, total);

    Split best;
    std::vector<std::pair<double, double>> column(idx.size());
    for (int f : features) {
      for (size_t r = 0; r < idx.size(); ++r)
        column[r] = {X[idx[r]][f], target[idx[r]]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });

      double left_sum = 0.0, left_sq = 0.0;
      for (size_t r = 1; r < column.size(); ++r) {
        left_sum += column[r - 1].second;
        left_sq += column[r - 1].second * column[r - 1].second;
        if (column[r].first <= column[r - 1].first) continue;
        const auto nl = static_cast<double>(r);
        const double nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        double cost;
        if (regression) {
          const double right_sum = total - left_sum;
          const double right_sq = total_sq - left_sq;
          cost = (left_sq - left_sum * left_sum / nl) +
                 (right_sq - right_sum * right_sum / nr);
        } else {
          cost = gini_cost(nl, left_sum) + gini_cost(nr, total - left_sum);
        }
        const double gain = parent_cost - cost;
        if (gain > best.gain + 1e-12 ||
            (!best.found && gain > 1e-12)) {
          best.found = true;
          best.feature = f;
          best.threshold = (column[r - 1].first + column[r].first) / 2.0;
          best.gain = gain;
        }
      }
    }
    return best;
  }

  int build(std::vector<int>& idx, int depth) {
    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[node_id].value = leaf_value(idx);
    if (depth >= max_depth || idx.size() < 2 * static_cast<size_t>(min_leaf))
      return node_id;

    std::vector<int> features(X[0].size());
    std::iota(features.begin(), features.end(), 0);
    if (sample_features) sample_features(features);

    const Split split = best_split(idx, features);
    if (!split.found) return node_id;

    std::vector<int> left, right;
    for (int i : idx)
      (X[i][split.feature] <= split.threshold ? left : right).push_back(i);
    if (left.empty() || right.empty()) return node_id;

    nodes[node_id].feature = split.feature;
    nodes[node_id].threshold = split.threshold;
    const int l = build(left, depth + 1);
    nodes[node_id].left = l;
    const int r = build(right, depth + 1);
    nodes[node_id].right = r;
    return node_id;
  }
};

Tree build_tree(const FeatureMatrix& X, const std::vector<double>& target,
                const std::vector<double>* hess, int max_depth, int min_leaf,
                bool regression, const std::vector<int>& row_indices,
                std::function<void(std::vector<int>&)> sampler) {
  TreeBuild builder{X,          target,     hess,
                    max_depth,  min_leaf,   regression,
                    std::move(sampler), {}};
  std::vector<int> idx = row_indices;
  builder.build(idx, 0);
  return Tree{std::move(builder.nodes)};
}

}  // namespace

// ---- CART ----

Proba DTreeModel::predict_proba(const FeatureVector& x) const {
  return make_proba(tree_.evaluate(x));
}

DTreeModel train_dtree(const FeatureMatrix& X, const LabelVector& y,
                       const DTreeHyper& hyper) {
  check_training_set(X, y);
  std::vector<double> target(y.begin(), y.end());
  std::vector<int> rows(X.size());
  std::iota(rows.begin(), rows.end(), 0);
  DTreeModel model(build_tree(X, target, nullptr, hyper.max_depth,
                              hyper.min_leaf, false, rows, nullptr));
  model.train_meta().hyperparameters = {
      {"max_depth", double(hyper.max_depth)},
      {"min_leaf", double(hyper.min_leaf)}};
  return model;
}

// ---- random forest ----

Proba RForestModel::predict_proba(const FeatureVector& x) const {
  if (trees.empty()) throw EmptyTrainingSet("forest with no trees");
  double acc = 0.0;
  for (const auto& tree : trees) acc += tree.evaluate(x);
  return make_proba(acc / static_cast<double>(trees.size()));
}

RForestModel train_rforest(const FeatureMatrix& X, const LabelVector& y,
                           const RForestHyper& hyper) {
  check_training_set(X, y);
  const auto n = X.size();
  const auto d = X[0].size();
  size_t m = hyper.feature_frac < 0.0
                 ? static_cast<size_t>(
                       std::ceil(std::sqrt(static_cast<double>(d))))
                 : static_cast<size_t>(std::ceil(hyper.feature_frac * d));
  m = std::clamp<size_t>(m, 1, d);

  std::vector<double> target(y.begin(), y.end());
  RForestModel model;
  for (int t = 0; t < hyper.n_trees; ++t) {
    auto rng = make_rng(hyper.seed, "rforest/tree/" + std::to_string(t));

    std::vector<int> rows(n);
    if (hyper.bootstrap) {
      for (auto& r : rows) r = static_cast<int>(uniform_index(rng, n));
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }

    std::function<void(std::vector<int>&)> sampler;
    if (m < d) {
      sampler = [m, &rng](std::vector<int>& features) {
        for (size_t i = 0; i < m; ++i) {
          const auto j =
              i + uniform_index(rng, features.size() - i);
          std::swap(features[i], features[j]);
        }
        features.resize(m);
        std::sort(features.begin(), features.end());
      };
    }

    model.trees.push_back(build_tree(X, target, nullptr, hyper.max_depth,
                                     hyper.min_leaf, false, rows,
                                     std::move(sampler)));
    model.bootstrap_indices.push_back(std::move(rows));
  }
  model.train_meta().seed = hyper.seed;
  model.train_meta().hyperparameters = {
      {"n_trees", double(hyper.n_trees)},
      {"max_depth", double(hyper.max_depth)},
      {"bootstrap", hyper.bootstrap ? 1.0 : 0.0},
      {"feature_frac", hyper.feature_frac}};
  return model;
}

// ---- gradient boosting ----

double GBoostModel::decision(const FeatureVector& x) const {
  double f = f0;
  for (const auto& tree : trees) f += lr * tree.evaluate(x);
  return f;
}

Proba GBoostModel::predict_proba(const FeatureVector& x) const {
  return make_proba(sigmoid(decision(x)));
}

GBoostModel train_gboost(const FeatureMatrix& X, const LabelVector& y,
                         const GBoostHyper& hyper) {
  check_training_set(X, y);
  const auto n = X.size();

  double pos = 0.0;
  for (int label : y) pos += label;
  // clamped so a single-class training set yields a finite prior
  const double prior =
      std::clamp(pos / static_cast<double>(n), 1e-6, 1.0 - 1e-6);

  GBoostModel model;
  model.f0 = std::log(prior / (1.0 - prior));
  model.lr = hyper.lr;

  std::vector<double> F(n, model.f0);
  std::vector<int> rows(n);
  std::iota(rows.begin(), rows.end(), 0);

  const auto mean_loss = [&]() {
    double loss = 0.0;
    for (size_t i = 0; i < n; ++i) loss += bce_from_logit(F[i], y[i]);
    return loss / static_cast<double>(n);
  };
  model.train_loss_trace.push_back(mean_loss());

  std::vector<double> residual(n), hessian(n);
  for (int round = 0; round < hyper.n_rounds; ++round) {
    for (size_t i = 0; i < n; ++i) {
      const double p = sigmoid(F[i]);
      residual[i] = y[i] - p;
      hessian[i] = p * (1.0 - p);
    }
    Tree tree = build_tree(X, residual, &hessian, hyper.depth,
                           hyper.min_leaf, true, rows, nullptr);
    for (size_t i = 0; i < n; ++i) F[i] += hyper.lr * tree.evaluate(X[i]);
    model.trees.push_back(std::move(tree));
    const double loss = mean_loss();
    if (!std::isfinite(loss))
      throw NumericError("gboost diverged at round " + std::to_string(round));
    model.train_loss_trace.push_back(loss);
  }
  model.train_meta().hyperparameters = {{"n_rounds", double(hyper.n_rounds)},
                                        {"lr", hyper.lr},
                                        {"depth", double(hyper.depth)}};
  return model;
}

// ---- soft voting ----

std::pair<Label, Proba> soft_vote(const std::vector<Proba>& probas) {
  if (probas.empty()) throw EmptyEnsemble("soft vote over zero models");
  double landing = 0.0, takeoff = 0.0;
  for (const auto& p : probas) {
    landing += p.landing;
    takeoff += p.takeoff;
  }
  const auto n = static_cast<double>(probas.size());
  const Label pred = takeoff > landing ? Label::Takeoff : Label::Landing;
  return {pred, Proba{landing / n, takeoff / n}};
}

Proba EnsembleModel::predict_proba(const FeatureVector& x) const {
  if (members.empty()) throw EmptyEnsemble("ensemble with no members");
  std::vector<Proba> probas;
  probas.reserve(members.size());
  for (const auto& m : members) probas.push_back(m->predict_proba(x));
  return soft_vote(probas).second;
}

EnsembleModel train_ensemble(const FeatureMatrix& X, const LabelVector& y,
                             uint64_t seed) {
  EnsembleModel model;
  model.members.push_back(
      std::make_shared<LogRegModel>(train_logreg(X, y)));
  model.members.push_back(std::make_shared<SvmModel>(train_svm(X, y)));
  RForestHyper rf;
  rf.seed = seed;
  model.members.push_back(
      std::make_shared<RForestModel>(train_rforest(X, y, rf)));
  model.members.push_back(
      std::make_shared<GBoostModel>(train_gboost(X, y)));
  model.members.push_back(std::make_shared<KnnModel>(train_knn(X, y)));
  model.train_meta().seed = seed;
  return model;
}

}  // namespace radioclass
