#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "radioclass/types.hpp"

namespace radioclass {

enum class ModelKind {
  LogReg,
  Svm,
  Knn,
  DTree,
  RForest,
  GBoost,
  Ensemble,
  Cnn,
};

std::string to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

enum class FeatureSpace { TfIdf, PooledSpectral, Spectrogram2d };
std::string to_string(FeatureSpace space);
std::optional<FeatureSpace> parse_feature_space(std::string_view text);

// Class probabilities; landing + takeoff == 1 within 1e-9 for every model.
struct Proba {
  double landing = 0.5;
  double takeoff = 0.5;
};

struct TrainMeta {
  uint64_t seed = 0;
  int epochs = 0;
  std::vector<std::pair<std::string, double>> hyperparameters;
};

class Model {
 public:
  virtual ~Model() = default;
  virtual ModelKind kind() const = 0;
  virtual Proba predict_proba(const FeatureVector& x) const = 0;
  const TrainMeta& train_meta() const { return meta_; }
  TrainMeta& train_meta() { return meta_; }

  /// Argmax over predict_proba; exact ties go to Landing.
  Label predict(const FeatureVector& x) const;

 protected:
  TrainMeta meta_;
};

using FeatureMatrix = std::vector<FeatureVector>;
using LabelVector = std::vector<int>;  // 0 = landing, 1 = takeoff

// ---- logistic regression ----

struct LogRegHyper {
  double lr = 0.1;
  int epochs = 500;
  double l2 = 1e-4;
};

class LogRegModel final : public Model {
 public:
  LogRegModel() = default;
  LogRegModel(std::vector<double> weights, double bias)
      : weights_(std::move(weights)), bias_(bias) {}
  ModelKind kind() const override { return ModelKind::LogReg; }
  Proba predict_proba(const FeatureVector& x) const override;
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
};

/// Mean log loss with L2 on the weights (not the bias), the quantity
/// train_logreg descends.
double logreg_loss(const FeatureMatrix& X, const LabelVector& y,
                   const std::vector<double>& w, double b, double l2);
void logreg_grad(const FeatureMatrix& X, const LabelVector& y,
                 const std::vector<double>& w, double b, double l2,
                 std::vector<double>& grad_w, double& grad_b);

/// Full-batch gradient descent from zero init; deterministic.
LogRegModel train_logreg(const FeatureMatrix& X, const LabelVector& y,
                         const LogRegHyper& hyper = {});

// ---- linear SVM with Platt-scaled probabilities ----

struct SvmHyper {
  double lr = 0.05;
  int epochs = 500;
  double C = 1.0;
};

class SvmModel final : public Model {
 public:
  SvmModel() = default;
  SvmModel(std::vector<double> weights, double bias, double platt_a,
           double platt_b)
      : weights_(std::move(weights)),
        bias_(bias),
        platt_a_(platt_a),
        platt_b_(platt_b) {}
  ModelKind kind() const override { return ModelKind::Svm; }
  Proba predict_proba(const FeatureVector& x) const override;
  double margin(const FeatureVector& x) const;
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  double platt_a() const { return platt_a_; }
  double platt_b() const { return platt_b_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  double platt_a_ = 1.0;
  double platt_b_ = 0.0;
};

/// Hinge-loss subgradient descent, then a logistic fit mapping margins to
/// probabilities (targets smoothed per class as (N+1)/(N+2) and 1/(N+2)).
SvmModel train_svm(const FeatureMatrix& X, const LabelVector& y,
                   const SvmHyper& hyper = {});

// ---- k-nearest neighbors ----

struct KnnHyper {
  int k = 5;
};

class KnnModel final : public Model {
 public:
  KnnModel() = default;
  KnnModel(FeatureMatrix X, LabelVector y, int k)
      : X_(std::move(X)), y_(std::move(y)), k_(k) {}
  ModelKind kind() const override { return ModelKind::Knn; }
  Proba predict_proba(const FeatureVector& x) const override;
  const FeatureMatrix& train_X() const { return X_; }
  const LabelVector& train_y() const { return y_; }
  int k() const { return k_; }

 private:
  FeatureMatrix X_;
  LabelVector y_;
  int k_ = 5;
};

/// p_j = (class-j count among the k nearest by Euclidean distance) / k;
/// distance ties keep the lower training index.
Proba knn_predict_proba(const FeatureMatrix& X_train, const LabelVector& y,
                        const FeatureVector& x, int k);

KnnModel train_knn(const FeatureMatrix& X, const LabelVector& y,
                   const KnnHyper& hyper = {});

// ---- CART decision tree ----

struct DTreeHyper {
  int max_depth = 8;
  int min_leaf = 1;
};

// Flat node pool; feature < 0 marks a leaf. Classification leaves carry
// p(takeoff), regression leaves the fitted value.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  double evaluate(const FeatureVector& x) const;
};

class DTreeModel final : public Model {
 public:
  DTreeModel() = default;
  explicit DTreeModel(Tree tree) : tree_(std::move(tree)) {}
  ModelKind kind() const override { return ModelKind::DTree; }
  Proba predict_proba(const FeatureVector& x) const override;
  const Tree& tree() const { return tree_; }

 private:
  Tree tree_;
};

/// Greedy Gini splits at midpoints of sorted distinct values; ties broken
/// by lowest feature index, then lowest threshold.
DTreeModel train_dtree(const FeatureMatrix& X, const LabelVector& y,
                       const DTreeHyper& hyper = {});

// ---- random forest ----

struct RForestHyper {
  int n_trees = 100;
  int max_depth = 8;
  int min_leaf = 1;
  bool bootstrap = true;
  double feature_frac = -1.0;  // < 0 selects ceil(sqrt(d)) features per node
  uint64_t seed = 42;
};

class RForestModel final : public Model {
 public:
  ModelKind kind() const override { return ModelKind::RForest; }
  Proba predict_proba(const FeatureVector& x) const override;

  std::vector<Tree> trees;
  // Row indices each tree trained on; kept for out-of-bag evaluation.
  std::vector<std::vector<int>> bootstrap_indices;
};

RForestModel train_rforest(const FeatureMatrix& X, const LabelVector& y,
                           const RForestHyper& hyper = {});

// ---- gradient boosting ----

struct GBoostHyper {
  int n_rounds = 100;
  double lr = 0.1;
  int depth = 3;
  int min_leaf = 1;
};

class GBoostModel final : public Model {
 public:
  ModelKind kind() const override { return ModelKind::GBoost; }
  Proba predict_proba(const FeatureVector& x) const override;
  double decision(const FeatureVector& x) const;  // log-odds F(x)

  double f0 = 0.0;
  double lr = 0.1;
  std::vector<Tree> trees;
  std::vector<double> train_loss_trace;  // log loss after each round
};

/// Logistic-loss boosting: F0 = log(p/(1-p)); each round fits an SSE
/// regression tree to residuals y - sigmoid(F) and sets leaves by the
/// Newton step sum(r)/sum(h).
GBoostModel train_gboost(const FeatureMatrix& X, const LabelVector& y,
                         const GBoostHyper& hyper = {});

// ---- soft-voting ensemble ----

/// Predicted class = argmax_j sum_i p_ij, ties toward Landing; also
/// returns the member mean. Throws EmptyEnsemble.
std::pair<Label, Proba> soft_vote(const std::vector<Proba>& probas);

class EnsembleModel final : public Model {
 public:
  ModelKind kind() const override { return ModelKind::Ensemble; }
  Proba predict_proba(const FeatureVector& x) const override;

  std::vector<std::shared_ptr<Model>> members;
};

/// Default voting pool: logreg, svm, rforest, gboost, knn fit
/// independently on the same features.
EnsembleModel train_ensemble(const FeatureMatrix& X, const LabelVector& y,
                             uint64_t seed);

}  // namespace radioclass
