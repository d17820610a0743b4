#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "radioclass/errors.hpp"
#include "radioclass/models.hpp"
#include "radioclass/rng.hpp"

using namespace radioclass;

namespace {

/// Two gaussian blobs around (-1,-1) and (+1,+1); linearly separable for
/// small spread.
void make_blobs(int n_per_class, double spread, uint64_t seed,
                FeatureMatrix& X, LabelVector& y) {
  auto rng = make_rng(seed, "test/models/blobs");
  X.clear();
  y.clear();
  for (int c = 0; c < 2; ++c) {
    const double center = c == 0 ? -1.0 : 1.0;
    for (int i = 0; i < n_per_class; ++i) {
      X.push_back({center + spread * gaussian(rng),
                   center + spread * gaussian(rng)});
      y.push_back(c);
    }
  }
}

double train_accuracy(const Model& model, const FeatureMatrix& X,
                      const LabelVector& y) {
  int correct = 0;
  for (size_t i = 0; i < X.size(); ++i)
    if (static_cast<int>(model.predict(X[i])) == y[i]) ++correct;
  return static_cast<double>(correct) / X.size();
}

}  // namespace

TEST_CASE("trainers validate the training set") {
  CHECK_THROWS_AS(train_logreg({}, {}), EmptyTrainingSet);
  CHECK_THROWS_AS(train_logreg({{1.0}}, {0, 1}), DimensionMismatch);
  CHECK_THROWS_AS(train_logreg({{1.0}, {1.0, 2.0}}, {0, 1}),
                  DimensionMismatch);
  CHECK_THROWS_AS(train_logreg({{1.0}, {2.0}}, {0, 2}), DimensionMismatch);
}

TEST_CASE("logreg analytic gradient matches central differences") {
  auto rng = make_rng(211, "test/models/logreg-grad");
  FeatureMatrix X;
  LabelVector y;
  for (int i = 0; i < 6; ++i) {
    X.push_back({gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)});
    y.push_back(i % 2);
  }
  std::vector<double> w = {0.3, -0.7, 0.1, 0.9};
  double b = -0.2;
  const double l2 = 0.05;

  std::vector<double> grad_w;
  double grad_b = 0.0;
  logreg_grad(X, y, w, b, l2, grad_w, grad_b);

  REQUIRE(grad_w.size() == w.size());
  for (size_t j = 0; j < w.size(); ++j) {
    const double fd = oracles::finite_diff(
        [&] { return logreg_loss(X, y, w, b, l2); }, &w[j], 1e-6);
    CHECK(oracles::rel_err(grad_w[j], fd) < 1e-7);
  }
  const double fd_b = oracles::finite_diff(
      [&] { return logreg_loss(X, y, w, b, l2); }, &b, 1e-6);
  CHECK(oracles::rel_err(grad_b, fd_b) < 1e-7);
}

TEST_CASE("logreg descends the loss and separates the blobs") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(30, 0.2, 1, X, y);

  const auto model = train_logreg(X, y);
  const double trained =
      logreg_loss(X, y, model.weights(), model.bias(), 1e-4);
  const double at_zero =
      logreg_loss(X, y, std::vector<double>(2, 0.0), 0.0, 1e-4);
  CHECK(trained < at_zero);
  CHECK(train_accuracy(model, X, y) == 1.0);

  for (const auto& x : X) {
    const auto p = model.predict_proba(x);
    CHECK(p.landing + p.takeoff == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.takeoff >= 0.0);
    CHECK(p.takeoff <= 1.0);
  }
}

TEST_CASE("stronger L2 shrinks logreg weights") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(30, 0.2, 2, X, y);

  LogRegHyper weak, strong;
  weak.l2 = 1e-6;
  strong.l2 = 1.0;
  const auto w_model = train_logreg(X, y, weak);
  const auto s_model = train_logreg(X, y, strong);
  auto norm = [](const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
  };
  CHECK(norm(s_model.weights()) < norm(w_model.weights()));
}

TEST_CASE("logreg tolerates a single-class training set") {
  FeatureMatrix X = {{1.0, 0.0}, {0.9, 0.1}, {1.1, -0.1}};
  LabelVector y = {1, 1, 1};
  const auto model = train_logreg(X, y);
  CHECK(model.predict_proba({1.0, 0.0}).takeoff > 0.5);
}

TEST_CASE("svm separates blobs and emits calibrated probabilities") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(30, 0.2, 3, X, y);

  const auto model = train_svm(X, y);
  CHECK(train_accuracy(model, X, y) == 1.0);

  // Probability must increase with the margin.
  const double m_neg = model.margin({-1.0, -1.0});
  const double m_pos = model.margin({1.0, 1.0});
  CHECK(m_neg < 0.0);
  CHECK(m_pos > 0.0);
  const auto p_neg = model.predict_proba({-1.0, -1.0});
  const auto p_mid = model.predict_proba({0.0, 0.0});
  const auto p_pos = model.predict_proba({1.0, 1.0});
  CHECK(p_neg.takeoff < p_mid.takeoff);
  CHECK(p_mid.takeoff < p_pos.takeoff);
  for (const auto& p : {p_neg, p_mid, p_pos}) {
    CHECK(p.takeoff > 0.0);
    CHECK(p.takeoff < 1.0);
    CHECK(p.landing + p.takeoff == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("svm training is symmetric under label exchange") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(20, 0.3, 4, X, y);
  LabelVector flipped(y.size());
  for (size_t i = 0; i < y.size(); ++i) flipped[i] = 1 - y[i];

  const auto a = train_svm(X, y);
  const auto b = train_svm(X, flipped);
  REQUIRE(a.weights().size() == b.weights().size());
  for (size_t j = 0; j < a.weights().size(); ++j)
    CHECK(a.weights()[j] == -b.weights()[j]);
  CHECK(a.bias() == -b.bias());
}

TEST_CASE("knn probabilities match the literal neighbor count") {
  const FeatureMatrix X = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}};
  const LabelVector y = {0, 0, 0, 1, 1};

  CHECK(knn_predict_proba(X, y, {0.1, 0.0}, 3).takeoff == 0.0);
  CHECK(knn_predict_proba(X, y, {5.5, 5.0}, 3).takeoff ==
        doctest::Approx(2.0 / 3.0));
  CHECK(knn_predict_proba(X, y, {5.5, 5.0}, 5).takeoff ==
        doctest::Approx(2.0 / 5.0));
  // k larger than the training set clamps to n.
  CHECK(knn_predict_proba(X, y, {0, 0}, 50).takeoff ==
        doctest::Approx(2.0 / 5.0));
  CHECK_THROWS_AS(knn_predict_proba(X, y, {0, 0}, 0), ConfigError);
  CHECK_THROWS_AS(knn_predict_proba(X, y, {0.0}, 3), DimensionMismatch);
}

TEST_CASE("knn distance ties prefer the lower training index") {
  const FeatureMatrix X = {{0.0}, {2.0}};
  const LabelVector y = {0, 1};
  // Query at 1.0 is equidistant; index 0 wins the k=1 vote.
  CHECK(knn_predict_proba(X, y, {1.0}, 1).takeoff == 0.0);
}

TEST_CASE("exact probability ties predict Landing") {
  const auto model = train_knn({{0.0}, {2.0}}, {0, 1}, {.k = 2});
  CHECK(model.predict({1.0}) == Label::Landing);
  CHECK(model.predict_proba({1.0}).takeoff == 0.5);
}

TEST_CASE("cart finds the obvious midpoint split") {
  const FeatureMatrix X = {{1.0}, {2.0}, {3.0}, {4.0}};
  const LabelVector y = {0, 0, 1, 1};
  const auto model = train_dtree(X, y);

  const auto& root = model.tree().nodes[0];
  REQUIRE_FALSE(root.is_leaf());
  CHECK(root.feature == 0);
  CHECK(root.threshold == doctest::Approx(2.5));
  const auto& left = model.tree().nodes[root.left];
  const auto& right = model.tree().nodes[root.right];
  CHECK(left.is_leaf());
  CHECK(right.is_leaf());
  CHECK(left.value == 0.0);
  CHECK(right.value == 1.0);

  CHECK(model.predict_proba({1.5}).takeoff == 0.0);
  CHECK(model.predict_proba({3.7}).takeoff == 1.0);
}

TEST_CASE("cart split ties break toward the lower feature index") {
  // Feature 1 duplicates feature 0; gains are identical.
  const FeatureMatrix X = {{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}, {4.0, 4.0}};
  const LabelVector y = {0, 0, 1, 1};
  const auto model = train_dtree(X, y);
  CHECK(model.tree().nodes[0].feature == 0);
}

TEST_CASE("cart respects max_depth and min_leaf") {
  // y = x0 AND x1 needs depth 2; every root split has positive gain.
  const FeatureMatrix X = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  const LabelVector y = {0, 0, 0, 1};

  const auto deep = train_dtree(X, y, {.max_depth = 2, .min_leaf = 1});
  CHECK(train_accuracy(deep, X, y) == 1.0);

  // Depth 1 cannot isolate the single positive corner.
  const auto shallow = train_dtree(X, y, {.max_depth = 1, .min_leaf = 1});
  CHECK(train_accuracy(shallow, X, y) == 0.75);

  const auto stump = train_dtree(X, y, {.max_depth = 0, .min_leaf = 1});
  CHECK(stump.tree().nodes.size() == 1);
  CHECK(stump.tree().nodes[0].is_leaf());

  // min_leaf 2 blocks the second-level 1+1 split, so the positive corner
  // stays merged; min_leaf 1 allows it (the deep tree above).
  const auto wide = train_dtree(X, y, {.max_depth = 4, .min_leaf = 2});
  CHECK(train_accuracy(wide, X, y) == 0.75);
}

TEST_CASE("cart leaves a pure node alone") {
  const FeatureMatrix X = {{1.0}, {5.0}, {9.0}};
  const LabelVector y = {1, 1, 1};
  const auto model = train_dtree(X, y);
  CHECK(model.tree().nodes.size() == 1);
  CHECK(model.tree().nodes[0].value == 1.0);
}

TEST_CASE("forest without randomness reduces to the single tree") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(15, 0.4, 5, X, y);

  RForestHyper hyper;
  hyper.n_trees = 3;
  hyper.bootstrap = false;
  hyper.feature_frac = 1.0;
  hyper.max_depth = 6;
  const auto forest = train_rforest(X, y, hyper);
  const auto tree = train_dtree(X, y, {.max_depth = 6, .min_leaf = 1});

  REQUIRE(forest.trees.size() == 3);
  for (const auto& t : forest.trees) {
    REQUIRE(t.nodes.size() == tree.tree().nodes.size());
    for (size_t i = 0; i < t.nodes.size(); ++i) {
      CHECK(t.nodes[i].feature == tree.tree().nodes[i].feature);
      CHECK(t.nodes[i].threshold == tree.tree().nodes[i].threshold);
      CHECK(t.nodes[i].value == tree.tree().nodes[i].value);
    }
  }
}

TEST_CASE("forest is deterministic in its seed and tracks bootstrap rows") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(20, 0.5, 6, X, y);

  RForestHyper hyper;
  hyper.n_trees = 12;
  hyper.seed = 77;
  const auto a = train_rforest(X, y, hyper);
  const auto b = train_rforest(X, y, hyper);
  hyper.seed = 78;
  const auto c = train_rforest(X, y, hyper);

  REQUIRE(a.bootstrap_indices.size() == 12);
  for (const auto& rows : a.bootstrap_indices) {
    CHECK(rows.size() == X.size());
    for (int r : rows) {
      CHECK(r >= 0);
      CHECK(r < static_cast<int>(X.size()));
    }
  }
  CHECK(a.bootstrap_indices == b.bootstrap_indices);
  CHECK(a.bootstrap_indices != c.bootstrap_indices);

  auto rng = make_rng(79, "test/models/forest-query");
  for (int q = 0; q < 10; ++q) {
    const FeatureVector x = {gaussian(rng), gaussian(rng)};
    CHECK(a.predict_proba(x).takeoff == b.predict_proba(x).takeoff);
  }
  CHECK(train_accuracy(a, X, y) >= 0.95);
}

TEST_CASE("forest out-of-bag accuracy stays near the single tree") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(30, 0.5, 9, X, y);

  RForestHyper hyper;
  hyper.n_trees = 60;
  hyper.max_depth = 6;
  hyper.seed = 3;
  const auto forest = train_rforest(X, y, hyper);

  // Score each row only with trees whose bootstrap sample missed it.
  int correct = 0, scored = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    double sum = 0.0;
    int n_oob = 0;
    for (size_t t = 0; t < forest.trees.size(); ++t) {
      const auto& rows = forest.bootstrap_indices[t];
      if (std::find(rows.begin(), rows.end(), static_cast<int>(i)) !=
          rows.end())
        continue;
      sum += forest.trees[t].evaluate(X[i]);
      ++n_oob;
    }
    if (n_oob == 0) continue;
    ++scored;
    if ((sum / n_oob > 0.5 ? 1 : 0) == y[i]) ++correct;
  }
  REQUIRE(scored > 20);  // with 60 trees nearly every row has oob votes

  const auto single = train_dtree(X, y, {.max_depth = 6, .min_leaf = 1});
  const double oob_acc = static_cast<double>(correct) / scored;
  CHECK(oob_acc >= train_accuracy(single, X, y) - 0.1);
}

TEST_CASE("gboost drives training loss down monotonically") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(25, 0.6, 7, X, y);

  GBoostHyper hyper;
  hyper.n_rounds = 40;
  const auto model = train_gboost(X, y, hyper);

  REQUIRE(model.train_loss_trace.size() == 41);  // prior + each round
  for (size_t i = 1; i < model.train_loss_trace.size(); ++i)
    CHECK(model.train_loss_trace[i] <= model.train_loss_trace[i - 1] + 1e-12);
  CHECK(model.train_loss_trace.back() < model.train_loss_trace.front());
  CHECK(train_accuracy(model, X, y) >= 0.98);
  CHECK(model.trees.size() == 40);
}

TEST_CASE("gboost prior equals the clamped log-odds of the base rate") {
  const FeatureMatrix X = {{0.0}, {1.0}, {2.0}, {3.0}};
  const LabelVector y = {1, 1, 1, 0};
  GBoostHyper hyper;
  hyper.n_rounds = 0;
  const auto model = train_gboost(X, y, hyper);
  CHECK(model.f0 == doctest::Approx(std::log(0.75 / 0.25)).epsilon(1e-12));
  CHECK(model.trees.empty());
  CHECK(model.predict_proba({9.0}).takeoff == doctest::Approx(0.75));
}

TEST_CASE("gboost survives a single-class training set") {
  const FeatureMatrix X = {{0.0}, {1.0}, {2.0}};
  const LabelVector y = {0, 0, 0};
  const auto model = train_gboost(X, y);
  const auto p = model.predict_proba({1.0});
  CHECK(std::isfinite(p.takeoff));
  CHECK(p.takeoff < 0.01);
}

TEST_CASE("soft_vote is permutation invariant and reduces for one member") {
  auto rng = make_rng(83, "test/models/vote");
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + static_cast<int>(uniform_index(rng, 6));
    std::vector<Proba> probas(k);
    for (auto& p : probas) {
      p.takeoff = uniform_unit(rng);
      p.landing = 1.0 - p.takeoff;
    }

    const auto [label, mean] = soft_vote(probas);

    std::vector<Proba> shuffled = probas;
    shuffle_inplace(shuffled, rng);
    const auto [label2, mean2] = soft_vote(shuffled);
    CHECK(label == label2);
    CHECK(mean.takeoff == doctest::Approx(mean2.takeoff).epsilon(1e-12));

    // argmax over sums equals argmax over means.
    double sum_takeoff = 0.0, sum_landing = 0.0;
    for (const auto& p : probas) {
      sum_takeoff += p.takeoff;
      sum_landing += p.landing;
    }
    const Label by_sum =
        sum_takeoff > sum_landing ? Label::Takeoff : Label::Landing;
    CHECK(label == by_sum);
    CHECK(mean.takeoff ==
          doctest::Approx(sum_takeoff / k).epsilon(1e-12));

    if (k == 1) {
      const Label alone = probas[0].takeoff > probas[0].landing
                              ? Label::Takeoff
                              : Label::Landing;
      CHECK(label == alone);
    }
  }
}

TEST_CASE("soft_vote ties go to Landing and empty votes throw") {
  std::vector<Proba> tied(3);
  for (auto& p : tied) p = {0.5, 0.5};
  CHECK(soft_vote(tied).first == Label::Landing);
  CHECK_THROWS_AS(soft_vote({}), EmptyEnsemble);
}

TEST_CASE("ensemble trains five members and averages their votes") {
  FeatureMatrix X;
  LabelVector y;
  make_blobs(20, 0.3, 8, X, y);

  const auto model = train_ensemble(X, y, 42);
  REQUIRE(model.members.size() == 5);
  CHECK(model.members[0]->kind() == ModelKind::LogReg);
  CHECK(model.members[1]->kind() == ModelKind::Svm);
  CHECK(model.members[2]->kind() == ModelKind::RForest);
  CHECK(model.members[3]->kind() == ModelKind::GBoost);
  CHECK(model.members[4]->kind() == ModelKind::Knn);

  const FeatureVector q = {0.8, 1.2};
  double mean = 0.0;
  for (const auto& member : model.members)
    mean += member->predict_proba(q).takeoff;
  mean /= 5.0;
  CHECK(model.predict_proba(q).takeoff == doctest::Approx(mean).epsilon(1e-12));
  CHECK(train_accuracy(model, X, y) == 1.0);
}

TEST_CASE("model kind names round-trip through parse") {
  for (auto kind : {ModelKind::LogReg, ModelKind::Svm, ModelKind::Knn,
                    ModelKind::DTree, ModelKind::RForest, ModelKind::GBoost,
                    ModelKind::Ensemble, ModelKind::Cnn}) {
    const auto parsed = parse_model_kind(to_string(kind));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == kind);
  }
  CHECK_FALSE(parse_model_kind("perceptron").has_value());
}
