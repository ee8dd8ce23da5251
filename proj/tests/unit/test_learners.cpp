#include <gtest/gtest.h>

#include <cmath>

#include "opentrend/learners.hpp"
#include "support/test_support.hpp"

namespace opentrend {
namespace {

using testing::make_blobs;
using testing::matrix_from;

double train_accuracy(const TrainedModel& m, const FeatureMatrix& x, std::span<const Label> y) {
  const auto pred = m.predict(x);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += pred[i] == y[i];
  return static_cast<double>(hits) / static_cast<double>(y.size());
}

// Every family, with forest and network sizes kept small enough for unit tests.
std::vector<ClassifierSpec> quick_specs() {
  return {preset("dt"),
          preset("gnb"),
          preset("knn"),
          preset("logreg"),
          preset("xgb"),
          make_spec(Family::MLP, {{"hidden_layers", std::string("16,8")}, {"max_epochs", 200.0}}),
          make_spec(Family::GradientBoostedTrees, {{"iterations", 50.0}, {"learning_rate", 0.1}}),
          make_spec(Family::ExtraTrees, {{"n_estimators", 25.0}, {"criterion", std::string("entropy")}})};
}

TEST(Presets, StudySettings) {
  EXPECT_EQ(preset("knn").integer("k"), 5);
  const auto cb = preset("catboost");
  EXPECT_EQ(cb.family, Family::GradientBoostedTrees);
  EXPECT_EQ(cb.hyperparams.size(), 2u);
  EXPECT_EQ(cb.integer("iterations"), 1000);
  EXPECT_DOUBLE_EQ(cb.number("learning_rate"), 0.1);
  EXPECT_EQ(cb.name, "catboost*");
  const auto xgb = preset("xgb");
  EXPECT_EQ(xgb.integer("iterations"), 100);
  EXPECT_EQ(xgb.integer("max_depth"), 6);
  EXPECT_DOUBLE_EQ(xgb.number("learning_rate"), 0.3);
  EXPECT_EQ(xgb.name, "xgb*");
  const auto dt = preset("dt");
  EXPECT_EQ(dt.integer("max_depth"), 10);
  EXPECT_EQ(dt.integer("max_features"), 5);
  EXPECT_EQ(dt.text("criterion"), "gini");
  EXPECT_FALSE(dt.standardize);
  const auto et = preset("extratrees");
  EXPECT_EQ(et.integer("n_estimators"), 1000);
  EXPECT_EQ(et.text("criterion"), "entropy");
  const auto mlp = preset("mlp");
  EXPECT_EQ(parse_layer_widths(mlp.text("hidden_layers")).size(), 8u);
  EXPECT_EQ(mlp.text("activation"), "relu");
  EXPECT_EQ(mlp.integer("max_epochs"), 1000);
  EXPECT_TRUE(mlp.standardize);
  EXPECT_TRUE(preset("logreg").standardize);
  EXPECT_TRUE(preset("knn").standardize);
  EXPECT_FALSE(preset("gnb").standardize);
  EXPECT_DOUBLE_EQ(preset("logreg").number("C"), 1.0);
  EXPECT_THROW(preset("unknown"), std::invalid_argument);
  EXPECT_EQ(preset_names().size(), 8u);
}

TEST(Presets, HyperparameterValidation) {
  EXPECT_THROW(make_spec(Family::KNearest, {{"k", 0.0}}), std::invalid_argument);
  EXPECT_THROW(make_spec(Family::KNearest, {{"k", 2.5}}), std::invalid_argument);
  EXPECT_THROW(make_spec(Family::KNearest, {{"neighbours", 3.0}}), std::invalid_argument);
  EXPECT_THROW(make_spec(Family::DecisionTree, {{"criterion", std::string("mse")}}),
               std::invalid_argument);
  EXPECT_THROW(make_spec(Family::MLP, {{"hidden_layers", std::string("8,,4")}}),
               std::invalid_argument);
  EXPECT_THROW(make_spec(Family::LogisticRegression, {{"C", 0.0}}), std::invalid_argument);
  EXPECT_EQ(parse_family("ExtraTrees"), Family::ExtraTrees);
  EXPECT_THROW(parse_family("SVM"), std::invalid_argument);
}

TEST(Fit, EveryFamilySeparatesBlobs) {
  const auto blobs = make_blobs(61, 200);
  const auto x = matrix_from(blobs.x, 2);
  for (const auto& spec : quick_specs()) {
    const auto model = fit(spec, x, blobs.y);
    EXPECT_GE(train_accuracy(model, x, blobs.y), 0.95) << spec.name;
  }
}

TEST(Fit, SingleClassGivesConstantModel) {
  const auto blobs = make_blobs(62, 40);
  const auto x = matrix_from(blobs.x, 2);
  for (Label cls : {Label{0}, Label{1}}) {
    const std::vector<Label> y(40, cls);
    for (const auto& spec : quick_specs()) {
      const auto model = fit(spec, x, y);
      EXPECT_TRUE(model.is_constant());
      EXPECT_EQ(train_accuracy(model, x, y), 1.0) << spec.name;
    }
  }
}

TEST(Fit, KnnWithKEqualToDataSize) {
  const auto x = matrix_from({0, 1, 2, 3, 10}, 1);
  const std::vector<Label> y{1, 1, 1, 0, 0};
  const auto model = fit(preset("knn"), x, y);
  for (Label p : model.predict(x)) EXPECT_EQ(p, 1);
}

TEST(Predict, ZeroLogisticModelScoresHalf) {
  const LogisticRegression zero({0.0, 0.0}, 0.0);
  const std::vector<double> row{3.0, -2.0};
  EXPECT_EQ(zero.score(row), 0.5);
  EXPECT_EQ(threshold_label(zero.score(row)), 1);
  EXPECT_EQ(threshold_label(0.4999999), 0);
}

TEST(Predict, DegenerateTreeAndEmptyBoosting) {
  const auto blobs = make_blobs(63, 21);  // 11 ones, 10 zeros
  const auto x = matrix_from(blobs.x, 2);
  const auto stump = fit(make_spec(Family::DecisionTree, {{"max_depth", 0.0}}), x, blobs.y);
  for (Label p : stump.predict(x)) EXPECT_EQ(p, 1);
  const auto empty = fit(make_spec(Family::GradientBoostedTrees, {{"iterations", 0.0}}), x, blobs.y);
  for (Label p : empty.predict(x)) EXPECT_EQ(p, 1);

  std::vector<Label> flipped(blobs.y);
  for (auto& v : flipped) v ^= 1;
  const auto stump0 = fit(make_spec(Family::DecisionTree, {{"max_depth", 0.0}}), x, flipped);
  for (Label p : stump0.predict(x)) EXPECT_EQ(p, 0);
  const auto empty0 = fit(make_spec(Family::GradientBoostedTrees, {{"iterations", 0.0}}), x, flipped);
  for (Label p : empty0.predict(x)) EXPECT_EQ(p, 0);
}

TEST(Fit, Errors) {
  const auto x = matrix_from({1, 2, 3, 4}, 2);
  EXPECT_THROW(fit(preset("dt"), x.slice(0, 1), std::vector<Label>{1}), std::invalid_argument);
  EXPECT_THROW(fit(preset("dt"), x, std::vector<Label>{1}), std::invalid_argument);
  EXPECT_THROW(fit(preset("dt"), matrix_from({1, NAN, 3, 4}, 2), std::vector<Label>{0, 1}),
               std::invalid_argument);
  ClassifierSpec bad = preset("knn");
  bad.hyperparams["k"] = -4.0;
  EXPECT_THROW(fit(bad, x, std::vector<Label>{0, 1}), std::invalid_argument);
}

TEST(Predict, ColumnAndFinitenessChecks) {
  const auto blobs = make_blobs(64, 30);
  const auto model = fit(preset("gnb"), matrix_from(blobs.x, 2), blobs.y);
  EXPECT_THROW(model.predict(matrix_from(blobs.x, 2, {"a", "b"})), std::invalid_argument);
  EXPECT_THROW(model.predict(matrix_from({1, 2, 3}, 3)), std::invalid_argument);
  EXPECT_THROW(model.predict(matrix_from({1, INFINITY}, 2)), std::invalid_argument);
}

TEST(Fit, DeterministicGivenSeed) {
  Rng rng(65);
  std::vector<double> v;
  std::vector<Label> y;
  for (int i = 0; i < 150; ++i) {
    const double a = rng.normal(), b = rng.normal(), c = rng.normal();
    v.insert(v.end(), {a, b, c});
    y.push_back(a + 0.5 * b * c + 0.3 * rng.normal() > 0 ? 1 : 0);
  }
  const auto x = matrix_from(v, 3);
  for (auto spec : quick_specs()) {
    spec.seed = 1234;
    const auto s1 = fit(spec, x, y).scores(x);
    const auto s2 = fit(spec, x, y).scores(x);
    EXPECT_EQ(s1, s2) << spec.name;
  }
}

TEST(Standardizer, ZeroMeanUnitVariance) {
  Rng rng(66);
  std::vector<double> v;
  for (int i = 0; i < 200; ++i) v.insert(v.end(), {1000 + 50 * rng.normal(), 0.01 * rng.normal(), 7.0});
  const auto x = matrix_from(v, 3);
  const auto st = Standardizer::fit(x.view());
  EXPECT_EQ(st.scale()[2], 1.0);
  const auto z = st.transform(x.view());
  for (std::size_t j = 0; j < 2; ++j) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < 200; ++i) mean += z[i * 3 + j];
    mean /= 200.0;
    for (std::size_t i = 0; i < 200; ++i) ss += (z[i * 3 + j] - mean) * (z[i * 3 + j] - mean);
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_NEAR(std::sqrt(ss / 200.0), 1.0, 1e-9);
  }
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(z[i * 3 + 2], 0.0);
}

TEST(Trees, InvariantUnderMonotoneColumnTransforms) {
  Rng rng(67);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> v, w;
    std::vector<Label> y;
    for (int i = 0; i < 160; ++i) {
      const double a = rng.normal(), b = rng.normal(), c = rng.normal();
      v.insert(v.end(), {a, b, c});
      w.insert(w.end(), {std::exp(a), 3.0 * b - 7.0, c * c * c + c});
      y.push_back(a - b + 0.5 * rng.normal() > 0 ? 1 : 0);
    }
    const auto x = matrix_from(v, 3);
    const auto xt = matrix_from(w, 3);
    for (const char* name : {"dt", "xgb"}) {
      ClassifierSpec spec = preset(name);
      spec.seed = static_cast<std::uint64_t>(trial);
      EXPECT_EQ(fit(spec, x, y).predict(x), fit(spec, xt, y).predict(xt)) << name;
    }
    ClassifierSpec deep = make_spec(Family::DecisionTree, {{"criterion", std::string("entropy")}});
    EXPECT_EQ(fit(deep, x, y).predict(x), fit(deep, xt, y).predict(xt));
  }
}

TEST(Trees, MaxFeaturesClampsAndTieBreaks) {
  // Two identical columns: the split must use the lower index.
  const auto x = matrix_from({0, 0, 1, 1, 2, 2, 3, 3}, 2);
  const std::vector<Label> y{0, 0, 1, 1};
  const auto model = fit(make_spec(Family::DecisionTree, {{"max_features", 5.0}}), x, y);
  const auto& tree = dynamic_cast<const DecisionTreeClassifier&>(model.classifier()).tree();
  ASSERT_FALSE(tree.nodes.empty());
  EXPECT_EQ(tree.nodes[0].feature, 0);
  EXPECT_EQ(tree.nodes[0].threshold, 1.0);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  Rng rng(68);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 5 + rng.below(20), d = 1 + rng.below(4);
    std::vector<double> v(n * d);
    std::vector<Label> y(n);
    for (auto& e : v) e = rng.normal();
    for (auto& l : y) l = rng.coin(0.5) ? 1 : 0;
    const MatrixView x{v, n, d};
    std::vector<double> theta(d + 1);
    for (auto& t : theta) t = rng.normal();
    const double c = 0.1 + 3.0 * rng.uniform();
    std::vector<double> grad(d + 1);
    logistic_objective(theta, x, y, c, grad);
    for (std::size_t j = 0; j <= d; ++j) {
      const double h = 1e-5;
      auto plus = theta, minus = theta;
      plus[j] += h;
      minus[j] -= h;
      const double fd = (logistic_objective(plus, x, y, c, {}) - logistic_objective(minus, x, y, c, {})) / (2 * h);
      EXPECT_LE(std::abs(fd - grad[j]), 1e-5 * std::max(1.0, std::abs(grad[j]))) << j;
    }
  }
}

TEST(Logistic, ConvergedGradientBelowTolerance) {
  const auto blobs = make_blobs(69, 120, 1.5);
  const MatrixView x{blobs.x, 120, 2};
  const LogisticParams params;
  const auto model = LogisticRegression::fit(x, blobs.y, params);
  std::vector<double> theta = model.weights();
  theta.push_back(model.bias());
  std::vector<double> grad(3);
  logistic_objective(theta, x, blobs.y, params.c, grad);
  double norm = 0.0;
  for (double g : grad) norm += g * g;
  EXPECT_LT(std::sqrt(norm), params.tol);
  EXPECT_LT(model.gradient_norm(), params.tol);
}

TEST(Logistic, NonConvergenceReportsIterations) {
  const auto blobs = make_blobs(70, 60, 1.0);
  const MatrixView x{blobs.x, 60, 2};
  LogisticParams params;
  params.max_iter = 1;
  params.tol = 1e-300;
  try {
    LogisticRegression::fit(x, blobs.y, params);
    FAIL() << "expected FitError";
  } catch (const FitError& e) {
    EXPECT_NE(std::string(e.what()).find("1 iterations"), std::string::npos) << e.what();
  }
}

TEST(Mlp, BackpropMatchesFiniteDifferences) {
  Rng rng(71);
  const std::vector<int> hidden{8};
  for (int trial = 0; trial < 5; ++trial) {
    Mlp net = Mlp::initialize(2, hidden, rng);
    const std::size_t n = 12;
    std::vector<double> v(n * 2);
    std::vector<Label> y(n);
    for (auto& e : v) e = rng.normal();
    for (auto& l : y) l = rng.coin(0.5) ? 1 : 0;
    const MatrixView x{v, n, 2};
    const double alpha = 0.01;
    std::vector<double> grad;
    net.loss_and_gradient(x, y, alpha, &grad);
    const auto base = net.flatten();
    ASSERT_EQ(grad.size(), base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
      const double h = 1e-6;
      auto p = base, m = base;
      p[k] += h;
      m[k] -= h;
      net.assign(p);
      const double fp = net.loss_and_gradient(x, y, alpha, nullptr);
      net.assign(m);
      const double fm = net.loss_and_gradient(x, y, alpha, nullptr);
      net.assign(base);
      const double fd = (fp - fm) / (2 * h);
      // Kinks of ReLU can sit inside the difference interval; skip those.
      if (std::abs(fd - grad[k]) > 1e-4 * std::max(1e-3, std::abs(grad[k]))) {
        auto p2 = base, m2 = base;
        p2[k] += h / 100;
        m2[k] -= h / 100;
        net.assign(p2);
        const double fp2 = net.loss_and_gradient(x, y, alpha, nullptr);
        net.assign(m2);
        const double fm2 = net.loss_and_gradient(x, y, alpha, nullptr);
        net.assign(base);
        const double fd2 = (fp2 - fm2) / (2 * h / 100);
        EXPECT_LE(std::abs(fd2 - grad[k]), 1e-4 * std::max(1e-3, std::abs(grad[k])))
            << "param " << k << " fd " << fd << " analytic " << grad[k];
      }
    }
  }
}

TEST(Mlp, DivergenceIsReported) {
  const auto blobs = make_blobs(72, 64, 4.0);
  MlpParams params;
  params.hidden = {8};
  params.learning_rate = 1e6;
  params.momentum = 0.99;
  params.max_epochs = 200;
  std::vector<double> big(blobs.x);
  for (auto& v : big) v *= 1e150;
  EXPECT_THROW(Mlp::fit(MatrixView{big, 64, 2}, blobs.y, params), FitError);
}

TEST(NaiveBayes, NearBayesRateOnItsOwnModel) {
  Rng rng(73);
  const double mu[2][3] = {{0.0, 1.0, -1.0}, {1.0, 0.2, -0.5}};
  const double sd[2][3] = {{1.0, 0.8, 1.5}, {1.2, 0.7, 1.0}};
  const auto sample = [&](std::size_t n, std::vector<double>& v, std::vector<Label>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      const int c = rng.coin(0.4) ? 1 : 0;
      for (int j = 0; j < 3; ++j) v.push_back(mu[c][j] + sd[c][j] * rng.normal());
      y.push_back(static_cast<Label>(c));
    }
  };
  std::vector<double> xtr, xte;
  std::vector<Label> ytr, yte;
  sample(10000, xtr, ytr);
  sample(10000, xte, yte);
  const auto model = fit(preset("gnb"), matrix_from(xtr, 3), ytr);
  const auto pred = model.predict(matrix_from(xte, 3));

  // Bayes-optimal rule with the true parameters.
  const auto log_density = [&](int c, const double* row) {
    double s = std::log(c == 1 ? 0.4 : 0.6);
    for (int j = 0; j < 3; ++j) {
      const double z = (row[j] - mu[c][j]) / sd[c][j];
      s += -0.5 * z * z - std::log(sd[c][j]);
    }
    return s;
  };
  std::size_t model_hits = 0, bayes_hits = 0;
  for (std::size_t i = 0; i < yte.size(); ++i) {
    const double* row = &xte[i * 3];
    const Label bayes = log_density(1, row) >= log_density(0, row) ? 1 : 0;
    bayes_hits += bayes == yte[i];
    model_hits += pred[i] == yte[i];
  }
  const double bayes_acc = static_cast<double>(bayes_hits) / yte.size();
  const double model_acc = static_cast<double>(model_hits) / yte.size();
  EXPECT_GT(model_acc, bayes_acc - 0.05);
}

TEST(Serialization, RoundTripEveryFamily) {
  const auto blobs = make_blobs(74, 80, 2.0);
  const auto x = matrix_from(blobs.x, 2);
  for (auto spec : quick_specs()) {
    spec.seed = 9;
    const auto model = fit(spec, x, blobs.y);
    const auto blob = model.to_json();
    EXPECT_EQ(blob.at("format"), "opentrend-model");
    EXPECT_EQ(blob.at("version"), kModelFormatVersion);
    const auto back = TrainedModel::from_json(nlohmann::json::parse(blob.dump()));
    EXPECT_EQ(back.scores(x), model.scores(x)) << spec.name;
    EXPECT_EQ(back.spec().name, spec.name);
    EXPECT_EQ(back.feature_names(), model.feature_names());
  }
  const auto constant = fit(preset("dt"), x, std::vector<Label>(80, 1));
  EXPECT_EQ(TrainedModel::from_json(constant.to_json()).predict(x), std::vector<Label>(80, 1));

  auto blob = fit(preset("gnb"), x, blobs.y).to_json();
  blob["version"] = kModelFormatVersion + 1;
  EXPECT_THROW(TrainedModel::from_json(blob), std::invalid_argument);
  blob["format"] = "something-else";
  EXPECT_THROW(TrainedModel::from_json(blob), std::invalid_argument);
}

TEST(Spec, JsonRoundTrip) {
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    const auto back = spec_from_json(spec_to_json(spec));
    EXPECT_EQ(back.family, spec.family);
    EXPECT_EQ(back.hyperparams, spec.hyperparams);
    EXPECT_EQ(back.name, spec.name);
    EXPECT_EQ(back.standardize, spec.standardize);
  }
}

}  // namespace
}  // namespace opentrend
