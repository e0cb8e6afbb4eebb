#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "boosting.hpp"

namespace vgkit {

struct Prediction {
  std::string dialogue_id;
  int true_label = 0;
  double score = 0.0;
  int predicted_label = 0;
  int fold = 0;
  int round = 0;
};

// Stratified assignment: per-class seeded shuffle, then round-robin with the
// class start offset advanced by the preceding class sizes so no fold is left
// empty while k <= n. Within each class, fold sizes differ by at most one.
std::vector<int> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

struct LabeledDataset {
  std::vector<std::string> ids;
  std::vector<Instance> instances;

  size_t size() const { return instances.size(); }
};

// A trainer fits a scoring function on a training split.
struct Trainer {
  std::string name;
  std::function<std::function<double(std::span<const double>)>(std::span<const Instance>)> fit;
};

Trainer make_adaboost_trainer(int rounds = kDefaultBoostingRounds);
Trainer make_logistic_trainer(double l2 = 1e-4);

// k-fold cross-validation; every instance is predicted exactly once by a
// model that never saw it. Trainer errors propagate annotated with the fold.
std::vector<Prediction> cross_validate(const LabeledDataset& dataset, const Trainer& trainer,
                                       int k, std::uint64_t seed, int round_tag = 0);

// Leave-one-out; fold ids are instance indices.
std::vector<Prediction> loocv(const LabeledDataset& dataset, const Trainer& trainer);

double overall_accuracy(std::span<const Prediction> preds);

// One class perspective. Micro metrics come from confusion counts pooled over
// all predictions; per-class micro accuracy over that class's instances
// coincides with micro recall and is reported under both names. Macro metrics
// are unweighted means over folds; folds where a metric is undefined are
// excluded from that mean and counted.
struct ClassMetrics {
  long tp = 0, fp = 0, tn = 0, fn = 0;
  double accuracy_mu = 0.0;
  double precision_mu = 0.0;
  double recall_mu = 0.0;
  double f1_mu = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
  double f1_macro = 0.0;
  int excluded_precision_folds = 0;
  int excluded_recall_folds = 0;
  int excluded_f1_folds = 0;
};

struct MetricsReport {
  ClassMetrics ad;     // positive class = +1
  ClassMetrics nonad;  // positive class = -1
  double overall_accuracy = 0.0;
  long n = 0;
};

MetricsReport compute_metrics(std::span<const Prediction> preds);

// Metrics for one perspective only (used by compute_metrics and tests).
ClassMetrics class_metrics(std::span<const Prediction> preds, int positive_label);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // starts at (0,0), ends at (1,1)
  double auc = 0.5;
  bool degenerate = false;  // all scores identical
  long n_pooled = 0;        // predictions behind the sweep
};

// Threshold sweep over the distinct scores, descending; positive when
// score >= threshold. Trapezoidal AUC.
RocCurve roc_from_predictions(std::span<const Prediction> preds);

// Pools predictions over `rounds` cross-validation runs seeded seed+r.
RocCurve roc_smoothed(const LabeledDataset& dataset, const Trainer& trainer, int rounds, int k,
                      std::uint64_t seed);

std::string roc_to_csv(const RocCurve& curve);

// Regularised incomplete beta function I_x(a, b), |error| < 1e-10.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct CorrelationTest {
  double r = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Pearson correlation with the t test; |r| = 1 gives an infinite t sentinel
// with p = 0. Zero variance in either input is an error.
CorrelationTest pearson_test(std::span<const double> x, std::span<const double> y);

struct WelchTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
};

// Welch two-sample t test with sample variances and Welch-Satterthwaite df.
WelchTest welch_ttest(std::span<const double> a, std::span<const double> b);

}  // namespace vgkit
