#include "evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "error.hpp"
#include "rng.hpp"
#include "util.hpp"

namespace vgkit {

std::vector<int> stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
  const size_t n = labels.size();
  if (k < 2) fail(Status::ValidationError, "k must be at least 2");
  if (static_cast<size_t>(k) > n)
    fail(Status::ValidationError,
         "k=" + std::to_string(k) + " exceeds the " + std::to_string(n) + " instances");

  std::vector<size_t> pos_idx, neg_idx;
  for (size_t i = 0; i < n; ++i) (labels[i] > 0 ? pos_idx : neg_idx).push_back(i);

  Rng rng(seed);
  std::vector<int> fold(n, -1);
  int start = 0;
  for (std::vector<size_t>* cls : {&pos_idx, &neg_idx}) {
    rng.shuffle(*cls);
    for (size_t j = 0; j < cls->size(); ++j)
      fold[(*cls)[j]] = static_cast<int>((start + j) % static_cast<size_t>(k));
    start = static_cast<int>((start + cls->size()) % static_cast<size_t>(k));
  }
  return fold;
}

Trainer make_adaboost_trainer(int rounds) {
  Trainer t;
  t.name = "real_adaboost";
  t.fit = [rounds](std::span<const Instance> train) {
    Ensemble e = train_real_adaboost(train, rounds);
    return [e](std::span<const double> x) { return predict_score(e, x); };
  };
  return t;
}

Trainer make_logistic_trainer(double l2) {
  Trainer t;
  t.name = "logistic_regression";
  t.fit = [l2](std::span<const Instance> train) {
    LinearModel m = train_logistic_baseline(train, l2);
    return [m](std::span<const double> x) { return linear_score(m, x); };
  };
  return t;
}

namespace {

std::vector<Prediction> run_folds(const LabeledDataset& dataset, const Trainer& trainer,
                                  const std::vector<int>& fold_of, int n_folds, int round_tag) {
  const size_t n = dataset.size();
  std::vector<Prediction> preds(n);
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Instance> train;
    train.reserve(n);
    for (size_t i = 0; i < n; ++i)
      if (fold_of[i] != f) train.push_back(dataset.instances[i]);

    std::function<double(std::span<const double>)> scorer;
    try {
      scorer = trainer.fit(train);
    } catch (const Error& err) {
      fail(err.status(), std::string(err.what()) + " (fold " + std::to_string(f) + ")");
    }
    for (size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) continue;
      Prediction& p = preds[i];
      p.dialogue_id = dataset.ids[i];
      p.true_label = dataset.instances[i].label;
      p.score = scorer(dataset.instances[i].features);
      p.predicted_label = predict_label(p.score);
      p.fold = f;
      p.round = round_tag;
    }
  }
  return preds;
}

}  // namespace

std::vector<Prediction> cross_validate(const LabeledDataset& dataset, const Trainer& trainer,
                                       int k, std::uint64_t seed, int round_tag) {
  if (dataset.ids.size() != dataset.instances.size())
    fail(Status::InvalidArgument, "dataset ids and instances differ in length");
  std::vector<int> labels;
  labels.reserve(dataset.size());
  for (const Instance& inst : dataset.instances) labels.push_back(inst.label);
  std::vector<int> fold_of = stratified_kfold(labels, k, seed);
  return run_folds(dataset, trainer, fold_of, k, round_tag);
}

std::vector<Prediction> loocv(const LabeledDataset& dataset, const Trainer& trainer) {
  const size_t n = dataset.size();
  if (n < 2) fail(Status::ValidationError, "leave-one-out needs at least two instances");
  std::vector<int> fold_of(n);
  for (size_t i = 0; i < n; ++i) fold_of[i] = static_cast<int>(i);
  return run_folds(dataset, trainer, fold_of, static_cast<int>(n), 0);
}

double overall_accuracy(std::span<const Prediction> preds) {
  if (preds.empty()) fail(Status::InsufficientData, "no predictions");
  long correct = 0;
  for (const Prediction& p : preds) correct += p.predicted_label == p.true_label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

ClassMetrics class_metrics(std::span<const Prediction> preds, int positive_label) {
  if (preds.empty()) fail(Status::InsufficientData, "no predictions");
  ClassMetrics m;
  std::map<int, std::array<long, 3>> per_fold;  // fold -> {tp, fp, fn}
  for (const Prediction& p : preds) {
    const bool actual_pos = p.true_label == positive_label;
    const bool pred_pos = p.predicted_label == positive_label;
    auto& counts = per_fold[p.fold];
    if (actual_pos && pred_pos) {
      ++m.tp;
      ++counts[0];
    } else if (!actual_pos && pred_pos) {
      ++m.fp;
      ++counts[1];
    } else if (actual_pos && !pred_pos) {
      ++m.fn;
      ++counts[2];
    } else {
      ++m.tn;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.precision_mu = m.tp + m.fp > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : nan;
  m.recall_mu = m.tp + m.fn > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : nan;
  m.accuracy_mu = m.recall_mu;  // pooled per-class accuracy == recall
  m.f1_mu = (m.precision_mu + m.recall_mu > 0)
                ? 2.0 * m.precision_mu * m.recall_mu / (m.precision_mu + m.recall_mu)
                : nan;

  double p_sum = 0, r_sum = 0, f_sum = 0;
  int p_n = 0, r_n = 0, f_n = 0;
  for (const auto& [fold, c] : per_fold) {
    const long tp = c[0], fp = c[1], fn = c[2];
    const bool p_def = tp + fp > 0;
    const bool r_def = tp + fn > 0;
    double prec = 0, rec = 0;
    if (p_def) {
      prec = static_cast<double>(tp) / (tp + fp);
      p_sum += prec;
      ++p_n;
    } else {
      ++m.excluded_precision_folds;
    }
    if (r_def) {
      rec = static_cast<double>(tp) / (tp + fn);
      r_sum += rec;
      ++r_n;
    } else {
      ++m.excluded_recall_folds;
    }
    if (p_def && r_def && prec + rec > 0) {
      f_sum += 2.0 * prec * rec / (prec + rec);
      ++f_n;
    } else {
      ++m.excluded_f1_folds;
    }
  }
  m.precision_macro = p_n > 0 ? p_sum / p_n : nan;
  m.recall_macro = r_n > 0 ? r_sum / r_n : nan;
  m.f1_macro = f_n > 0 ? f_sum / f_n : nan;
  return m;
}

MetricsReport compute_metrics(std::span<const Prediction> preds) {
  MetricsReport r;
  r.ad = class_metrics(preds, +1);
  r.nonad = class_metrics(preds, -1);
  r.overall_accuracy = overall_accuracy(preds);
  r.n = static_cast<long>(preds.size());
  return r;
}

RocCurve roc_from_predictions(std::span<const Prediction> preds) {
  if (preds.empty()) fail(Status::InsufficientData, "no predictions for ROC");
  long n_pos = 0, n_neg = 0;
  for (const Prediction& p : preds) (p.true_label > 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    fail(Status::ValidationError, "ROC requires both classes among the true labels");

  std::set<double, std::greater<double>> thresholds;
  for (const Prediction& p : preds) thresholds.insert(p.score);

  RocCurve curve;
  curve.n_pooled = static_cast<long>(preds.size());
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  for (double thr : thresholds) {
    long tp = 0, fp = 0;
    for (const Prediction& p : preds) {
      if (p.score >= thr) (p.true_label > 0 ? tp : fp) += 1;
    }
    curve.points.push_back({thr, static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos});
  }
  curve.degenerate = thresholds.size() == 1;

  double auc = 0.0;
  for (size_t i = 1; i < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i - 1];
    const RocPoint& b = curve.points[i];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

RocCurve roc_smoothed(const LabeledDataset& dataset, const Trainer& trainer, int rounds, int k,
                      std::uint64_t seed) {
  if (rounds < 1) fail(Status::InvalidArgument, "rounds must be >= 1");
  std::vector<Prediction> pooled;
  pooled.reserve(dataset.size() * static_cast<size_t>(rounds));
  for (int r = 0; r < rounds; ++r) {
    std::vector<Prediction> preds =
        cross_validate(dataset, trainer, k, seed + static_cast<std::uint64_t>(r), r);
    pooled.insert(pooled.end(), preds.begin(), preds.end());
  }
  return roc_from_predictions(pooled);
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const RocPoint& p : curve.points) {
    out += format_double(p.threshold);
    out += ',';
    out += format_double(p.fpr);
    out += ',';
    out += format_double(p.tpr);
    out += '\n';
  }
  out += "# auc = " + format_double(curve.auc) + "\n";
  if (curve.degenerate) out += "# warning: all scores identical, two-point curve\n";
  return out;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) fail(Status::InvalidArgument, "incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) fail(Status::InvalidArgument, "degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  const double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

CorrelationTest pearson_test(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(Status::InvalidArgument, "input lengths differ");
  const size_t n = x.size();
  if (n < 3) fail(Status::ValidationError, "need at least three pairs");

  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0)
    fail(Status::ValidationError, "correlation undefined: an input has zero variance");

  CorrelationTest res;
  res.r = sxy / std::sqrt(sxx * syy);
  res.df = static_cast<double>(n - 2);
  const double r2 = res.r * res.r;
  if (r2 >= 1.0) {
    res.t = std::copysign(std::numeric_limits<double>::infinity(), res.r);
    res.p = 0.0;
  } else {
    res.t = res.r * std::sqrt(res.df) / std::sqrt(1.0 - r2);
    res.p = student_t_two_sided_p(res.t, res.df);
  }
  return res;
}

WelchTest welch_ttest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    fail(Status::ValidationError, "each group needs at least two values");
  auto mean_var = [](std::span<const double> v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);  // sample variance
    return std::pair<double, double>(m, s2);
  };
  const auto [ma, va] = mean_var(a);
  const auto [mb, vb] = mean_var(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = va / na;
  const double sb = vb / nb;
  const double se2 = sa + sb;
  WelchTest res;
  if (se2 <= 0) {
    // Identical constant groups: no evidence of a difference.
    res.t = 0.0;
    res.df = na + nb - 2.0;
    res.p = 1.0;
    return res;
  }
  res.t = (ma - mb) / std::sqrt(se2);
  res.df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  res.p = student_t_two_sided_p(res.t, res.df);
  return res;
}

}  // namespace vgkit
