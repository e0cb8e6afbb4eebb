#include "boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace vgkit {

namespace {

// Half-log-odds of a side with positive/negative weight mass wp/wn, with the
// class probability clipped to [eps, 1-eps]. Written as a difference of logs
// of clipped masses so that swapping the labels negates the score exactly.
double side_score(double wp, double wn) {
  const double w = wp + wn;
  if (w <= 0) return 0.0;
  const double lo = kProbabilityClipEpsilon * w;
  const double hi = (1.0 - kProbabilityClipEpsilon) * w;
  const double cp = std::clamp(wp, lo, hi);
  const double cn = std::clamp(wn, lo, hi);
  return 0.5 * (std::log(cp) - std::log(cn));
}

double split_loss(double wp_l, double wn_l, double wp_r, double wn_r) {
  // Grouped per side: addition commutes exactly, so swapping the labels
  // leaves every computed loss bit-identical.
  const double s_l = side_score(wp_l, wn_l);
  const double s_r = side_score(wp_r, wn_r);
  const double left = wp_l * std::exp(-s_l) + wn_l * std::exp(s_l);
  const double right = wp_r * std::exp(-s_r) + wn_r * std::exp(s_r);
  return left + right;
}

}  // namespace

Stump fit_stump(std::span<const Instance> data, std::span<const double> weights) {
  if (data.empty()) fail(Status::InsufficientData, "fit_stump on empty data");
  if (weights.size() != data.size())
    fail(Status::InvalidArgument, "weights length does not match data");
  const size_t n = data.size();
  const size_t d = data[0].features.size();
  for (const Instance& inst : data) {
    if (inst.features.size() != d)
      fail(Status::ValidationError, "instances have inconsistent feature lengths");
    if (inst.label != 1 && inst.label != -1)
      fail(Status::ValidationError, "labels must be +1 or -1");
  }

  double total_pos = 0.0, total_neg = 0.0;
  for (size_t i = 0; i < n; ++i)
    (data[i].label > 0 ? total_pos : total_neg) += weights[i];
  if (total_pos <= 0 || total_neg <= 0)
    fail(Status::TrainingError, "degenerate stump: all weight on a single class");

  const double neg_inf = -std::numeric_limits<double>::infinity();
  Stump best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<size_t> order(n);

  for (size_t f = 0; f < d; ++f) {
    std::iota(order.begin(), order.end(), static_cast<size_t>(0));
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return data[a].features[f] < data[b].features[f];
    });

    // The -infinity guard: empty left side, everything right.
    double wp_l = 0.0, wn_l = 0.0;
    double loss = split_loss(0.0, 0.0, total_pos, total_neg);
    if (loss < best_loss) {
      best_loss = loss;
      best.feature_index = static_cast<int>(f);
      best.threshold = neg_inf;
      best.score_left = 0.0;
      best.score_right = side_score(total_pos, total_neg);
    }

    // Sweep midpoints of consecutive distinct values.
    for (size_t k = 0; k < n; ++k) {
      const size_t i = order[k];
      (data[i].label > 0 ? wp_l : wn_l) += weights[i];
      if (k + 1 == n) break;
      const double v = data[i].features[f];
      const double v_next = data[order[k + 1]].features[f];
      if (v_next <= v) continue;  // duplicate value, no midpoint here
      const double threshold = 0.5 * (v + v_next);
      loss = split_loss(wp_l, wn_l, total_pos - wp_l, total_neg - wn_l);
      if (loss < best_loss) {
        best_loss = loss;
        best.feature_index = static_cast<int>(f);
        best.threshold = threshold;
        best.score_left = side_score(wp_l, wn_l);
        best.score_right = side_score(total_pos - wp_l, total_neg - wn_l);
      }
    }
  }
  return best;
}

Ensemble train_real_adaboost(std::span<const Instance> data, int rounds, TrainTrace* trace) {
  if (data.size() < 2) fail(Status::InsufficientData, "need at least two instances");
  if (rounds < 1) fail(Status::InvalidArgument, "rounds must be >= 1");

  const size_t n = data.size();
  Ensemble e;
  e.n_features = static_cast<int>(data[0].features.size());
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> ensemble_score(n, 0.0);

  for (int m = 0; m < rounds; ++m) {
    Stump stump;
    try {
      stump = fit_stump(data, w);
    } catch (const Error& err) {
      if (err.status() == Status::TrainingError && m > 0) break;  // early stop
      throw;
    }

    double weighted_error = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (predict_label(stump.score(data[i].features)) != data[i].label) weighted_error += w[i];
    }
    if (weighted_error >= 0.5) break;

    e.stumps.push_back(stump);
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double s = stump.score(data[i].features);
      ensemble_score[i] += s;
      w[i] *= std::exp(-static_cast<double>(data[i].label) * s);
      sum += w[i];
    }
    for (double& wi : w) wi /= sum;

    if (trace) {
      TrainTrace::Round r;
      r.stump = stump;
      r.weighted_error = weighted_error;
      r.weight_sum_after = std::accumulate(w.begin(), w.end(), 0.0);
      double loss = 0.0;
      for (size_t i = 0; i < n; ++i)
        loss += std::exp(-static_cast<double>(data[i].label) * ensemble_score[i]);
      r.exp_loss = loss;
      r.weights_after = w;
      trace->rounds.push_back(std::move(r));
    }
  }
  return e;
}

double predict_score(const Ensemble& e, std::span<const double> x) {
  int max_index = -1;
  for (const Stump& s : e.stumps) max_index = std::max(max_index, s.feature_index);
  if (static_cast<int>(x.size()) <= max_index ||
      (e.n_features > 0 && static_cast<int>(x.size()) != e.n_features))
    fail(Status::ValidationError, "feature vector length does not match the training schema");
  double total = 0.0;
  for (const Stump& s : e.stumps) total += s.score(x);
  return total;
}

std::string ensemble_to_json(const Ensemble& e) {
  nlohmann::ordered_json j;
  j["model"] = "real_adaboost";
  j["split_criterion"] = "exponential_loss";
  j["tie_break"] = "lowest_feature_index_then_lowest_threshold";
  j["probability_clip_epsilon"] = kProbabilityClipEpsilon;
  j["n_features"] = e.n_features;
  j["rounds"] = e.rounds();
  j["stumps"] = nlohmann::ordered_json::array();
  for (const Stump& s : e.stumps) {
    nlohmann::ordered_json js;
    js["feature_index"] = s.feature_index;
    js["threshold"] = std::isinf(s.threshold) ? nlohmann::ordered_json("-inf")
                                              : nlohmann::ordered_json(s.threshold);
    js["score_left"] = s.score_left;
    js["score_right"] = s.score_right;
    j["stumps"].push_back(std::move(js));
  }
  return j.dump(2) + "\n";
}

Ensemble ensemble_from_json(const std::string& text) {
  Ensemble e;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    e.n_features = j.value("n_features", 0);
    for (const auto& js : j.at("stumps")) {
      Stump s;
      s.feature_index = js.at("feature_index").get<int>();
      const auto& thr = js.at("threshold");
      s.threshold = thr.is_string() ? -std::numeric_limits<double>::infinity()
                                    : thr.get<double>();
      s.score_left = js.at("score_left").get<double>();
      s.score_right = js.at("score_right").get<double>();
      e.stumps.push_back(s);
    }
    if (j.contains("rounds") && j.at("rounds").get<int>() != e.rounds())
      fail(Status::ValidationError, "model JSON: rounds does not match stump count");
  } catch (const nlohmann::json::exception& err) {
    fail(Status::ParseError, std::string("bad model JSON: ") + err.what());
  }
  return e;
}

double logistic_objective(std::span<const Instance> data, std::span<const double> weights,
                          double intercept, double l2) {
  double obj = 0.0;
  for (const Instance& inst : data) {
    double z = intercept;
    for (size_t f = 0; f < weights.size(); ++f) z += weights[f] * inst.features[f];
    const double yz = static_cast<double>(inst.label) * z;
    // log sigma(yz) = -log(1 + exp(-yz)), computed stably.
    obj += yz > 0 ? -std::log1p(std::exp(-yz)) : yz - std::log1p(std::exp(yz));
  }
  double penalty = 0.0;
  for (double wf : weights) penalty += wf * wf;
  return obj - 0.5 * l2 * penalty;
}

void logistic_gradient(std::span<const Instance> data, std::span<const double> weights,
                       double intercept, double l2, std::span<double> grad_w, double& grad_b) {
  std::fill(grad_w.begin(), grad_w.end(), 0.0);
  grad_b = 0.0;
  for (const Instance& inst : data) {
    double z = intercept;
    for (size_t f = 0; f < weights.size(); ++f) z += weights[f] * inst.features[f];
    const double y = static_cast<double>(inst.label);
    const double sig = 1.0 / (1.0 + std::exp(y * z));  // sigma(-yz)
    for (size_t f = 0; f < weights.size(); ++f) grad_w[f] += y * inst.features[f] * sig;
    grad_b += y * sig;
  }
  for (size_t f = 0; f < weights.size(); ++f) grad_w[f] -= l2 * weights[f];
}

LinearModel train_logistic_baseline(std::span<const Instance> data, double l2, int max_iter,
                                    double tol) {
  if (data.size() < 2) fail(Status::InsufficientData, "need at least two instances");
  bool has_pos = false, has_neg = false;
  const size_t d = data[0].features.size();
  for (const Instance& inst : data) {
    if (inst.features.size() != d)
      fail(Status::ValidationError, "instances have inconsistent feature lengths");
    (inst.label > 0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) fail(Status::TrainingError, "both labels required");

  LinearModel m;
  m.weights.assign(d, 0.0);
  std::vector<double> grad_w(d, 0.0);
  double grad_b = 0.0;
  double step = 1.0;

  for (int iter = 1; iter <= max_iter; ++iter) {
    logistic_gradient(data, m.weights, m.intercept, l2, grad_w, grad_b);
    double norm2 = grad_b * grad_b;
    double max_abs = std::abs(grad_b);
    for (double g : grad_w) {
      norm2 += g * g;
      max_abs = std::max(max_abs, std::abs(g));
    }
    m.iterations = iter;
    m.gradient_norm = max_abs;
    if (max_abs < tol) {
      m.converged = true;
      break;
    }

    const double obj = logistic_objective(data, m.weights, m.intercept, l2);
    std::vector<double> trial(d);
    step *= 2.0;  // let the accepted step grow back after small ones
    while (step > 1e-16) {
      for (size_t f = 0; f < d; ++f) trial[f] = m.weights[f] + step * grad_w[f];
      const double b_trial = m.intercept + step * grad_b;
      if (logistic_objective(data, trial, b_trial, l2) >= obj + 1e-4 * step * norm2) break;
      step *= 0.5;
    }
    for (size_t f = 0; f < d; ++f) m.weights[f] += step * grad_w[f];
    m.intercept += step * grad_b;
  }
  return m;
}

double linear_score(const LinearModel& m, std::span<const double> x) {
  if (x.size() != m.weights.size())
    fail(Status::ValidationError, "feature vector length does not match the training schema");
  double z = m.intercept;
  for (size_t f = 0; f < x.size(); ++f) z += m.weights[f] * x[f];
  return z;
}

}  // namespace vgkit
