#pragma once

#include <span>
#include <string>
#include <vector>

namespace vgkit {

// Label convention: +1 = AD, -1 = NonAD.
struct Instance {
  std::vector<double> features;
  int label = 1;
};

// A single split. Instances with feature value <= threshold go left. Either
// score is the half-log-odds of the positive class on that side, clipped so
// scores stay finite. threshold = -infinity encodes the guard split that
// sends every instance right.
struct Stump {
  int feature_index = 0;
  double threshold = 0.0;
  double score_left = 0.0;
  double score_right = 0.0;

  double score(std::span<const double> x) const {
    return x[static_cast<size_t>(feature_index)] <= threshold ? score_left : score_right;
  }
};

struct Ensemble {
  std::vector<Stump> stumps;
  int n_features = 0;  // schema width recorded at training time

  int rounds() const { return static_cast<int>(stumps.size()); }
};

inline constexpr double kProbabilityClipEpsilon = 1e-6;
inline constexpr int kDefaultBoostingRounds = 10;

// Per-round training audit trail, for tests and diagnostics.
struct TrainTrace {
  struct Round {
    Stump stump;
    double weight_sum_after = 0.0;   // should be 1 after renormalisation
    double weighted_error = 0.0;     // of this stump, on the weights it saw
    double exp_loss = 0.0;           // sum_i exp(-y_i F(x_i)) after this round
    std::vector<double> weights_after;
  };
  std::vector<Round> rounds;
};

// Minimises the exponential-loss criterion Z = sum_i w_i exp(-y_i f(x_i))
// over every feature and every candidate threshold (midpoints of consecutive
// sorted distinct values, plus the -infinity guard). Side probabilities are
// clipped to [eps, 1-eps] before the half-log-odds score. Ties break toward
// the lowest feature index, then the lowest threshold.
Stump fit_stump(std::span<const Instance> data, std::span<const double> weights);

// Real AdaBoost: uniform start weights, w_i <- w_i * exp(-y_i f_m(x_i)) and
// renormalisation after each round. A degenerate stump (single-class data) in
// round one is a training error; in later rounds it stops training early, as
// does a stump with weighted error >= 0.5.
Ensemble train_real_adaboost(std::span<const Instance> data, int rounds = kDefaultBoostingRounds,
                             TrainTrace* trace = nullptr);

double predict_score(const Ensemble& e, std::span<const double> x);

// sign with the screening tie-break: score 0 maps to +1 (AD).
inline int predict_label(double score) { return score >= 0 ? 1 : -1; }

std::string ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const std::string& text);

struct LinearModel {
  std::vector<double> weights;
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

// L2-penalised logistic regression fit by gradient ascent with backtracking
// line search. The intercept is not penalised. Non-convergence within
// max_iter is flagged on the model, not an error.
LinearModel train_logistic_baseline(std::span<const Instance> data, double l2 = 1e-4,
                                    int max_iter = 1000, double tol = 1e-8);

double linear_score(const LinearModel& m, std::span<const double> x);

// Penalised log-likelihood and its gradient, used by training and exposed for
// the finite-difference check.
double logistic_objective(std::span<const Instance> data, std::span<const double> weights,
                          double intercept, double l2);
void logistic_gradient(std::span<const Instance> data, std::span<const double> weights,
                       double intercept, double l2, std::span<double> grad_w, double& grad_b);

}  // namespace vgkit
