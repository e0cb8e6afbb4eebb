#pragma once

#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evalstats.hpp"
#include "vocgraph.hpp"

namespace vgkit {

struct ExtractOptions {
  FeatureSchema schema = FeatureSchema::VGO;
  double frame_dt_s = kDefaultFrameDtSeconds;
  double min_event_s = kDefaultMinEventSeconds;
  bool add_one_smoothing = false;
};

// Per-utterance rates keyed by dialogue id, as read from a
// `dialogue_id,utterance_id,rate` CSV.
using RateTable = std::map<std::string, std::vector<double>>;

RateTable rate_table_from_csv(std::istream& in);

VocalisationGraph dialogue_graph(const Dialogue& d, const ExtractOptions& opts);

// One feature vector per dialogue. VGS requires a rate entry for every
// dialogue; a missing entry is a validation error naming the dialogue.
std::vector<FeatureVector> extract_features(std::span<const Dialogue> dialogues,
                                            const ExtractOptions& opts,
                                            const RateTable* rates = nullptr);

// All vectors must be labeled and share one schema.
LabeledDataset to_dataset(std::span<const FeatureVector> features);

enum class TrainerKind { RealAdaBoost, LogisticRegression };

struct EvaluateOptions {
  TrainerKind trainer = TrainerKind::RealAdaBoost;
  int k = 10;
  int boost_rounds = kDefaultBoostingRounds;
  double logistic_l2 = 1e-4;
  int roc_rounds = 10;
  std::uint64_t seed = 1;
};

struct EvaluationReport {
  std::string trainer_name;
  FeatureSchema schema = FeatureSchema::VGO;
  int k = 0;
  int roc_rounds = 0;
  std::uint64_t seed = 0;
  long n_instances = 0;
  MetricsReport cv;
  double loocv_accuracy = 0.0;
  RocCurve roc;
};

// 10-fold CV metrics (micro and macro, both class perspectives), LOOCV
// overall accuracy, simulation-smoothed ROC.
EvaluationReport evaluate(const LabeledDataset& dataset, FeatureSchema schema,
                          const EvaluateOptions& opts);

// Report JSON mirrors the published table fields: Accuracy_mu, Precision_mu,
// Recall_mu, F1_mu, Precision_M, Recall_M, F1_M per class plus the overall
// LOOCV accuracy.
std::string evaluation_to_json(const EvaluationReport& report);

}  // namespace vgkit
