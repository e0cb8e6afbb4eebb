#include "pipeline.hpp"

#include <cmath>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace vgkit {

RateTable rate_table_from_csv(std::istream& in) {
  RateTable table;
  std::string line;
  int line_no = 0;
  while (next_data_line(in, line, line_no)) {
    auto fields = split_csv(line);
    if (fields.size() == 3 && fields[0] == "dialogue_id" && fields[1] == "utterance_id" &&
        fields[2] == "rate")
      continue;  // header
    if (fields.size() != 3)
      fail(Status::ParseError,
           "rates line " + std::to_string(line_no) + ": expected dialogue_id,utterance_id,rate");
    table[fields[0]].push_back(
        parse_double_field(fields[2], "rate at line " + std::to_string(line_no)));
  }
  return table;
}

VocalisationGraph dialogue_graph(const Dialogue& d, const ExtractOptions& opts) {
  std::vector<EventSegment> segments = segment_events(d, opts.min_event_s);
  StateFrames frames = sample_chain(segments, opts.frame_dt_s);
  return transition_matrix(frames, opts.add_one_smoothing);
}

std::vector<FeatureVector> extract_features(std::span<const Dialogue> dialogues,
                                            const ExtractOptions& opts, const RateTable* rates) {
  std::vector<FeatureVector> out;
  out.reserve(dialogues.size());
  for (const Dialogue& d : dialogues) {
    VocalisationGraph g = dialogue_graph(d, opts);
    if (opts.schema == FeatureSchema::VGO) {
      out.push_back(vgo_features(g, d.dialogue_id, d.label));
      continue;
    }
    if (rates == nullptr)
      fail(Status::ValidationError, "vgs schema requires per-utterance rate input");
    auto it = rates->find(d.dialogue_id);
    if (it == rates->end() || it->second.empty())
      fail(Status::ValidationError,
           "vgs schema: no rate entries for dialogue '" + d.dialogue_id + "'");
    RateSummary summary = rate_summary(it->second);
    out.push_back(vgs_features(g, summary, d.dialogue_id, d.label));
  }
  return out;
}

LabeledDataset to_dataset(std::span<const FeatureVector> features) {
  if (features.empty()) fail(Status::InsufficientData, "no feature vectors");
  LabeledDataset ds;
  const FeatureSchema schema = features.front().schema;
  for (const FeatureVector& f : features) {
    if (f.schema != schema)
      fail(Status::ValidationError, "feature vectors mix schemas (vgo and vgs)");
    if (!f.label)
      fail(Status::ValidationError, "dialogue '" + f.dialogue_id + "' is unlabeled");
    ds.ids.push_back(f.dialogue_id);
    Instance inst;
    inst.features = f.values;
    inst.label = *f.label == ClassLabel::AD ? +1 : -1;
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

EvaluationReport evaluate(const LabeledDataset& dataset, FeatureSchema schema,
                          const EvaluateOptions& opts) {
  Trainer trainer = opts.trainer == TrainerKind::RealAdaBoost
                        ? make_adaboost_trainer(opts.boost_rounds)
                        : make_logistic_trainer(opts.logistic_l2);
  EvaluationReport report;
  report.trainer_name = trainer.name;
  report.schema = schema;
  report.k = opts.k;
  report.roc_rounds = opts.roc_rounds;
  report.seed = opts.seed;
  report.n_instances = static_cast<long>(dataset.size());

  std::vector<Prediction> cv_preds = cross_validate(dataset, trainer, opts.k, opts.seed);
  report.cv = compute_metrics(cv_preds);
  report.loocv_accuracy = overall_accuracy(loocv(dataset, trainer));
  report.roc = roc_smoothed(dataset, trainer, opts.roc_rounds, opts.k, opts.seed);
  return report;
}

namespace {

nlohmann::ordered_json metric_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

nlohmann::ordered_json class_block(const ClassMetrics& m) {
  nlohmann::ordered_json j;
  j["Accuracy_mu"] = metric_or_null(m.accuracy_mu);
  j["Precision_mu"] = metric_or_null(m.precision_mu);
  j["Recall_mu"] = metric_or_null(m.recall_mu);
  j["F1_mu"] = metric_or_null(m.f1_mu);
  j["Precision_M"] = metric_or_null(m.precision_macro);
  j["Recall_M"] = metric_or_null(m.recall_macro);
  j["F1_M"] = metric_or_null(m.f1_macro);
  j["confusion"] = {{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn}};
  j["macro_excluded_folds"] = {{"precision", m.excluded_precision_folds},
                               {"recall", m.excluded_recall_folds},
                               {"f1", m.excluded_f1_folds}};
  return j;
}

}  // namespace

std::string evaluation_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["trainer"] = report.trainer_name;
  j["schema"] = schema_name(report.schema);
  j["n_instances"] = report.n_instances;
  j["cv"] = nlohmann::ordered_json::object();
  j["cv"]["k"] = report.k;
  j["cv"]["folds"] = "stratified";
  j["cv"]["seed"] = report.seed;
  j["cv"]["ad"] = class_block(report.cv.ad);
  j["cv"]["nonad"] = class_block(report.cv.nonad);
  j["cv"]["overall_accuracy"] = report.cv.overall_accuracy;
  j["loocv"] = {{"overall_accuracy", report.loocv_accuracy}};
  j["roc"] = nlohmann::ordered_json::object();
  j["roc"]["rounds"] = report.roc_rounds;
  j["roc"]["auc"] = report.roc.auc;
  if (report.roc.degenerate) j["roc"]["warning"] = "all scores identical";
  return j.dump(2) + "\n";
}

}  // namespace vgkit
