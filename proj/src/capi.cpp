#include "vgkit.h"

#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "pipeline.hpp"
#include "simgen.hpp"
#include "speechrate.hpp"
#include "util.hpp"

struct vgk_corpus {
  std::vector<vgkit::Dialogue> dialogues;
  std::vector<std::vector<double>> rates;  // nonempty only for simulated corpora
};

struct vgk_dataset {
  std::vector<vgkit::FeatureVector> features;
};

struct vgk_model {
  vgkit::Ensemble ensemble;
};

namespace {

thread_local std::string g_last_error;

vgk_status to_c_status(vgkit::Status s) {
  switch (s) {
    case vgkit::Status::Ok: return VGK_OK;
    case vgkit::Status::IoError: return VGK_ERR_IO;
    case vgkit::Status::ParseError: return VGK_ERR_PARSE;
    case vgkit::Status::ValidationError: return VGK_ERR_VALIDATION;
    case vgkit::Status::FormatError: return VGK_ERR_FORMAT;
    case vgkit::Status::InsufficientData: return VGK_ERR_INSUFFICIENT_DATA;
    case vgkit::Status::TrainingError: return VGK_ERR_TRAINING;
    case vgkit::Status::InvalidArgument: return VGK_ERR_INVALID_ARGUMENT;
  }
  return VGK_ERR_INTERNAL;
}

template <typename Fn>
vgk_status wrap(Fn&& fn) noexcept {
  try {
    fn();
    return VGK_OK;
  } catch (const vgkit::Error& e) {
    g_last_error = e.what();
    return to_c_status(e.status());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return VGK_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return VGK_ERR_INTERNAL;
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) vgkit::fail(vgkit::Status::InvalidArgument, what);
}

vgkit::ExtractOptions to_extract_options(const vgk_extract_options* opts) {
  vgkit::ExtractOptions e;
  if (opts == nullptr) return e;
  e.schema = opts->vgs ? vgkit::FeatureSchema::VGS : vgkit::FeatureSchema::VGO;
  if (opts->frame_dt_s > 0) e.frame_dt_s = opts->frame_dt_s;
  if (opts->min_event_s > 0) e.min_event_s = opts->min_event_s;
  e.add_one_smoothing = opts->add_one_smoothing != 0;
  return e;
}

}  // namespace

extern "C" {

const char* vgk_status_name(vgk_status status) {
  switch (status) {
    case VGK_OK: return "ok";
    case VGK_ERR_IO: return "io_error";
    case VGK_ERR_PARSE: return "parse_error";
    case VGK_ERR_VALIDATION: return "validation_error";
    case VGK_ERR_FORMAT: return "format_error";
    case VGK_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case VGK_ERR_TRAINING: return "training_error";
    case VGK_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case VGK_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* vgk_last_error(void) { return g_last_error.c_str(); }

const char* vgk_version(void) { return VGKIT_VERSION; }

void vgk_string_free(char* s) { delete[] s; }

vgk_status vgk_corpus_parse(const char* turns_jsonl, const char* labels_csv_or_null,
                            vgk_corpus** out) {
  return wrap([&] {
    require(turns_jsonl != nullptr && out != nullptr, "null argument");
    std::istringstream turns(turns_jsonl);
    auto dialogues = vgkit::parse_turn_records(turns);
    if (labels_csv_or_null != nullptr) {
      std::istringstream labels(labels_csv_or_null);
      vgkit::apply_labels_csv(dialogues, labels);
    }
    auto corpus = std::make_unique<vgk_corpus>();
    corpus->dialogues = std::move(dialogues);
    *out = corpus.release();
  });
}

vgk_status vgk_corpus_simulate(const char* profiles_json_or_null, int n_ad, int n_nonad,
                               double target_dialogue_s, uint64_t seed, vgk_corpus** out) {
  return wrap([&] {
    require(out != nullptr, "null argument");
    vgkit::CorpusSpec spec;
    spec.ad_profile = vgkit::default_ad_profile();
    spec.nonad_profile = vgkit::default_nonad_profile();
    if (profiles_json_or_null != nullptr)
      vgkit::profiles_from_json(profiles_json_or_null, spec.ad_profile, spec.nonad_profile);
    spec.n_ad = n_ad;
    spec.n_nonad = n_nonad;
    spec.target_dialogue_s = target_dialogue_s;
    spec.seed = seed;
    vgkit::GeneratedCorpus generated = vgkit::gen_corpus(spec);
    auto corpus = std::make_unique<vgk_corpus>();
    corpus->dialogues = std::move(generated.dialogues);
    corpus->rates = std::move(generated.rates);
    *out = corpus.release();
  });
}

size_t vgk_corpus_size(const vgk_corpus* corpus) {
  return corpus == nullptr ? 0 : corpus->dialogues.size();
}

vgk_status vgk_corpus_dialogue_id(const vgk_corpus* corpus, size_t index, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    require(index < corpus->dialogues.size(), "dialogue index out of range");
    *out = copy_string(corpus->dialogues[index].dialogue_id);
  });
}

vgk_status vgk_corpus_turns_jsonl(const vgk_corpus* corpus, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    *out = copy_string(vgkit::dialogues_to_jsonl(corpus->dialogues));
  });
}

vgk_status vgk_corpus_labels_csv(const vgk_corpus* corpus, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    *out = copy_string(vgkit::labels_to_csv(corpus->dialogues));
  });
}

vgk_status vgk_corpus_rates_csv(const vgk_corpus* corpus, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    if (corpus->rates.empty())
      vgkit::fail(vgkit::Status::ValidationError,
                  "corpus carries no generated rates (parsed, not simulated)");
    vgkit::GeneratedCorpus g;
    g.dialogues = corpus->dialogues;
    g.rates = corpus->rates;
    *out = copy_string(vgkit::rates_to_csv(g));
  });
}

vgk_status vgk_corpus_stats_csv(const vgk_corpus* corpus, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    *out = copy_string(vgkit::turn_stats_csv(vgkit::descriptive_stats(corpus->dialogues)));
  });
}

void vgk_corpus_free(vgk_corpus* corpus) { delete corpus; }

void vgk_extract_options_init(vgk_extract_options* opts) {
  if (opts == nullptr) return;
  opts->vgs = 0;
  opts->frame_dt_s = vgkit::kDefaultFrameDtSeconds;
  opts->min_event_s = vgkit::kDefaultMinEventSeconds;
  opts->add_one_smoothing = 0;
}

vgk_status vgk_extract(const vgk_corpus* corpus, const vgk_extract_options* opts,
                       const char* rates_csv_or_null, vgk_dataset** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    vgkit::ExtractOptions eopts = to_extract_options(opts);
    vgkit::RateTable table;
    const vgkit::RateTable* table_ptr = nullptr;
    if (rates_csv_or_null != nullptr) {
      std::istringstream in(rates_csv_or_null);
      table = vgkit::rate_table_from_csv(in);
      table_ptr = &table;
    }
    auto ds = std::make_unique<vgk_dataset>();
    ds->features = vgkit::extract_features(corpus->dialogues, eopts, table_ptr);
    *out = ds.release();
  });
}

vgk_status vgk_graph_json(const vgk_corpus* corpus, size_t index, const vgk_extract_options* opts,
                          char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    require(index < corpus->dialogues.size(), "dialogue index out of range");
    vgkit::VocalisationGraph g =
        vgkit::dialogue_graph(corpus->dialogues[index], to_extract_options(opts));
    *out = copy_string(vgkit::graph_to_json(g));
  });
}

vgk_status vgk_graph_dot(const vgk_corpus* corpus, size_t index, const vgk_extract_options* opts,
                         double edge_threshold, char** out) {
  return wrap([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    require(index < corpus->dialogues.size(), "dialogue index out of range");
    const vgkit::Dialogue& d = corpus->dialogues[index];
    vgkit::VocalisationGraph g = vgkit::dialogue_graph(d, to_extract_options(opts));
    *out = copy_string(
        vgkit::graph_to_dot(g, d.dialogue_id, edge_threshold > 0 ? edge_threshold : 0.01));
  });
}

vgk_status vgk_dataset_from_csv(const char* csv_text, vgk_dataset** out) {
  return wrap([&] {
    require(csv_text != nullptr && out != nullptr, "null argument");
    std::istringstream in(csv_text);
    auto ds = std::make_unique<vgk_dataset>();
    ds->features = vgkit::features_from_csv(in);
    *out = ds.release();
  });
}

vgk_status vgk_dataset_to_csv(const vgk_dataset* dataset, char** out) {
  return wrap([&] {
    require(dataset != nullptr && out != nullptr, "null argument");
    *out = copy_string(vgkit::features_to_csv(dataset->features));
  });
}

size_t vgk_dataset_size(const vgk_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->features.size();
}

vgk_status vgk_dataset_schema(const vgk_dataset* dataset, int* is_vgs_out) {
  return wrap([&] {
    require(dataset != nullptr && is_vgs_out != nullptr, "null argument");
    if (dataset->features.empty())
      vgkit::fail(vgkit::Status::InsufficientData, "empty dataset");
    const vgkit::FeatureSchema schema = dataset->features.front().schema;
    for (const vgkit::FeatureVector& f : dataset->features)
      if (f.schema != schema)
        vgkit::fail(vgkit::Status::ValidationError, "feature vectors mix schemas (vgo and vgs)");
    *is_vgs_out = schema == vgkit::FeatureSchema::VGS ? 1 : 0;
  });
}

void vgk_dataset_free(vgk_dataset* dataset) { delete dataset; }

vgk_status vgk_train_adaboost(const vgk_dataset* dataset, int rounds, vgk_model** out) {
  return wrap([&] {
    require(dataset != nullptr && out != nullptr, "null argument");
    vgkit::LabeledDataset ds = vgkit::to_dataset(dataset->features);
    auto model = std::make_unique<vgk_model>();
    model->ensemble =
        vgkit::train_real_adaboost(ds.instances, rounds > 0 ? rounds : vgkit::kDefaultBoostingRounds);
    *out = model.release();
  });
}

vgk_status vgk_model_to_json(const vgk_model* model, char** out) {
  return wrap([&] {
    require(model != nullptr && out != nullptr, "null argument");
    *out = copy_string(vgkit::ensemble_to_json(model->ensemble));
  });
}

vgk_status vgk_model_from_json(const char* json_text, vgk_model** out) {
  return wrap([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    auto model = std::make_unique<vgk_model>();
    model->ensemble = vgkit::ensemble_from_json(json_text);
    *out = model.release();
  });
}

vgk_status vgk_model_predict(const vgk_model* model, const double* features, size_t n_features,
                             double* score_out, int* label_out) {
  return wrap([&] {
    require(model != nullptr && features != nullptr, "null argument");
    double score = vgkit::predict_score(model->ensemble, {features, n_features});
    if (score_out != nullptr) *score_out = score;
    if (label_out != nullptr) *label_out = vgkit::predict_label(score);
  });
}

void vgk_model_free(vgk_model* model) { delete model; }

void vgk_eval_options_init(vgk_eval_options* opts) {
  if (opts == nullptr) return;
  opts->trainer = 0;
  opts->k = 10;
  opts->boost_rounds = vgkit::kDefaultBoostingRounds;
  opts->logistic_l2 = 1e-4;
  opts->roc_rounds = 10;
  opts->seed = 1;
}

vgk_status vgk_evaluate(const vgk_dataset* dataset, const vgk_eval_options* opts,
                        char** metrics_json_out, char** roc_csv_out) {
  return wrap([&] {
    require(dataset != nullptr, "null argument");
    vgkit::EvaluateOptions eopts;
    if (opts != nullptr) {
      eopts.trainer = opts->trainer == 1 ? vgkit::TrainerKind::LogisticRegression
                                         : vgkit::TrainerKind::RealAdaBoost;
      if (opts->k > 0) eopts.k = opts->k;
      if (opts->boost_rounds > 0) eopts.boost_rounds = opts->boost_rounds;
      if (opts->logistic_l2 > 0) eopts.logistic_l2 = opts->logistic_l2;
      if (opts->roc_rounds > 0) eopts.roc_rounds = opts->roc_rounds;
      eopts.seed = opts->seed;
    }
    if (dataset->features.empty())
      vgkit::fail(vgkit::Status::InsufficientData, "empty dataset");
    vgkit::LabeledDataset ds = vgkit::to_dataset(dataset->features);
    vgkit::EvaluationReport report =
        vgkit::evaluate(ds, dataset->features.front().schema, eopts);
    if (metrics_json_out != nullptr) *metrics_json_out = copy_string(vgkit::evaluation_to_json(report));
    if (roc_csv_out != nullptr) *roc_csv_out = copy_string(vgkit::roc_to_csv(report.roc));
  });
}

vgk_status vgk_rate_analyze_wav(const char* wav_path, vgk_rate_result* out) {
  return wrap([&] {
    require(wav_path != nullptr && out != nullptr, "null argument");
    vgkit::AudioBuffer audio = vgkit::read_wav(wav_path);
    vgkit::IntensityContour contour = vgkit::intensity_contour(audio);
    vgkit::NucleiResult r = vgkit::detect_syllable_nuclei(audio, contour);
    out->n_nuclei = static_cast<long>(r.nucleus_times_s.size());
    out->speaking_time_s = r.speaking_time_s;
    out->syllables_per_min = r.syllables_per_min;
    out->duration_s = audio.duration_s();
    out->no_speech = r.no_speech ? 1 : 0;
  });
}

vgk_status vgk_speech_rate_ratio(long word_count, double actual_duration_s, double reference_wpm,
                                 double* out) {
  return wrap([&] {
    require(out != nullptr, "null argument");
    *out = vgkit::speech_rate_ratio(
        word_count, actual_duration_s,
        reference_wpm > 0 ? reference_wpm : vgkit::kReferenceWordsPerMinute);
  });
}

vgk_status vgk_rate_summary(const double* rates, size_t n, double* mean_out,
                            double* variance_out) {
  return wrap([&] {
    require(rates != nullptr, "null argument");
    vgkit::RateSummary s = vgkit::rate_summary({rates, n});
    if (mean_out != nullptr) *mean_out = s.mean;
    if (variance_out != nullptr) *variance_out = s.variance;
  });
}

vgk_status vgk_pearson_test(const double* x, const double* y, size_t n, double* r_out,
                            double* t_out, double* df_out, double* p_out) {
  return wrap([&] {
    require(x != nullptr && y != nullptr, "null argument");
    vgkit::CorrelationTest res = vgkit::pearson_test({x, n}, {y, n});
    if (r_out != nullptr) *r_out = res.r;
    if (t_out != nullptr) *t_out = res.t;
    if (df_out != nullptr) *df_out = res.df;
    if (p_out != nullptr) *p_out = res.p;
  });
}

}  // extern "C"
