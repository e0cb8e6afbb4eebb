// Exercises the shared-library surface end to end: handles, error codes,
// string ownership, and the pipeline wiring.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "vgkit.h"

// Core linked separately for fixture generation only.
#include "audio.hpp"
#include "simgen.hpp"

namespace {

struct Str {
  char* p = nullptr;
  ~Str() { vgk_string_free(p); }
  std::string str() const { return p != nullptr ? std::string(p) : std::string(); }
};

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("capi: version and status names") {
  CHECK(std::string(vgk_version()) == VGKIT_VERSION);
  CHECK(std::string(vgk_status_name(VGK_OK)) == "ok");
  CHECK(std::string(vgk_status_name(VGK_ERR_VALIDATION)) == "validation_error");
}

TEST_CASE("capi: simulate -> extract -> train -> evaluate round trip") {
  vgk_corpus* corpus = nullptr;
  REQUIRE(vgk_corpus_simulate(nullptr, 6, 6, 120.0, 42, &corpus) == VGK_OK);
  REQUIRE(corpus != nullptr);
  CHECK(vgk_corpus_size(corpus) == 12);

  Str id;
  REQUIRE(vgk_corpus_dialogue_id(corpus, 0, &id.p) == VGK_OK);
  CHECK(id.str() == "ad_000");

  Str turns, labels, rates, stats;
  REQUIRE(vgk_corpus_turns_jsonl(corpus, &turns.p) == VGK_OK);
  REQUIRE(vgk_corpus_labels_csv(corpus, &labels.p) == VGK_OK);
  REQUIRE(vgk_corpus_rates_csv(corpus, &rates.p) == VGK_OK);
  REQUIRE(vgk_corpus_stats_csv(corpus, &stats.p) == VGK_OK);
  CHECK(turns.str().find("\"role\":\"patient\"") != std::string::npos);
  CHECK(labels.str().find("ad_000,ad") != std::string::npos);
  CHECK(stats.str().find("Avg turn duration") != std::string::npos);

  // Parse the emitted corpus back through the API.
  vgk_corpus* reparsed = nullptr;
  REQUIRE(vgk_corpus_parse(turns.p, labels.p, &reparsed) == VGK_OK);
  CHECK(vgk_corpus_size(reparsed) == 12);

  vgk_extract_options opts;
  vgk_extract_options_init(&opts);
  vgk_dataset* vgo = nullptr;
  REQUIRE(vgk_extract(reparsed, &opts, nullptr, &vgo) == VGK_OK);
  CHECK(vgk_dataset_size(vgo) == 12);
  int is_vgs = -1;
  REQUIRE(vgk_dataset_schema(vgo, &is_vgs) == VGK_OK);
  CHECK(is_vgs == 0);

  opts.vgs = 1;
  vgk_dataset* vgs = nullptr;
  REQUIRE(vgk_extract(reparsed, &opts, rates.p, &vgs) == VGK_OK);
  REQUIRE(vgk_dataset_schema(vgs, &is_vgs) == VGK_OK);
  CHECK(is_vgs == 1);

  // vgs without rates is a validation error with a message.
  vgk_dataset* broken = nullptr;
  CHECK(vgk_extract(reparsed, &opts, nullptr, &broken) == VGK_ERR_VALIDATION);
  CHECK(std::string(vgk_last_error()).find("rate") != std::string::npos);

  // Feature CSV round trip.
  Str csv;
  REQUIRE(vgk_dataset_to_csv(vgo, &csv.p) == VGK_OK);
  vgk_dataset* again = nullptr;
  REQUIRE(vgk_dataset_from_csv(csv.p, &again) == VGK_OK);
  CHECK(vgk_dataset_size(again) == 12);
  Str csv2;
  REQUIRE(vgk_dataset_to_csv(again, &csv2.p) == VGK_OK);
  CHECK(csv.str() == csv2.str());

  // Graph artifacts.
  Str gjson, gdot;
  vgk_extract_options gopts;
  vgk_extract_options_init(&gopts);
  REQUIRE(vgk_graph_json(reparsed, 0, &gopts, &gjson.p) == VGK_OK);
  REQUIRE(vgk_graph_dot(reparsed, 0, &gopts, 0.01, &gdot.p) == VGK_OK);
  CHECK(gjson.str().find("\"probs\"") != std::string::npos);
  CHECK(gdot.str().find("digraph") != std::string::npos);

  // Training and prediction.
  vgk_model* model = nullptr;
  REQUIRE(vgk_train_adaboost(vgo, 10, &model) == VGK_OK);
  Str mjson;
  REQUIRE(vgk_model_to_json(model, &mjson.p) == VGK_OK);
  vgk_model* reloaded = nullptr;
  REQUIRE(vgk_model_from_json(mjson.p, &reloaded) == VGK_OK);

  double feats[30] = {0};
  double s1 = 0, s2 = 0;
  int l1 = 0, l2 = 0;
  REQUIRE(vgk_model_predict(model, feats, 30, &s1, &l1) == VGK_OK);
  REQUIRE(vgk_model_predict(reloaded, feats, 30, &s2, &l2) == VGK_OK);
  CHECK(s1 == s2);
  CHECK(l1 == l2);
  CHECK(vgk_model_predict(model, feats, 7, &s1, &l1) == VGK_ERR_VALIDATION);

  // Evaluation report.
  vgk_eval_options eopts;
  vgk_eval_options_init(&eopts);
  eopts.k = 4;
  eopts.roc_rounds = 2;
  eopts.seed = 9;
  Str metrics, roc;
  REQUIRE(vgk_evaluate(vgo, &eopts, &metrics.p, &roc.p) == VGK_OK);
  CHECK(metrics.str().find("Accuracy_mu") != std::string::npos);
  CHECK(metrics.str().find("loocv") != std::string::npos);
  CHECK(roc.str().find("threshold,fpr,tpr") != std::string::npos);
  CHECK(roc.str().find("# auc = ") != std::string::npos);

  vgk_model_free(model);
  vgk_model_free(reloaded);
  vgk_dataset_free(vgo);
  vgk_dataset_free(vgs);
  vgk_dataset_free(again);
  vgk_corpus_free(corpus);
  vgk_corpus_free(reparsed);
}

TEST_CASE("capi: parse failures set status and message") {
  vgk_corpus* corpus = nullptr;
  CHECK(vgk_corpus_parse("not json\n", nullptr, &corpus) == VGK_ERR_PARSE);
  CHECK(std::string(vgk_last_error()).find("line 1") != std::string::npos);

  CHECK(vgk_corpus_parse(nullptr, nullptr, &corpus) == VGK_ERR_INVALID_ARGUMENT);

  vgk_dataset* ds = nullptr;
  CHECK(vgk_dataset_from_csv("bogus header\n", &ds) == VGK_ERR_PARSE);
}

TEST_CASE("capi: rates are only available for simulated corpora") {
  const char* jsonl =
      "{\"dialogue_id\":\"d\",\"speaker\":\"p\",\"role\":\"patient\",\"start_s\":0,\"end_s\":2}\n"
      "{\"dialogue_id\":\"d\",\"speaker\":\"i\",\"role\":\"other\",\"start_s\":2,\"end_s\":4}\n";
  vgk_corpus* corpus = nullptr;
  REQUIRE(vgk_corpus_parse(jsonl, nullptr, &corpus) == VGK_OK);
  char* out = nullptr;
  CHECK(vgk_corpus_rates_csv(corpus, &out) == VGK_ERR_VALIDATION);
  vgk_corpus_free(corpus);
}

TEST_CASE("capi: wav rate analysis matches the fixture ground truth") {
  const std::string path = temp_path("vgkit_capi_bursts.wav");
  vgkit::write_wav(path, vgkit::gen_voiced_audio(8, 0.150, 0.150, 120.0, 16000, true));

  vgk_rate_result r;
  REQUIRE(vgk_rate_analyze_wav(path.c_str(), &r) == VGK_OK);
  CHECK(r.n_nuclei >= 7);
  CHECK(r.n_nuclei <= 9);
  CHECK(r.speaking_time_s > 0.5);
  CHECK(r.duration_s == doctest::Approx(8 * 0.3 + 0.15));
  CHECK(r.no_speech == 0);
  std::remove(path.c_str());

  CHECK(vgk_rate_analyze_wav("/nonexistent/file.wav", &r) == VGK_ERR_IO);
}

TEST_CASE("capi: scalar statistics helpers") {
  double ratio = 0;
  REQUIRE(vgk_speech_rate_ratio(160, 60.0, 0, &ratio) == VGK_OK);
  CHECK(ratio == doctest::Approx(1.0));
  CHECK(vgk_speech_rate_ratio(160, 0.0, 0, &ratio) == VGK_ERR_VALIDATION);

  double rates[3] = {150, 160, 170};
  double mean = 0, variance = 0;
  REQUIRE(vgk_rate_summary(rates, 3, &mean, &variance) == VGK_OK);
  CHECK(mean == doctest::Approx(160.0));
  CHECK(variance == doctest::Approx(200.0 / 3.0));

  double x[5] = {1, 2, 3, 4, 5};
  double y[5] = {1.1, 2.3, 2.8, 4.2, 4.9};
  double r = 0, t = 0, df = 0, p = 0;
  REQUIRE(vgk_pearson_test(x, y, 5, &r, &t, &df, &p) == VGK_OK);
  CHECK(r > 0.9);
  CHECK(df == 3.0);
  CHECK(p < 0.05);
}
