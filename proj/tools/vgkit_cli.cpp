// vgkit command-line pipeline: simulate | extract | rate | evaluate | stats.
// Talks to the library exclusively through the C API in vgkit.h.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vgkit.h"

namespace fs = std::filesystem;

namespace {

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(vgk_status status, const std::string& context) {
  if (status != VGK_OK)
    throw CliError(context + ": " + vgk_status_name(status) + ": " + vgk_last_error());
}

// Owns a string returned by the library.
struct OwnedStr {
  char* p = nullptr;
  ~OwnedStr() { vgk_string_free(p); }
  std::string str() const { return p != nullptr ? std::string(p) : std::string(); }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write file: " + path.string());
  out << content;
  if (!out) throw CliError("write failed: " + path.string());
}

std::string fnv1a64_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Reproducibility header carried by every output file: tool version, a hash
// of the effective configuration, the seed, and the config echo itself.
struct RunMeta {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> config;
  std::optional<std::uint64_t> seed;

  std::string config_echo() const {
    std::string echo = subcommand;
    for (const auto& [k, v] : config) echo += " " + k + "=" + v;
    return echo;
  }
  std::string hash() const { return fnv1a64_hex(config_echo()); }

  std::string comment_header(const std::string& prefix = "# ") const {
    std::string seed_str = seed ? std::to_string(*seed) : "none";
    return prefix + "vgkit " + vgk_version() + "\n" + prefix + "config_hash " + hash() + "\n" +
           prefix + "seed " + seed_str + "\n" + prefix + "config " + config_echo() + "\n";
  }

  nlohmann::ordered_json json_meta() const {
    nlohmann::ordered_json m;
    m["tool_version"] = vgk_version();
    m["config_hash"] = hash();
    if (seed)
      m["seed"] = *seed;
    else
      m["seed"] = nullptr;
    m["config"] = config_echo();
    return m;
  }
};

// Injects the meta block as the first key of a JSON payload.
std::string with_json_meta(const std::string& payload, const RunMeta& meta) {
  nlohmann::ordered_json body = nlohmann::ordered_json::parse(payload);
  nlohmann::ordered_json out;
  out["meta"] = meta.json_meta();
  for (auto& [key, value] : body.items()) out[key] = value;
  return out.dump(2) + "\n";
}

// Shortest decimal form that round-trips the double.
std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// --config FILE support: flat key=value lines supply defaults for long
// options the command line does not mention (flags > config > defaults).
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::string config_path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw CliError("--config needs a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw CliError("cannot open config file: " + config_path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    size_t eq = line.find('=', start);
    if (eq == std::string::npos)
      throw CliError("config file: expected key=value, got '" + line + "'");
    std::string key = line.substr(start, eq - start);
    key.erase(key.find_last_not_of(" \t") + 1);
    std::string value = line.substr(eq + 1);
    size_t vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? "" : value.substr(vb);
    entries.emplace_back(key, value);
  }

  auto mentioned = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const std::string& a : rest)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> merged = rest;
  for (const auto& [key, value] : entries) {
    if (mentioned(key)) continue;
    merged.push_back("--" + key);
    if (!value.empty()) merged.push_back(value);
  }
  return merged;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// ------------------------------------------------------------- subcommands

struct SimulateArgs {
  std::string out_dir;
  std::uint64_t seed = 0;
  int n_ad = 21;
  int n_nonad = 17;
  double target_s = 300.0;
  std::string profile_path;
};

int cmd_simulate(const SimulateArgs& a) {
  RunMeta meta;
  meta.subcommand = "simulate";
  meta.seed = a.seed;
  meta.config = {{"n-ad", std::to_string(a.n_ad)},
                 {"n-nonad", std::to_string(a.n_nonad)},
                 {"target-s", fmt(a.target_s)},
                 {"profile", a.profile_path.empty() ? "builtin" : a.profile_path},
                 {"seed", std::to_string(a.seed)}};

  std::string profiles_json;
  if (!a.profile_path.empty()) profiles_json = read_file(a.profile_path);

  vgk_corpus* corpus = nullptr;
  check(vgk_corpus_simulate(profiles_json.empty() ? nullptr : profiles_json.c_str(), a.n_ad,
                            a.n_nonad, a.target_s, a.seed, &corpus),
        "simulate");

  fs::create_directories(a.out_dir);
  OwnedStr turns, labels, rates;
  check(vgk_corpus_turns_jsonl(corpus, &turns.p), "turns");
  check(vgk_corpus_labels_csv(corpus, &labels.p), "labels");
  check(vgk_corpus_rates_csv(corpus, &rates.p), "rates");
  const std::string header = meta.comment_header();
  write_file(fs::path(a.out_dir) / "turns.jsonl", header + turns.str());
  write_file(fs::path(a.out_dir) / "labels.csv", header + labels.str());
  write_file(fs::path(a.out_dir) / "rates.csv", header + rates.str());
  std::cout << "dialogues: " << vgk_corpus_size(corpus) << " (ad: " << a.n_ad
            << ", nonad: " << a.n_nonad << ")\n";
  vgk_corpus_free(corpus);
  return 0;
}

struct ExtractArgs {
  std::string turns_path;
  std::string labels_path;
  std::string rates_path;
  std::string out_dir;
  std::string schema = "vgo";
  double frame_dt = 0.1;
  double min_event = 0.05;
  bool smoothing = false;
  double dot_threshold = 0.01;
};

int cmd_extract(const ExtractArgs& a) {
  RunMeta meta;
  meta.subcommand = "extract";
  meta.config = {{"turns", a.turns_path},
                 {"labels", a.labels_path},
                 {"rates", a.rates_path.empty() ? "none" : a.rates_path},
                 {"schema", a.schema},
                 {"frame-dt", fmt(a.frame_dt)},
                 {"min-event", fmt(a.min_event)},
                 {"smoothing", a.smoothing ? "1" : "0"},
                 {"dot-threshold", fmt(a.dot_threshold)}};

  if (a.schema != "vgo" && a.schema != "vgs")
    throw CliError("--schema must be vgo or vgs");
  if (a.schema == "vgs" && a.rates_path.empty())
    throw CliError(
        "schema vgs needs per-utterance rates: pass --rates FILE "
        "(dialogue_id,utterance_id,rate)");

  const std::string turns = read_file(a.turns_path);
  std::string labels;
  if (!a.labels_path.empty()) labels = read_file(a.labels_path);

  vgk_corpus* corpus = nullptr;
  check(vgk_corpus_parse(turns.c_str(), labels.empty() ? nullptr : labels.c_str(), &corpus),
        "parse turns");

  vgk_extract_options opts;
  vgk_extract_options_init(&opts);
  opts.vgs = a.schema == "vgs" ? 1 : 0;
  opts.frame_dt_s = a.frame_dt;
  opts.min_event_s = a.min_event;
  opts.add_one_smoothing = a.smoothing ? 1 : 0;

  std::string rates_csv;
  if (!a.rates_path.empty()) rates_csv = read_file(a.rates_path);

  vgk_dataset* dataset = nullptr;
  vgk_status st =
      vgk_extract(corpus, &opts, rates_csv.empty() ? nullptr : rates_csv.c_str(), &dataset);
  if (st != VGK_OK) {
    vgk_corpus_free(corpus);
    check(st, "extract");
  }

  fs::create_directories(fs::path(a.out_dir) / "graphs");
  const std::string header = meta.comment_header();

  OwnedStr features;
  check(vgk_dataset_to_csv(dataset, &features.p), "feature csv");
  write_file(fs::path(a.out_dir) / "features.csv", header + features.str());

  for (size_t i = 0; i < vgk_corpus_size(corpus); ++i) {
    OwnedStr id, gjson, gdot;
    check(vgk_corpus_dialogue_id(corpus, i, &id.p), "dialogue id");
    check(vgk_graph_json(corpus, i, &opts, &gjson.p), "graph json");
    check(vgk_graph_dot(corpus, i, &opts, a.dot_threshold, &gdot.p), "graph dot");
    write_file(fs::path(a.out_dir) / "graphs" / (id.str() + ".json"),
               with_json_meta(gjson.str(), meta));
    write_file(fs::path(a.out_dir) / "graphs" / (id.str() + ".dot"),
               meta.comment_header("// ") + gdot.str());
  }

  std::cout << "features: " << vgk_dataset_size(dataset) << " dialogues, schema " << a.schema
            << "\n";
  vgk_dataset_free(dataset);
  vgk_corpus_free(corpus);
  return 0;
}

struct EvaluateArgs {
  std::string features_path;
  std::string out_dir;
  std::string schema;  // empty = take from the CSV
  std::string trainer = "adaboost";
  int k = 10;
  int rounds = 10;
  int roc_rounds = 10;
  double l2 = 1e-4;
  std::uint64_t seed = 0;
};

int cmd_evaluate(const EvaluateArgs& a) {
  RunMeta meta;
  meta.subcommand = "evaluate";
  meta.seed = a.seed;
  meta.config = {{"features", a.features_path}, {"schema", a.schema.empty() ? "auto" : a.schema},
                 {"trainer", a.trainer},         {"k", std::to_string(a.k)},
                 {"rounds", std::to_string(a.rounds)}, {"roc-rounds", std::to_string(a.roc_rounds)},
                 {"l2", fmt(a.l2)},              {"seed", std::to_string(a.seed)}};

  if (a.trainer != "adaboost" && a.trainer != "logistic")
    throw CliError("--trainer must be adaboost or logistic");

  vgk_dataset* dataset = nullptr;
  check(vgk_dataset_from_csv(read_file(a.features_path).c_str(), &dataset), "read features");

  if (!a.schema.empty()) {
    if (a.schema != "vgo" && a.schema != "vgs") throw CliError("--schema must be vgo or vgs");
    int is_vgs = 0;
    check(vgk_dataset_schema(dataset, &is_vgs), "dataset schema");
    const std::string actual = is_vgs ? "vgs" : "vgo";
    if (actual != a.schema)
      throw CliError("schema mismatch: --schema " + a.schema + " but " + a.features_path +
                     " holds " + actual + " rows");
  }

  vgk_eval_options opts;
  vgk_eval_options_init(&opts);
  opts.trainer = a.trainer == "logistic" ? 1 : 0;
  opts.k = a.k;
  opts.boost_rounds = a.rounds;
  opts.logistic_l2 = a.l2;
  opts.roc_rounds = a.roc_rounds;
  opts.seed = a.seed;

  OwnedStr metrics, roc;
  vgk_status st = vgk_evaluate(dataset, &opts, &metrics.p, &roc.p);
  vgk_dataset_free(dataset);
  check(st, "evaluate");

  fs::create_directories(a.out_dir);
  write_file(fs::path(a.out_dir) / "metrics.json", with_json_meta(metrics.str(), meta));
  write_file(fs::path(a.out_dir) / "roc.csv", meta.comment_header() + roc.str());
  std::cout << "evaluation written to " << a.out_dir << "\n";
  return 0;
}

struct StatsArgs {
  std::string turns_path;
  std::string labels_path;
  std::string out_dir;
};

int cmd_stats(const StatsArgs& a) {
  RunMeta meta;
  meta.subcommand = "stats";
  meta.config = {{"turns", a.turns_path}, {"labels", a.labels_path}};

  vgk_corpus* corpus = nullptr;
  const std::string turns = read_file(a.turns_path);
  const std::string labels = read_file(a.labels_path);
  check(vgk_corpus_parse(turns.c_str(), labels.c_str(), &corpus), "parse turns");
  OwnedStr csv;
  vgk_status st = vgk_corpus_stats_csv(corpus, &csv.p);
  vgk_corpus_free(corpus);
  check(st, "stats");

  fs::create_directories(a.out_dir);
  write_file(fs::path(a.out_dir) / "turn_stats.csv", meta.comment_header() + csv.str());
  std::cout << "stats written to " << a.out_dir << "\n";
  return 0;
}

struct RateArgs {
  std::vector<std::string> wavs;
  std::string words_path;
  std::string synth_path;
  std::string out_dir;
  double reference_wpm = 160.0;
};

std::map<std::string, double> read_two_column_csv(const std::string& path,
                                                  const std::string& col0,
                                                  const std::string& col1) {
  std::map<std::string, double> out;
  std::ifstream in(path);
  if (!in) throw CliError("cannot open file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw CliError(path + ": expected " + col0 + "," + col1 + " rows");
    std::string key = line.substr(0, comma);
    std::string value = line.substr(comma + 1);
    if (key == col0 && value == col1) continue;  // header
    try {
      out[key] = std::stod(value);
    } catch (const std::exception&) {
      throw CliError(path + ": bad numeric value '" + value + "' for " + key);
    }
  }
  return out;
}

int cmd_rate(const RateArgs& a) {
  RunMeta meta;
  meta.subcommand = "rate";
  std::string file_list;
  for (const std::string& w : a.wavs) {
    if (!file_list.empty()) file_list += ';';
    file_list += w;
  }
  meta.config = {{"words", a.words_path.empty() ? "none" : a.words_path},
                 {"synth-durations", a.synth_path.empty() ? "none" : a.synth_path},
                 {"reference-wpm", fmt(a.reference_wpm)},
                 {"files", file_list}};

  std::map<std::string, double> words;
  if (!a.words_path.empty()) words = read_two_column_csv(a.words_path, "utterance_id", "words");
  std::map<std::string, double> synth;
  if (!a.synth_path.empty())
    synth = read_two_column_csv(a.synth_path, "utterance_id", "synth_duration_s");

  std::ostringstream nuclei_csv;
  nuclei_csv << "utterance_id,n_nuclei,speaking_time_s,syll_per_min\n";
  std::vector<std::string> warnings;
  std::vector<double> rates;
  std::vector<double> corr_rate, corr_ratio;
  int failures = 0;

  nlohmann::ordered_json per_file = nlohmann::ordered_json::array();
  for (const std::string& wav : a.wavs) {
    const std::string id = stem_of(wav);
    vgk_rate_result r;
    vgk_status st = vgk_rate_analyze_wav(wav.c_str(), &r);
    if (st != VGK_OK) {
      std::cerr << "error: " << wav << ": " << vgk_status_name(st) << ": " << vgk_last_error()
                << "\n";
      ++failures;
      continue;
    }
    nuclei_csv << id << ',' << r.n_nuclei << ',' << fmt(r.speaking_time_s) << ','
               << fmt(r.syllables_per_min) << '\n';
    if (r.no_speech) warnings.push_back(id);
    rates.push_back(r.syllables_per_min);

    nlohmann::ordered_json row;
    row["utterance_id"] = id;
    row["n_nuclei"] = r.n_nuclei;
    row["speaking_time_s"] = r.speaking_time_s;
    row["syll_per_min"] = r.syllables_per_min;
    row["duration_s"] = r.duration_s;
    if (r.no_speech) row["warning"] = "no speech detected";

    auto it = words.find(id);
    if (it != words.end() && r.duration_s > 0) {
      double ratio = 0.0;
      auto syn = synth.find(id);
      if (syn != synth.end()) {
        ratio = syn->second / r.duration_s;
      } else {
        check(vgk_speech_rate_ratio(static_cast<long>(it->second), r.duration_s, a.reference_wpm,
                                    &ratio),
              "speech rate ratio for " + id);
      }
      row["speech_rate_ratio"] = ratio;
      if (!r.no_speech) {
        corr_rate.push_back(r.syllables_per_min);
        corr_ratio.push_back(ratio);
      }
    }
    per_file.push_back(std::move(row));
  }
  for (const std::string& id : warnings) nuclei_csv << "# warning no_speech " << id << "\n";

  nlohmann::ordered_json report;
  report["meta"] = meta.json_meta();
  report["files"] = per_file;
  if (!rates.empty()) {
    double mean = 0, variance = 0;
    check(vgk_rate_summary(rates.data(), rates.size(), &mean, &variance), "rate summary");
    report["rate_summary"] = {{"n", rates.size()}, {"mean", mean}, {"variance", variance}};
  }
  if (corr_rate.size() >= 3) {
    double r = 0, t = 0, df = 0, p = 0;
    vgk_status st =
        vgk_pearson_test(corr_rate.data(), corr_ratio.data(), corr_rate.size(), &r, &t, &df, &p);
    if (st == VGK_OK) {
      report["correlation"] = {{"n", corr_rate.size()}, {"r", r}, {"t", t}, {"df", df}, {"p", p}};
    } else {
      report["correlation"] = {{"n", corr_rate.size()},
                               {"error", std::string(vgk_last_error())}};
    }
  } else {
    report["correlation"] = nullptr;
  }

  fs::create_directories(a.out_dir);
  write_file(fs::path(a.out_dir) / "nuclei.csv", meta.comment_header() + nuclei_csv.str());
  write_file(fs::path(a.out_dir) / "rate_report.json", report.dump(2) + "\n");
  std::cout << "analyzed " << rates.size() << "/" << a.wavs.size() << " files\n";
  return failures > 0 ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vgkit: vocalisation-graph dialogue analysis pipeline"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "generate a seeded synthetic corpus");
  simulate->add_option("--out", sim.out_dir, "output directory")->required();
  simulate->add_option("--seed", sim.seed, "RNG seed")->required();
  simulate->add_option("--n-ad", sim.n_ad, "dialogues in the ad class");
  simulate->add_option("--n-nonad", sim.n_nonad, "dialogues in the nonad class");
  simulate->add_option("--target-s", sim.target_s, "target dialogue length, seconds");
  simulate->add_option("--profile", sim.profile_path, "class profile JSON file");

  ExtractArgs ext;
  CLI::App* extract = app.add_subcommand("extract", "turn records -> vocalisation-graph features");
  extract->add_option("--turns", ext.turns_path, "turn JSONL file")->required();
  extract->add_option("--labels", ext.labels_path, "label CSV file");
  extract->add_option("--rates", ext.rates_path, "per-utterance rate CSV (vgs schema)");
  extract->add_option("--out", ext.out_dir, "output directory")->required();
  extract->add_option("--schema", ext.schema, "feature schema: vgo|vgs");
  extract->add_option("--frame-dt", ext.frame_dt, "chain sampling step, seconds");
  extract->add_option("--min-event", ext.min_event, "minimum event duration, seconds");
  extract->add_flag("--smoothing", ext.smoothing, "add-one smoothing of transition counts");
  extract->add_option("--dot-threshold", ext.dot_threshold, "minimum edge probability in DOT");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "cross-validate a classifier on features");
  evaluate->add_option("--features", ev.features_path, "feature CSV file")->required();
  evaluate->add_option("--out", ev.out_dir, "output directory")->required();
  evaluate->add_option("--schema", ev.schema, "expected schema: vgo|vgs");
  evaluate->add_option("--trainer", ev.trainer, "adaboost|logistic");
  evaluate->add_option("--k", ev.k, "cross-validation folds");
  evaluate->add_option("--rounds", ev.rounds, "boosting rounds");
  evaluate->add_option("--roc-rounds", ev.roc_rounds, "cross-validation rounds pooled into ROC");
  evaluate->add_option("--l2", ev.l2, "logistic L2 penalty");
  evaluate->add_option("--seed", ev.seed, "RNG seed")->required();

  StatsArgs st;
  CLI::App* stats = app.add_subcommand("stats", "turn-taking descriptive statistics");
  stats->add_option("--turns", st.turns_path, "turn JSONL file")->required();
  stats->add_option("--labels", st.labels_path, "label CSV file")->required();
  stats->add_option("--out", st.out_dir, "output directory")->required();

  RateArgs rat;
  CLI::App* rate = app.add_subcommand("rate", "syllable-nuclei speech rate from wav files");
  rate->add_option("wavs", rat.wavs, "PCM16 wav files")->required();
  rate->add_option("--words", rat.words_path, "utterance_id,words CSV");
  rate->add_option("--synth-durations", rat.synth_path, "utterance_id,synth_duration_s CSV");
  rate->add_option("--reference-wpm", rat.reference_wpm, "reference pace for the rate ratio");
  rate->add_option("--out", rat.out_dir, "output directory")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config_args(args);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const std::string& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (extract->parsed()) return cmd_extract(ext);
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (stats->parsed()) return cmd_stats(st);
    if (rate->parsed()) return cmd_rate(rat);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
