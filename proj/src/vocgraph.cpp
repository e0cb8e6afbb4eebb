#include "vocgraph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "util.hpp"

namespace vgkit {

StateFrames sample_chain(std::span<const EventSegment> segments, double frame_dt_s) {
  if (segments.empty()) fail(Status::InsufficientData, "no segments to sample");
  if (!(frame_dt_s > 0)) fail(Status::InvalidArgument, "frame_dt_s must be positive");
  validate_segments(segments);

  const double t0 = segments.front().start_s;
  const double total = segments.back().end_s - t0;
  long n_frames = static_cast<long>(std::floor(total / frame_dt_s));
  if (n_frames < 1) n_frames = 1;

  std::vector<double> starts;
  starts.reserve(segments.size());
  for (const EventSegment& s : segments) starts.push_back(s.start_s);

  StateFrames frames;
  frames.frame_dt_s = frame_dt_s;
  frames.states.reserve(static_cast<size_t>(n_frames));
  for (long k = 0; k < n_frames; ++k) {
    double t = t0 + (static_cast<double>(k) + 0.5) * frame_dt_s;
    // Last segment whose start <= t. Midpoints of in-range frames always land
    // inside [t0, t0 + total), so the index is valid.
    auto it = std::upper_bound(starts.begin(), starts.end(), t);
    size_t idx = static_cast<size_t>(std::distance(starts.begin(), it));
    idx = idx > 0 ? idx - 1 : 0;
    if (idx >= segments.size()) idx = segments.size() - 1;
    frames.states.push_back(segments[idx].state);
  }
  return frames;
}

VocalisationGraph transition_matrix(const StateFrames& frames) {
  return transition_matrix(frames, false);
}

VocalisationGraph transition_matrix(const StateFrames& frames, bool add_one_smoothing) {
  if (frames.states.size() < 2)
    fail(Status::InsufficientData, "need at least two frames for a transition matrix");

  VocalisationGraph g;
  g.frame_dt_s = frames.frame_dt_s;
  for (size_t k = 0; k + 1 < frames.states.size(); ++k) {
    g.counts[static_cast<size_t>(frames.states[k])][static_cast<size_t>(frames.states[k + 1])] += 1;
  }
  for (int i = 0; i < kNumVocStates; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < kNumVocStates; ++j) {
      double c = static_cast<double>(g.counts[i][j]) + (add_one_smoothing ? 1.0 : 0.0);
      row_sum += c;
    }
    bool has_counts = add_one_smoothing ||
                      std::any_of(g.counts[i].begin(), g.counts[i].end(), [](long c) { return c > 0; });
    for (int j = 0; j < kNumVocStates; ++j) {
      double c = static_cast<double>(g.counts[i][j]) + (add_one_smoothing ? 1.0 : 0.0);
      g.probs[i][j] = has_counts ? c / row_sum : 0.0;
    }
  }
  const double n = static_cast<double>(frames.states.size());
  for (VocState s : frames.states) g.steady[static_cast<size_t>(s)] += 1.0 / n;
  return g;
}

StationaryResult stationary_distribution(const Matrix5& probs) {
  for (int i = 0; i < kNumVocStates; ++i) {
    double row = 0.0;
    for (int j = 0; j < kNumVocStates; ++j) {
      if (probs[i][j] < 0)
        fail(Status::ValidationError, "transition matrix has a negative entry");
      row += probs[i][j];
    }
    if (std::abs(row - 1.0) > 1e-9)
      fail(Status::ValidationError,
           "row " + std::to_string(i) + " of transition matrix sums to " + format_double(row));
  }

  StationaryResult r;
  Vector5 pi;
  pi.fill(1.0 / kNumVocStates);
  const int max_iters = 100000;
  for (int iter = 1; iter <= max_iters; ++iter) {
    Vector5 next{};
    for (int i = 0; i < kNumVocStates; ++i)
      for (int j = 0; j < kNumVocStates; ++j) next[j] += pi[i] * probs[i][j];
    double diff = 0.0;
    for (int j = 0; j < kNumVocStates; ++j) diff = std::max(diff, std::abs(next[j] - pi[j]));
    pi = next;
    r.iterations = iter;
    if (diff < 1e-12) {
      r.converged = true;
      break;
    }
  }
  // Row-stochasticity keeps the sum at 1 up to roundoff; renormalise anyway.
  double sum = 0.0;
  for (double v : pi) sum += v;
  for (double& v : pi) v /= sum;
  r.pi = pi;
  return r;
}

const char* schema_name(FeatureSchema s) { return s == FeatureSchema::VGO ? "vgo" : "vgs"; }

FeatureSchema schema_from_string(const std::string& s) {
  if (s == "vgo") return FeatureSchema::VGO;
  if (s == "vgs") return FeatureSchema::VGS;
  fail(Status::ValidationError, "unknown feature schema '" + s + "' (expected vgo|vgs)");
}

FeatureVector vgo_features(const VocalisationGraph& g, std::string dialogue_id,
                           std::optional<ClassLabel> label) {
  FeatureVector f;
  f.dialogue_id = std::move(dialogue_id);
  f.label = label;
  f.schema = FeatureSchema::VGO;
  f.values.reserve(kVgoFeatureCount);
  for (int i = 0; i < kNumVocStates; ++i)
    for (int j = 0; j < kNumVocStates; ++j) f.values.push_back(g.probs[i][j]);
  for (int i = 0; i < kNumVocStates; ++i) f.values.push_back(g.steady[i]);
  return f;
}

FeatureVector vgs_features(const VocalisationGraph& g, const RateSummary& rate,
                           std::string dialogue_id, std::optional<ClassLabel> label) {
  if (rate.n < 1)
    fail(Status::ValidationError,
         "dialogue '" + dialogue_id + "' has no rate summary; extract with the vgo schema instead");
  FeatureVector f = vgo_features(g, std::move(dialogue_id), label);
  f.schema = FeatureSchema::VGS;
  f.values.push_back(rate.mean);
  f.values.push_back(rate.variance);
  return f;
}

std::string graph_to_json(const VocalisationGraph& g) {
  nlohmann::ordered_json j;
  j["counts"] = g.counts;
  j["probs"] = g.probs;
  j["steady"] = g.steady;
  j["frame_dt_s"] = g.frame_dt_s;
  return j.dump(2) + "\n";
}

VocalisationGraph graph_from_json(const std::string& text) {
  VocalisationGraph g;
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    j.at("counts").get_to(g.counts);
    j.at("probs").get_to(g.probs);
    j.at("steady").get_to(g.steady);
    j.at("frame_dt_s").get_to(g.frame_dt_s);
  } catch (const nlohmann::json::exception& e) {
    fail(Status::ParseError, std::string("bad graph JSON: ") + e.what());
  }
  return g;
}

std::string graph_to_dot(const VocalisationGraph& g, const std::string& title,
                         double edge_threshold) {
  std::ostringstream out;
  out << "digraph vocalisation {\n";
  out << "  // " << title << "\n";
  out << "  rankdir=LR;\n";
  for (int i = 0; i < kNumVocStates; ++i) {
    out << "  s" << i << " [label=\"" << voc_state_name(static_cast<VocState>(i)) << "\\n"
        << format_double(g.steady[i]) << "\"];\n";
  }
  for (int i = 0; i < kNumVocStates; ++i) {
    for (int j = 0; j < kNumVocStates; ++j) {
      if (g.probs[i][j] >= edge_threshold) {
        out << "  s" << i << " -> s" << j << " [label=\"" << format_double(g.probs[i][j])
            << "\"];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

std::string features_to_csv(std::span<const FeatureVector> features) {
  std::ostringstream out;
  out << "dialogue_id,label,schema";
  for (int i = 0; i < kVgsFeatureCount; ++i) {
    out << ",f" << (i < 10 ? "0" : "") << i;
  }
  out << '\n';
  for (const FeatureVector& f : features) {
    out << f.dialogue_id << ',' << (f.label ? label_name(*f.label) : "") << ','
        << schema_name(f.schema);
    for (double v : f.values) out << ',' << format_double(v);
    for (size_t i = f.values.size(); i < kVgsFeatureCount; ++i) out << ',';
    out << '\n';
  }
  return out.str();
}

std::vector<FeatureVector> features_from_csv(std::istream& in) {
  std::vector<FeatureVector> out;
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (next_data_line(in, line, line_no)) {
    auto fields = split_csv(line);
    if (!saw_header) {
      if (fields.size() < 3 || fields[0] != "dialogue_id" || fields[1] != "label" ||
          fields[2] != "schema")
        fail(Status::ParseError, "feature CSV: unexpected header");
      saw_header = true;
      continue;
    }
    if (fields.size() != 3 + kVgsFeatureCount)
      fail(Status::ParseError,
           "feature CSV line " + std::to_string(line_no) + ": expected " +
               std::to_string(3 + kVgsFeatureCount) + " fields, got " +
               std::to_string(fields.size()));
    FeatureVector f;
    f.dialogue_id = fields[0];
    if (!fields[1].empty()) f.label = label_from_string(fields[1]);
    f.schema = schema_from_string(fields[2]);
    const int want = f.schema == FeatureSchema::VGO ? kVgoFeatureCount : kVgsFeatureCount;
    for (int i = 0; i < want; ++i) {
      f.values.push_back(
          parse_double_field(fields[static_cast<size_t>(3 + i)],
                             "f" + std::to_string(i) + " at line " + std::to_string(line_no)));
    }
    for (int i = want; i < kVgsFeatureCount; ++i) {
      if (!fields[static_cast<size_t>(3 + i)].empty())
        fail(Status::ValidationError, "feature CSV line " + std::to_string(line_no) +
                                          ": vgo row carries values beyond f29");
    }
    out.push_back(std::move(f));
  }
  if (!saw_header) fail(Status::ParseError, "feature CSV: empty file");
  return out;
}

}  // namespace vgkit
