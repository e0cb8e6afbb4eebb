#pragma once

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "speechrate.hpp"
#include "timeline.hpp"

namespace vgkit {

struct StateFrames {
  double frame_dt_s = 0.0;
  std::vector<VocState> states;
};

inline constexpr double kDefaultFrameDtSeconds = 0.1;

// Fixed-step sampling of the segment timeline: frame k carries the state
// active at first_onset + (k + 0.5) * frame_dt_s, with floor(duration/dt)
// frames and a minimum of one.
StateFrames sample_chain(std::span<const EventSegment> segments,
                         double frame_dt_s = kDefaultFrameDtSeconds);

using Matrix5 = std::array<std::array<double, kNumVocStates>, kNumVocStates>;
using Counts5 = std::array<std::array<long, kNumVocStates>, kNumVocStates>;
using Vector5 = std::array<double, kNumVocStates>;

struct VocalisationGraph {
  Counts5 counts{};   // counts[i][j]: consecutive-frame transitions i -> j
  Matrix5 probs{};    // row-normalised; all-zero rows stay all-zero
  Vector5 steady{};   // empirical occupancy: fraction of frames per state
  double frame_dt_s = 0.0;
};

// Needs at least two frames. Rows of probs with nonzero count sum to 1 within
// 1e-9; steady always sums to 1.
VocalisationGraph transition_matrix(const StateFrames& frames);

// Optional add-one smoothing of the transition counts before normalisation.
VocalisationGraph transition_matrix(const StateFrames& frames, bool add_one_smoothing);

struct StationaryResult {
  Vector5 pi{};
  bool converged = false;
  int iterations = 0;
};

// Power iteration from the uniform vector on a row-stochastic matrix.
// Converges when successive iterates differ by < 1e-12 in max norm; gives up
// after 1e5 iterations and reports converged = false.
StationaryResult stationary_distribution(const Matrix5& probs);

enum class FeatureSchema { VGO, VGS };
const char* schema_name(FeatureSchema s);
FeatureSchema schema_from_string(const std::string& s);

inline constexpr int kVgoFeatureCount = 30;  // 25 transition probs + 5 steady
inline constexpr int kVgsFeatureCount = 32;  // VGO + rate mean + rate variance

struct FeatureVector {
  std::string dialogue_id;
  std::optional<ClassLabel> label;
  FeatureSchema schema = FeatureSchema::VGO;
  std::vector<double> values;
};

// Layout: probs row-major over the canonical VocState order, then steady in
// canonical order, then (VGS only) rate mean and rate variance.
FeatureVector vgo_features(const VocalisationGraph& g, std::string dialogue_id,
                           std::optional<ClassLabel> label);
FeatureVector vgs_features(const VocalisationGraph& g, const RateSummary& rate,
                           std::string dialogue_id, std::optional<ClassLabel> label);

std::string graph_to_json(const VocalisationGraph& g);
VocalisationGraph graph_from_json(const std::string& text);

// DOT rendering of the graph: one node per state labeled with its steady-state
// probability, one edge per transition probability >= edge_threshold.
std::string graph_to_dot(const VocalisationGraph& g, const std::string& title,
                         double edge_threshold = 0.01);

// Feature CSV: header `dialogue_id,label,schema,f00..f31`; VGO rows leave
// f30 and f31 empty.
std::string features_to_csv(std::span<const FeatureVector> features);
std::vector<FeatureVector> features_from_csv(std::istream& in);

}  // namespace vgkit
