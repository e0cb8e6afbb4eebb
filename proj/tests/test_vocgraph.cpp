#include <doctest.h>

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "support/oracles.hpp"
#include "vocgraph.hpp"

using namespace vgkit;

namespace {

// Dense solve of (P^T - I) pi = 0 with the normalisation row sum(pi) = 1;
// Gaussian elimination with partial pivoting. Independent route to the
// stationary distribution.
Vector5 stationary_by_linear_solve(const Matrix5& p) {
  constexpr int n = kNumVocStates;
  double a[n][n + 1] = {};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
    a[i][n] = 0.0;
  }
  for (int j = 0; j < n; ++j) a[n - 1][j] = 1.0;  // replace last equation
  a[n - 1][n] = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    for (int j = 0; j <= n; ++j) std::swap(a[col][j], a[pivot][j]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[col][col] == 0.0) continue;
      const double factor = a[r][col] / a[col][col];
      for (int j = 0; j <= n; ++j) a[r][j] -= factor * a[col][j];
    }
  }
  Vector5 pi{};
  for (int i = 0; i < n; ++i) pi[static_cast<size_t>(i)] = a[i][n] / a[i][i];
  return pi;
}

Matrix5 random_ergodic_matrix(Rng& rng) {
  Matrix5 p{};
  for (int i = 0; i < kNumVocStates; ++i) {
    double row = 0;
    for (int j = 0; j < kNumVocStates; ++j) {
      p[i][j] = 0.05 + rng.uniform();  // floor keeps every transition live
      row += p[i][j];
    }
    for (int j = 0; j < kNumVocStates; ++j) p[i][j] /= row;
  }
  return p;
}

std::vector<VocState> simulate_chain(const Matrix5& p, long n, Rng& rng) {
  std::vector<VocState> states;
  states.reserve(static_cast<size_t>(n));
  int s = 0;
  for (long k = 0; k < n; ++k) {
    states.push_back(static_cast<VocState>(s));
    double u = rng.uniform();
    double acc = 0;
    for (int j = 0; j < kNumVocStates; ++j) {
      acc += p[s][j];
      if (u < acc) {
        s = j;
        break;
      }
    }
  }
  return states;
}

void check_graph_invariants(const VocalisationGraph& g) {
  long total = 0;
  for (int i = 0; i < kNumVocStates; ++i) {
    long row_count = 0;
    double row_prob = 0;
    for (int j = 0; j < kNumVocStates; ++j) {
      REQUIRE(g.counts[i][j] >= 0);
      row_count += g.counts[i][j];
      row_prob += g.probs[i][j];
    }
    total += row_count;
    if (row_count > 0) {
      CHECK(std::abs(row_prob - 1.0) <= 1e-9);
    } else {
      CHECK(row_prob == 0.0);
    }
  }
  double steady_sum = 0;
  for (double v : g.steady) {
    CHECK(v >= 0.0);
    steady_sum += v;
  }
  CHECK(std::abs(steady_sum - 1.0) <= 1e-9);
  (void)total;
}

}  // namespace

TEST_SUITE_BEGIN("vocgraph");

TEST_CASE("sample: one second of one state at 0.1 s gives ten frames") {
  std::vector<EventSegment> segs{{VocState::PatientSpeech, 0.0, 1.0}};
  StateFrames f = sample_chain(segs, 0.1);
  REQUIRE(f.states.size() == 10);
  for (VocState s : f.states) CHECK(s == VocState::PatientSpeech);
}

TEST_CASE("sample: midpoint sampling at 0.25 s") {
  std::vector<EventSegment> segs{{VocState::PatientSpeech, 0.0, 0.5},
                                 {VocState::Pause, 0.5, 1.0}};
  StateFrames f = sample_chain(segs, 0.25);
  REQUIRE(f.states.size() == 4);
  CHECK(f.states[0] == VocState::PatientSpeech);
  CHECK(f.states[1] == VocState::PatientSpeech);
  CHECK(f.states[2] == VocState::Pause);
  CHECK(f.states[3] == VocState::Pause);
}

TEST_CASE("sample: short timeline still yields one frame") {
  std::vector<EventSegment> segs{{VocState::JointTalk, 0.0, 0.04}};
  StateFrames f = sample_chain(segs, 0.1);
  REQUIRE(f.states.size() == 1);
  CHECK(f.states[0] == VocState::JointTalk);
}

TEST_CASE("sample: empty segment list is an error") {
  std::vector<EventSegment> segs;
  CHECK_THROWS_AS(sample_chain(segs, 0.1), Error);
}

TEST_CASE("sample: frames equal independent midpoint lookups") {
  Rng rng(424242);
  for (int trial = 0; trial < 50; ++trial) {
    // Random abutting segments with alternating states.
    std::vector<EventSegment> segs;
    double t = rng.uniform() * 2.0;
    int prev = -1;
    const int n = 1 + static_cast<int>(rng.uniform_below(8));
    for (int i = 0; i < n; ++i) {
      int s;
      do {
        s = static_cast<int>(rng.uniform_below(kNumVocStates));
      } while (s == prev);
      prev = s;
      double dur = 0.05 + rng.uniform() * 3.0;
      segs.push_back({static_cast<VocState>(s), t, t + dur});
      t += dur;
    }
    const double dt = 0.07 + rng.uniform() * 0.1;
    StateFrames f = sample_chain(segs, dt);

    // Oracle: linear scan for the segment containing each midpoint.
    const double total = segs.back().end_s - segs.front().start_s;
    const long expect_n = std::max(1L, static_cast<long>(std::floor(total / dt)));
    REQUIRE(static_cast<long>(f.states.size()) == expect_n);
    for (long k = 0; k < expect_n; ++k) {
      const double mid = segs.front().start_s + (static_cast<double>(k) + 0.5) * dt;
      VocState want = segs.back().state;
      for (const EventSegment& s : segs) {
        if (s.start_s <= mid && mid < s.end_s) {
          want = s.state;
          break;
        }
      }
      CHECK(f.states[static_cast<size_t>(k)] == want);
    }
  }
}

TEST_CASE("transition: hand-counted two-state chain") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::PatientSpeech, VocState::OtherSpeech};
  VocalisationGraph g = transition_matrix(f);
  CHECK(g.counts[0][0] == 1);
  CHECK(g.counts[0][1] == 1);
  CHECK(g.probs[0][0] == doctest::Approx(0.5));
  CHECK(g.probs[0][1] == doctest::Approx(0.5));
  CHECK(g.steady[0] == doctest::Approx(2.0 / 3.0));
  CHECK(g.steady[1] == doctest::Approx(1.0 / 3.0));
  check_graph_invariants(g);
}

TEST_CASE("transition: single-state chain concentrates everything") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states.assign(20, VocState::Pause);
  VocalisationGraph g = transition_matrix(f);
  CHECK(g.probs[3][3] == doctest::Approx(1.0));
  CHECK(g.steady[3] == doctest::Approx(1.0));
  check_graph_invariants(g);
}

TEST_CASE("transition: fewer than two frames is an error") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::Pause};
  CHECK_THROWS_AS(transition_matrix(f), Error);
}

TEST_CASE("transition: counts total frames minus one") {
  Rng rng(11);
  StateFrames f;
  f.frame_dt_s = 0.1;
  for (int i = 0; i < 500; ++i)
    f.states.push_back(static_cast<VocState>(rng.uniform_below(kNumVocStates)));
  VocalisationGraph g = transition_matrix(f);
  long total = 0;
  for (auto& row : g.counts)
    for (long c : row) total += c;
  CHECK(total == 499);
  check_graph_invariants(g);
}

TEST_CASE("transition: long simulated chain recovers its generator") {
  Rng rng(2024);
  Matrix5 p = random_ergodic_matrix(rng);
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = simulate_chain(p, 100000, rng);
  VocalisationGraph g = transition_matrix(f);
  for (int i = 0; i < kNumVocStates; ++i)
    for (int j = 0; j < kNumVocStates; ++j)
      CHECK(std::abs(g.probs[i][j] - p[i][j]) <= 0.02);
  check_graph_invariants(g);
}

TEST_CASE("transition: add-one smoothing fills unseen transitions") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::PatientSpeech, VocState::PatientSpeech};
  VocalisationGraph g = transition_matrix(f, true);
  CHECK(g.probs[0][0] == doctest::Approx(3.0 / 7.0));
  CHECK(g.probs[0][1] == doctest::Approx(1.0 / 7.0));
  CHECK(g.probs[4][4] == doctest::Approx(0.2));
}

TEST_CASE("stationary: identity matrix returns the uniform start") {
  Matrix5 eye{};
  for (int i = 0; i < kNumVocStates; ++i) eye[i][i] = 1.0;
  StationaryResult r = stationary_distribution(eye);
  CHECK(r.converged);
  for (double v : r.pi) CHECK(v == doctest::Approx(0.2));
}

TEST_CASE("stationary: symmetric two-state component absorbs the mass") {
  Matrix5 p{};
  p[0][0] = 0.7;
  p[0][1] = 0.3;
  p[1][0] = 0.3;
  p[1][1] = 0.7;
  // Remaining states drain into the component.
  p[2][0] = 1.0;
  p[3][0] = 1.0;
  p[4][1] = 1.0;
  StationaryResult r = stationary_distribution(p);
  CHECK(r.converged);
  CHECK(r.pi[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.pi[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.pi[2] == doctest::Approx(0.0));
}

TEST_CASE("stationary: a glacial chain reports non-convergence with the iteration count") {
  // Two nearly decoupled states with asymmetric leak rates; the subdominant
  // eigenvalue sits at 1 - 3e-8, far too slow for 1e5 power iterations.
  Matrix5 p{};
  p[0][0] = 1.0 - 1e-8;
  p[0][1] = 1e-8;
  p[1][1] = 1.0 - 2e-8;
  p[1][0] = 2e-8;
  p[2][0] = 1.0;
  p[3][0] = 1.0;
  p[4][0] = 1.0;
  StationaryResult r = stationary_distribution(p);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 100000);
  double sum = 0;
  for (double v : r.pi) sum += v;
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("stationary: non-stochastic row is a validation error") {
  Matrix5 p{};
  p[0][0] = 0.5;
  CHECK_THROWS_AS(stationary_distribution(p), Error);
}

TEST_CASE("stationary: matches a dense linear solve on random ergodic matrices") {
  Rng rng(777);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix5 p = random_ergodic_matrix(rng);
    StationaryResult r = stationary_distribution(p);
    CHECK(r.converged);
    Vector5 want = stationary_by_linear_solve(p);
    for (int i = 0; i < kNumVocStates; ++i)
      CHECK(std::abs(r.pi[static_cast<size_t>(i)] - want[static_cast<size_t>(i)]) <= 1e-9);
  }
}

TEST_CASE("stationary: occupancy of a long ergodic chain agrees with the eigenvector") {
  Rng rng(31);
  Matrix5 p = random_ergodic_matrix(rng);
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = simulate_chain(p, 100000, rng);
  VocalisationGraph g = transition_matrix(f);
  StationaryResult r = stationary_distribution(p);
  for (int i = 0; i < kNumVocStates; ++i)
    CHECK(std::abs(g.steady[static_cast<size_t>(i)] - r.pi[static_cast<size_t>(i)]) < 0.02);
}

TEST_CASE("vgo: values sit at their schema positions") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::PatientSpeech, VocState::OtherSpeech};
  VocalisationGraph g = transition_matrix(f);
  FeatureVector v = vgo_features(g, "d1", ClassLabel::AD);
  REQUIRE(v.values.size() == kVgoFeatureCount);
  CHECK(v.values[0] == doctest::Approx(0.5));   // P->P
  CHECK(v.values[1] == doctest::Approx(0.5));   // P->O
  CHECK(v.values[25] == doctest::Approx(2.0 / 3.0));  // steady[P]
  for (int i = 2; i < 25; ++i) CHECK(v.values[static_cast<size_t>(i)] == 0.0);
}

TEST_CASE("vgo: deterministic and invertible back to the matrix") {
  Rng rng(8);
  StateFrames f;
  f.frame_dt_s = 0.1;
  for (int i = 0; i < 400; ++i)
    f.states.push_back(static_cast<VocState>(rng.uniform_below(kNumVocStates)));
  VocalisationGraph g = transition_matrix(f);
  FeatureVector a = vgo_features(g, "d", std::nullopt);
  FeatureVector b = vgo_features(g, "d", std::nullopt);
  CHECK(a.values == b.values);  // bitwise

  // Rebuild the matrix from the vector positions.
  for (int i = 0; i < kNumVocStates; ++i)
    for (int j = 0; j < kNumVocStates; ++j)
      CHECK(a.values[static_cast<size_t>(i * kNumVocStates + j)] == g.probs[i][j]);
  for (int i = 0; i < kNumVocStates; ++i)
    CHECK(a.values[static_cast<size_t>(25 + i)] == g.steady[static_cast<size_t>(i)]);
}

TEST_CASE("vgs: appends rate mean and variance after the vgo prefix") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::OtherSpeech, VocState::PatientSpeech};
  VocalisationGraph g = transition_matrix(f);

  RateSummary one;
  one.mean = 168.0;
  one.variance = 0.0;
  one.n = 1;
  FeatureVector v = vgs_features(g, one, "d1", ClassLabel::NonAD);
  REQUIRE(v.values.size() == kVgsFeatureCount);
  CHECK(v.values[30] == 168.0);
  CHECK(v.values[31] == 0.0);

  FeatureVector vgo = vgo_features(g, "d1", ClassLabel::NonAD);
  for (int i = 0; i < kVgoFeatureCount; ++i)
    CHECK(v.values[static_cast<size_t>(i)] == vgo.values[static_cast<size_t>(i)]);

  RateSummary two = rate_summary(std::vector<double>{150.0, 170.0});
  FeatureVector v2 = vgs_features(g, two, "d1", ClassLabel::NonAD);
  CHECK(v2.values[30] == doctest::Approx(160.0));
  CHECK(v2.values[31] == doctest::Approx(100.0));  // population variance
}

TEST_CASE("vgs: missing rate summary instructs the caller to use vgo") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::OtherSpeech};
  VocalisationGraph g = transition_matrix(f);
  RateSummary none;
  try {
    vgs_features(g, none, "d1", std::nullopt);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("vgo") != std::string::npos);
  }
}

TEST_CASE("graph json round trip") {
  StateFrames f;
  f.frame_dt_s = 0.25;
  f.states = {VocState::PatientSpeech, VocState::Pause, VocState::PatientSpeech,
              VocState::JointTalk};
  VocalisationGraph g = transition_matrix(f);
  VocalisationGraph h = graph_from_json(graph_to_json(g));
  CHECK(h.counts == g.counts);
  CHECK(h.probs == g.probs);
  CHECK(h.steady == g.steady);
  CHECK(h.frame_dt_s == g.frame_dt_s);
}

TEST_CASE("dot output lists five nodes and thresholds edges") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states.assign(50, VocState::PatientSpeech);
  f.states.push_back(VocState::Pause);
  VocalisationGraph g = transition_matrix(f);
  std::string dot = graph_to_dot(g, "d1", 0.01);
  for (int i = 0; i < kNumVocStates; ++i)
    CHECK(dot.find("s" + std::to_string(i) + " [label=") != std::string::npos);
  CHECK(dot.find("s0 -> s0") != std::string::npos);
  CHECK(dot.find("s1 -> ") == std::string::npos);  // no transitions out of OtherSpeech
}

TEST_CASE("feature csv round trip; vgo rows leave the rate columns empty") {
  StateFrames f;
  f.frame_dt_s = 0.1;
  f.states = {VocState::PatientSpeech, VocState::OtherSpeech, VocState::Pause};
  VocalisationGraph g = transition_matrix(f);
  RateSummary rs = rate_summary(std::vector<double>{150.0, 170.0});

  std::vector<FeatureVector> features{vgo_features(g, "a", ClassLabel::AD),
                                      vgs_features(g, rs, "b", ClassLabel::NonAD)};
  std::string csv = features_to_csv(features);
  CHECK(csv.find("a,ad,vgo") != std::string::npos);
  CHECK(csv.find("b,nonad,vgs") != std::string::npos);

  // vgo row ends with two empty cells
  std::istringstream lines(csv);
  std::string header, row_a;
  std::getline(lines, header);
  std::getline(lines, row_a);
  CHECK(row_a.substr(row_a.size() - 2) == ",,");

  std::istringstream in(csv);
  auto parsed = features_from_csv(in);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].schema == FeatureSchema::VGO);
  CHECK(parsed[0].values == features[0].values);
  CHECK(parsed[1].schema == FeatureSchema::VGS);
  CHECK(parsed[1].values == features[1].values);
}

TEST_SUITE_END();
