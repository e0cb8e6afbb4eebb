#include <doctest.h>

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"
#include "support/oracles.hpp"
#include "timeline.hpp"

using namespace vgkit;

namespace {

Dialogue make_dialogue(std::initializer_list<TurnRecord> turns) {
  Dialogue d;
  d.dialogue_id = "d";
  d.turns = turns;
  return d;
}

TurnRecord turn(const char* speaker, Role role, double start, double end,
                std::optional<long> words = std::nullopt) {
  TurnRecord t;
  t.speaker_id = speaker;
  t.role = role;
  t.start_s = start;
  t.end_s = end;
  t.word_count = words;
  return t;
}

void check_same_segments(const std::vector<EventSegment>& got,
                         const std::vector<EventSegment>& want) {
  REQUIRE(got.size() == want.size());
  for (size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i].state == want[i].state);
    CHECK(std::abs(got[i].start_s - want[i].start_s) <= 1e-9);
    CHECK(std::abs(got[i].end_s - want[i].end_s) <= 1e-9);
  }
}

}  // namespace

TEST_SUITE_BEGIN("timeline");

TEST_CASE("parse: two well-formed lines make one dialogue with two turns") {
  std::istringstream in(
      R"({"dialogue_id":"d1","speaker":"p","role":"patient","start_s":0.0,"end_s":2.0,"words":7}
{"dialogue_id":"d1","speaker":"i","role":"other","start_s":2.5,"end_s":4.0})");
  auto dialogues = parse_turn_records(in);
  REQUIRE(dialogues.size() == 1);
  CHECK(dialogues[0].dialogue_id == "d1");
  REQUIRE(dialogues[0].turns.size() == 2);
  CHECK(dialogues[0].turns[0].word_count == 7);
  CHECK_FALSE(dialogues[0].turns[1].word_count.has_value());
}

TEST_CASE("parse: comment lines and blank lines are skipped") {
  std::istringstream in(
      "# header\n\n"
      R"({"dialogue_id":"d1","speaker":"p","role":"patient","start_s":0,"end_s":1}
{"dialogue_id":"d1","speaker":"i","role":"other","start_s":1,"end_s":2})");
  CHECK(parse_turn_records(in).size() == 1);
}

TEST_CASE("parse: zero-length turn is a validation error naming the turn") {
  std::istringstream in(
      R"({"dialogue_id":"d1","speaker":"p","role":"patient","start_s":1.0,"end_s":1.0})");
  try {
    parse_turn_records(in);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::ValidationError);
    CHECK(std::string(e.what()).find("'p'") != std::string::npos);
  }
}

TEST_CASE("parse: malformed JSON reports the line number") {
  std::istringstream in(
      R"({"dialogue_id":"d1","speaker":"p","role":"patient","start_s":0,"end_s":1}
not json)");
  try {
    parse_turn_records(in);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.status() == Status::ParseError);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("parse: unknown role is a validation error") {
  std::istringstream in(
      R"({"dialogue_id":"d1","speaker":"p","role":"nurse","start_s":0,"end_s":1})");
  CHECK_THROWS_AS(parse_turn_records(in), Error);
}

TEST_CASE("parse: non-contiguous dialogue ids are rejected") {
  std::istringstream in(
      R"({"dialogue_id":"a","speaker":"p","role":"patient","start_s":0,"end_s":1}
{"dialogue_id":"b","speaker":"p","role":"patient","start_s":0,"end_s":1}
{"dialogue_id":"a","speaker":"i","role":"other","start_s":1,"end_s":2})");
  CHECK_THROWS_AS(parse_turn_records(in), Error);
}

TEST_CASE("labels csv applies and rejects unknown ids") {
  std::istringstream in(
      R"({"dialogue_id":"d1","speaker":"p","role":"patient","start_s":0,"end_s":1}
{"dialogue_id":"d1","speaker":"i","role":"other","start_s":1,"end_s":2})");
  auto dialogues = parse_turn_records(in);
  std::istringstream labels("dialogue_id,label\nd1,ad\n");
  apply_labels_csv(dialogues, labels);
  CHECK(dialogues[0].label == ClassLabel::AD);

  std::istringstream bad("nope,ad\n");
  CHECK_THROWS_AS(apply_labels_csv(dialogues, bad), Error);
}

TEST_CASE("segment: single-speaker gap is a pause") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 2), turn("p", Role::Patient, 3, 5)});
  auto segs = segment_events(d);
  std::vector<EventSegment> want{{VocState::PatientSpeech, 0, 2},
                                 {VocState::Pause, 2, 3},
                                 {VocState::PatientSpeech, 3, 5}};
  check_same_segments(segs, want);
}

TEST_CASE("segment: speaker change across a gap is a switching pause") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 2), turn("i", Role::Other, 3, 5)});
  auto segs = segment_events(d);
  std::vector<EventSegment> want{{VocState::PatientSpeech, 0, 2},
                                 {VocState::SwitchingPause, 2, 3},
                                 {VocState::OtherSpeech, 3, 5}};
  check_same_segments(segs, want);
}

TEST_CASE("segment: overlap becomes joint talk") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 4), turn("i", Role::Other, 2, 6)});
  auto segs = segment_events(d);
  std::vector<EventSegment> want{{VocState::PatientSpeech, 0, 2},
                                 {VocState::JointTalk, 2, 4},
                                 {VocState::OtherSpeech, 4, 6}};
  check_same_segments(segs, want);
  check_same_segments(segs, oracles::tick_sweep_segments(d, kDefaultMinEventSeconds));
}

TEST_CASE("segment: silence after joint talk classified by last single speaker") {
  // p holds the floor, i interjects entirely inside p's turn, then p resumes
  // after a gap: pause. If i resumes instead: switching pause.
  Dialogue d1 = make_dialogue({turn("p", Role::Patient, 0, 4), turn("i", Role::Other, 3, 4),
                               turn("p", Role::Patient, 5, 6)});
  auto segs1 = segment_events(d1);
  REQUIRE(segs1.size() == 4);
  CHECK(segs1[1].state == VocState::JointTalk);
  CHECK(segs1[2].state == VocState::Pause);

  Dialogue d2 = make_dialogue({turn("p", Role::Patient, 0, 4), turn("i", Role::Other, 3, 4),
                               turn("i", Role::Other, 5, 6)});
  auto segs2 = segment_events(d2);
  REQUIRE(segs2.size() == 4);
  CHECK(segs2[2].state == VocState::SwitchingPause);
}

TEST_CASE("segment: two distinct other speakers across a gap switch the floor") {
  Dialogue d = make_dialogue({turn("a", Role::Other, 0, 2), turn("b", Role::Other, 3, 5),
                              turn("p", Role::Patient, 6, 7)});
  auto segs = segment_events(d);
  REQUIRE(segs.size() == 5);
  CHECK(segs[0].state == VocState::OtherSpeech);
  CHECK(segs[1].state == VocState::SwitchingPause);  // a -> b, same state, new speaker
  CHECK(segs[2].state == VocState::OtherSpeech);
}

TEST_CASE("segment: segments shorter than min_event_s merge into the predecessor") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 2), turn("p", Role::Patient, 2.02, 4),
                              turn("i", Role::Other, 5, 6)});
  auto segs = segment_events(d, 0.05);
  // The 20 ms pause disappears into the first patient segment.
  REQUIRE(segs.size() == 3);
  CHECK(segs[0].state == VocState::PatientSpeech);
  CHECK(segs[0].end_s == doctest::Approx(4.0));
  CHECK(segs[1].state == VocState::SwitchingPause);
}

TEST_CASE("segment: zero turns is an empty-input error") {
  Dialogue d;
  d.dialogue_id = "empty";
  CHECK_THROWS_AS(segment_events(d), Error);
}

TEST_CASE("segment: random dialogues match the tick-sweep oracle") {
  Rng rng(20240901);
  for (int i = 0; i < 100; ++i) {
    Dialogue d = oracles::random_ms_dialogue(rng);
    CAPTURE(i);
    auto got = segment_events(d);
    auto want = oracles::tick_sweep_segments(d, kDefaultMinEventSeconds);
    check_same_segments(got, want);
    validate_segments(got);
  }
}

TEST_CASE("segment: coverage invariant from first onset to last offset") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    Dialogue d = oracles::random_ms_dialogue(rng);
    auto segs = segment_events(d);
    double first = d.turns.front().start_s;
    double last = 0;
    for (const TurnRecord& t : d.turns) last = std::max(last, t.end_s);
    CHECK(std::abs(segs.front().start_s - first) <= 1e-9);
    CHECK(std::abs(segs.back().end_s - last) <= 1e-9);
    validate_segments(segs);
  }
}

TEST_CASE("segment: adding a non-overlapping turn only changes the affected range") {
  Rng rng(99);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 40; ++i) {
    Dialogue d = oracles::random_ms_dialogue(rng);
    auto before = segment_events(d);

    // Find a silence segment wide enough to hold a new turn with margins.
    const EventSegment* gap = nullptr;
    for (const EventSegment& s : before) {
      if ((s.state == VocState::Pause || s.state == VocState::SwitchingPause) &&
          s.duration() > 0.4) {
        gap = &s;
        break;
      }
    }
    if (gap == nullptr) continue;
    ++tested;

    const double w_lo = gap->start_s;
    const double w_hi = gap->end_s;
    Dialogue d2 = d;
    TurnRecord extra;
    extra.speaker_id = "X";
    extra.role = Role::Other;
    extra.start_s = std::round((w_lo + 0.1) * 1000.0) / 1000.0;
    extra.end_s = std::round((w_hi - 0.1) * 1000.0) / 1000.0;
    d2.turns.push_back(extra);
    std::stable_sort(d2.turns.begin(), d2.turns.end(),
                     [](const TurnRecord& a, const TurnRecord& b) { return a.start_s < b.start_s; });
    auto after = segment_events(d2);

    // States at probe instants outside the affected window must be unchanged;
    // exclude any segment (old or new) that touches the gap.
    auto state_at = [](const std::vector<EventSegment>& segs, double t) {
      for (const EventSegment& s : segs)
        if (s.start_s <= t && t < s.end_s) return s.state;
      return segs.back().state;
    };
    auto touches_gap = [&](const std::vector<EventSegment>& segs, double t) {
      for (const EventSegment& s : segs)
        if (s.start_s <= t && t < s.end_s) return s.end_s > w_lo && s.start_s < w_hi;
      return true;
    };
    for (double t = before.front().start_s + 0.0005; t < before.back().end_s; t += 0.1) {
      if (t >= w_lo - 1e-9 && t <= w_hi + 1e-9) continue;
      if (touches_gap(before, t) || touches_gap(after, t)) continue;
      CAPTURE(t);
      CHECK(state_at(before, t) == state_at(after, t));
    }
  }
  CHECK(tested >= 10);
}

TEST_CASE("stats: single patient turn gives its duration and 120 wpm") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 10, 20), turn("i", Role::Other, 10, 11)});
  d.label = ClassLabel::AD;
  std::vector<Dialogue> corpus{d};
  TurnStatsReport r = descriptive_stats(corpus);
  REQUIRE(r.ad.has_value());
  CHECK_FALSE(r.nonad.has_value());
  CHECK(r.ad->avg_turn_duration_s == doctest::Approx(10.0));
  CHECK(r.ad->total_turn_duration_s == doctest::Approx(10.0));
  CHECK(r.ad->avg_words_per_minute == doctest::Approx(120.0));
  CHECK(r.ad->dialogue_duration_s == doctest::Approx(11.0));
}

TEST_CASE("stats: empty class renders as absent, not zero") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 10, 20), turn("i", Role::Other, 10, 11)});
  d.label = ClassLabel::NonAD;
  std::vector<Dialogue> corpus{d};
  std::string csv = turn_stats_csv(descriptive_stats(corpus));
  // nonad column filled, ad column empty
  CHECK(csv.find("Avg turn duration,10,\n") != std::string::npos);
}

TEST_CASE("stats: unlabeled dialogue is a validation error") {
  Dialogue d = make_dialogue({turn("p", Role::Patient, 0, 10), turn("i", Role::Other, 10, 11)});
  std::vector<Dialogue> corpus{d};
  CHECK_THROWS_AS(descriptive_stats(corpus), Error);
}

TEST_CASE("stats: totals agree with an independent re-summation") {
  Rng rng(31337);
  std::vector<Dialogue> corpus;
  for (int i = 0; i < 20; ++i) {
    Dialogue d = oracles::random_ms_dialogue(rng);
    d.dialogue_id = "d" + std::to_string(i);
    d.label = i % 2 == 0 ? ClassLabel::AD : ClassLabel::NonAD;
    corpus.push_back(d);
  }
  TurnStatsReport r = descriptive_stats(corpus);

  for (ClassLabel cls : {ClassLabel::AD, ClassLabel::NonAD}) {
    double turn_total = 0;
    double dialogue_total = 0;
    double words_total = 0;
    int n = 0;
    for (const Dialogue& d : corpus) {
      if (d.label != cls) continue;
      ++n;
      double first = d.turns.front().start_s, last = 0;
      for (const TurnRecord& t : d.turns) {
        first = std::min(first, t.start_s);
        last = std::max(last, t.end_s);
        if (t.role == Role::Patient) {
          turn_total += t.end_s - t.start_s;
          if (t.word_count) words_total += static_cast<double>(*t.word_count);
        }
      }
      dialogue_total += last - first;
    }
    const ClassTurnStats& s = cls == ClassLabel::AD ? *r.ad : *r.nonad;
    CHECK(s.n_dialogues == n);
    CHECK(s.total_turn_duration_s == doctest::Approx(turn_total));
    CHECK(s.dialogue_duration_s == doctest::Approx(dialogue_total));
    CHECK(s.total_word_count == doctest::Approx(words_total));
    CHECK(s.avg_turn_duration_s == doctest::Approx(turn_total / n));
    CHECK(s.normalised_total_turn_duration ==
          doctest::Approx(kNormalisedDurationScale * turn_total / dialogue_total));
  }
}

TEST_CASE("jsonl round trip preserves dialogues") {
  Rng rng(5150);
  std::vector<Dialogue> corpus;
  for (int i = 0; i < 5; ++i) {
    Dialogue d = oracles::random_ms_dialogue(rng);
    d.dialogue_id = "d" + std::to_string(i);
    d.label = ClassLabel::AD;
    corpus.push_back(d);
  }
  std::string jsonl = dialogues_to_jsonl(corpus);
  std::istringstream in(jsonl);
  auto parsed = parse_turn_records(in);
  REQUIRE(parsed.size() == corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    REQUIRE(parsed[i].turns.size() == corpus[i].turns.size());
    for (size_t t = 0; t < corpus[i].turns.size(); ++t) {
      CHECK(parsed[i].turns[t].start_s == corpus[i].turns[t].start_s);
      CHECK(parsed[i].turns[t].end_s == corpus[i].turns[t].end_s);
      CHECK(parsed[i].turns[t].speaker_id == corpus[i].turns[t].speaker_id);
      CHECK(parsed[i].turns[t].word_count == corpus[i].turns[t].word_count);
    }
  }
}

TEST_SUITE_END();
