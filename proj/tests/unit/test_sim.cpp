#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gridtrust/errors.hpp"
#include "gridtrust/sim/accounting.hpp"
#include "gridtrust/sim/attacks.hpp"
#include "gridtrust/sim/judge.hpp"
#include "gridtrust/sim/readings.hpp"
#include "test_util.hpp"

using namespace gridtrust;
using namespace gridtrust::sim;

namespace {

std::string csv_header(std::size_t slots) {
  std::string h = "meter_id,date";
  for (std::size_t t = 1; t <= slots; ++t) h += ",r" + std::to_string(t);
  return h + "\n";
}

std::string csv_row(const std::string& id, const std::string& date, std::size_t slots, const std::string& value) {
  std::string r = id + "," + date;
  for (std::size_t t = 0; t < slots; ++t) r += "," + value;
  return r + "\n";
}

std::vector<ReadingSeries> parse(const std::string& text, std::size_t slots = 48) {
  std::istringstream in(text);
  return parse_readings(in, slots);
}

AttackSpec spec_from_json(const nlohmann::json& j) {
  AttackSpec s;
  s.kind = attack_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("alpha")) s.alpha = std::stod(j["alpha"].get<std::string>());
  if (j.contains("beta"))
    for (const auto& b : j["beta"]) s.beta.push_back(std::stod(b.get<std::string>()));
  if (j.contains("ts")) s.ts = j["ts"].get<int>();
  if (j.contains("te")) s.te = j["te"].get<int>();
  return s;
}

std::int64_t total(const ReadingSeries& s) { return std::accumulate(s.readings.begin(), s.readings.end(), std::int64_t{0}); }

}  // namespace

TEST(Readings, BundledSampleHasFiveMeterDays) {
  const auto series = load_readings(testutil::fixture_path("sample_5m.csv"));
  ASSERT_EQ(series.size(), 5U);
  for (const auto& s : series) EXPECT_EQ(s.readings.size(), 48U);
}

TEST(Readings, ParsesExactDecimals) {
  const auto s = parse(csv_header(2) + "7,2009-07-15,1.5,0.001\n8,2009-07-16,65,0\n", 2);
  ASSERT_EQ(s.size(), 2U);
  EXPECT_EQ(s[0].meter_id, 7U);
  EXPECT_EQ(s[0].date, "2009-07-15");
  EXPECT_EQ(s[0].readings, (std::vector<std::int64_t>{1500, 1}));
  EXPECT_EQ(s[1].readings, (std::vector<std::int64_t>{65000, 0}));
}

TEST(Readings, RejectsMalformedRows) {
  std::string short_row = "1,2009-07-15";
  for (int t = 0; t < 47; ++t) short_row += ",0.1";
  try {
    parse(csv_header(48) + csv_row("1", "2009-07-15", 48, "0.1") + short_row + "\n");
    FAIL() << "47 readings accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3U);
  }
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-07-15", 48, "-0.1")), RangeError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-07-15", 48, "65.001")), RangeError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-07-15", 48, "abc")), ParseError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-07-15", 48, "0.0001")), ParseError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("x", "2009-07-15", 48, "0.1")), ParseError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-13-15", 48, "0.1")), ParseError);
  EXPECT_THROW(parse(csv_header(48) + csv_row("1", "2009-02-30", 48, "0.1")), ParseError);
  EXPECT_THROW(parse("meter,date\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(load_readings("/nonexistent/readings.csv"), ParseError);
}

TEST(Readings, WriteParseRoundTrip) {
  Rng rng(1);
  const auto series = synthesize_readings(3, 2, "2009-12-31", 48, rng);
  ASSERT_EQ(series.size(), 6U);
  EXPECT_EQ(series[0].meter_id, 1U);
  EXPECT_EQ(series[3].date, "2010-01-01");
  std::ostringstream out;
  write_readings(out, series);
  EXPECT_EQ(parse(out.str()), series);
}

TEST(Readings, SyntheticLoadIsDeterministicAndInRange) {
  Rng a(9), b(9);
  const auto x = synthesize_readings(4, 3, "2009-07-15", 48, a);
  EXPECT_EQ(x, synthesize_readings(4, 3, "2009-07-15", 48, b));
  for (const auto& s : x)
    for (auto r : s.readings) {
      EXPECT_GE(r, 0);
      EXPECT_LE(r, 65000);
    }
}

TEST(Readings, Calendar) {
  EXPECT_EQ(add_days("2009-02-28", 1), "2009-03-01");
  EXPECT_EQ(add_days("2008-02-28", 1), "2008-02-29");
  EXPECT_EQ(add_days("2009-12-31", 1), "2010-01-01");
  EXPECT_EQ(add_days("2010-01-01", -1), "2009-12-31");
  EXPECT_EQ(slot_label("2009-07-15", 0), "2009-07-15T00:00");
  EXPECT_EQ(slot_label("2009-07-15", 1), "2009-07-15T00:30");
  EXPECT_EQ(slot_label("2009-07-15", 47), "2009-07-15T23:30");
  EXPECT_EQ(slot_label("2009-07-15", 23, 24), "2009-07-15T23:00");
}

TEST(Attacks, MatchIndependentReferenceExactly) {
  const auto golden = testutil::load_fixture("attack_golden.json");
  const auto parsed = load_readings(testutil::fixture_path("attack_fixture.csv"));
  ASSERT_EQ(parsed.size(), golden["series"].size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    EXPECT_EQ(parsed[i].readings, golden["series"][i]["readings"].get<std::vector<std::int64_t>>());
  }
  std::size_t checked = 0;
  for (const auto& c : golden["cases"]) {
    const auto id = c["meter_id"].get<std::uint32_t>();
    const auto date = c["date"].get<std::string>();
    const auto it = std::find_if(parsed.begin(), parsed.end(),
                                 [&](const ReadingSeries& s) { return s.meter_id == id && s.date == date; });
    ASSERT_NE(it, parsed.end());
    const auto out = apply_attack(spec_from_json(c["spec"]), *it);
    EXPECT_EQ(out.readings, c["expected"].get<std::vector<std::int64_t>>()) << c["spec"].dump();
    ++checked;
  }
  EXPECT_EQ(checked, 110U);
}

TEST(Attacks, WorkedExamples) {
  ReadingSeries x{1, "2009-07-15", {}};
  for (int t = 1; t <= 48; ++t) x.readings.push_back(2000 * t % 60000);
  AttackSpec f1{AttackKind::kF1, 0.5, {}, 0, 0};
  const auto y = apply_attack(f1, x);
  for (std::size_t t = 0; t < 48; ++t) EXPECT_EQ(y.readings[t], x.readings[t] / 2);

  ReadingSeries ramp{1, "2009-07-15", {}};
  for (int t = 1; t <= 48; ++t) ramp.readings.push_back(1000 * t);
  const auto f3 = apply_attack({AttackKind::kF3, 0, {}, 0, 0}, ramp);
  for (auto r : f3.readings) EXPECT_EQ(r, 24500);

  const auto f6 = apply_attack({AttackKind::kF6, 0, {}, 10, 20}, ramp);
  for (int t = 1; t <= 48; ++t) {
    EXPECT_EQ(f6.readings[t - 1], (t >= 11 && t <= 19) ? 0 : ramp.readings[t - 1]) << t;
  }
  const auto f5 = apply_attack({AttackKind::kF5, 0, {}, 0, 0}, ramp);
  EXPECT_EQ(f5.readings.front(), 48000);
  EXPECT_EQ(f5.readings.back(), 1000);
  EXPECT_THROW(apply_attack({AttackKind::kF2, 0, {0.5}, 0, 0}, ramp), ShapeError);
}

TEST(Attacks, RandomParametersAndStructuralProperties) {
  Rng rng(3);
  const auto days = synthesize_readings(10, 5, "2009-07-15", 48, rng);
  for (int k = 1; k <= 6; ++k) {
    const auto kind = static_cast<AttackKind>(k);
    EXPECT_EQ(attack_kind_from_string(to_string(kind)), kind);
    for (const auto& x : days) {
      const auto spec = random_attack_spec(kind, 48, rng);
      if (kind == AttackKind::kF1) EXPECT_TRUE(spec.alpha > 0.1 && spec.alpha < 0.8);
      for (double b : spec.beta) EXPECT_TRUE(b > 0.1 && b < 0.8);
      if (kind == AttackKind::kF6) {
        EXPECT_GE(spec.ts, 0);
        EXPECT_LE(spec.ts, 42);
        EXPECT_GE(spec.te - spec.ts, 6);
        EXPECT_LE(spec.te - spec.ts, 48);
      }
      const auto y = apply_attack(spec, x);
      switch (kind) {
        case AttackKind::kF1:
        case AttackKind::kF2:
        case AttackKind::kF6:
          for (std::size_t t = 0; t < 48; ++t) EXPECT_LE(y.readings[t], x.readings[t]);
          break;
        case AttackKind::kF3:
          EXPECT_LE(std::llabs(total(y) - total(x)), 24);
          break;
        case AttackKind::kF4:
          EXPECT_LE(total(y), std::llround(0.8 * static_cast<double>(total(x))) + 24);
          break;
        case AttackKind::kF5: {
          auto a = x.readings, b = y.readings;
          std::sort(a.begin(), a.end());
          std::sort(b.begin(), b.end());
          EXPECT_EQ(a, b);
          EXPECT_EQ(total(y), total(x));
          break;
        }
      }
    }
  }
  EXPECT_THROW(attack_kind_from_string("f7"), ParseError);
  EXPECT_THROW(attack_kind_from_string("F1"), ParseError);
}

TEST(Judgement, StrictInequality) {
  EXPECT_EQ(judge_area({100, 90, 5, 2}), Verdict::kTheft);
  EXPECT_EQ(judge_area({100, 95, 5, 2}), Verdict::kClear);
  EXPECT_EQ(judge_area({97, 90, 5, 2}), Verdict::kClear);
  EXPECT_EQ(judge_area({97.000001, 90, 5, 2}), Verdict::kTheft);
}

TEST(Judgement, TechnicalLossEstimator) {
  std::vector<std::pair<double, double>> constant;
  for (int i = 0; i < 7; ++i) constant.emplace_back(100.0 + i, 95.0 + i);
  const auto c = estimate_technical_loss(constant);
  EXPECT_DOUBLE_EQ(c.e_tl, 5.0);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.0);

  const std::vector<std::pair<double, double>> three{{14, 10}, {15, 10}, {16, 10}};
  EXPECT_THROW(estimate_technical_loss(three), InsufficientHistory);
  const auto t = estimate_technical_loss(three, 3);
  EXPECT_DOUBLE_EQ(t.e_tl, 5.0);
  EXPECT_DOUBLE_EQ(t.epsilon, 3.0);  // sample sd of {4, 5, 6} is 1

  std::vector<std::pair<double, double>> seven;
  for (int g = 1; g <= 7; ++g) seven.emplace_back(g, 0);
  const auto s = estimate_technical_loss(seven);
  EXPECT_DOUBLE_EQ(s.e_tl, 4.0);
  EXPECT_NEAR(s.epsilon, 3.0 * std::sqrt(28.0 / 6.0), 1e-12);
  EXPECT_THROW(estimate_technical_loss(std::span(seven).first(2)), InsufficientHistory);
}

TEST(AttackProbability, ProductFormulas) {
  EXPECT_NEAR(attack_success_probability(AttackScenario::kDestroy, AttackStage::kPre,
                                         AttackProbabilityParams::uniform(3, 0.1, 0.5, 0.5, 0.2)),
              0.001, 1e-15);
  EXPECT_DOUBLE_EQ(attack_success_probability(AttackScenario::kDestroy, AttackStage::kReceived,
                                              AttackProbabilityParams::uniform(3, 0.1, 0.5, 0.5, 0.2)),
                   0.2);
  EXPECT_DOUBLE_EQ(attack_success_probability(AttackScenario::kTamper, AttackStage::kTransit,
                                              AttackProbabilityParams::uniform(2, 0.3, 0.5, 0.5, 0.2)),
                   0.0625);
  AttackProbabilityParams p{{0.5, 0.2}, {0.3, 0.4}, {0.9, 0.1}, 0.7};
  EXPECT_DOUBLE_EQ(attack_success_probability(AttackScenario::kDestroy, AttackStage::kTransit, p), 0.3 * 0.4);
  EXPECT_DOUBLE_EQ(attack_success_probability(AttackScenario::kTamper, AttackStage::kPre, p), 0.5 * 0.2 * 0.9 * 0.1);
  EXPECT_DOUBLE_EQ(attack_success_probability(AttackScenario::kTamper, AttackStage::kReceived, p),
                   0.5 * 0.2 * 0.9 * 0.1);
  p.p_k.pop_back();
  EXPECT_THROW(attack_success_probability(AttackScenario::kTamper, AttackStage::kPre, p), RangeError);
  EXPECT_THROW(attack_success_probability(AttackScenario::kDestroy, AttackStage::kPre,
                                          AttackProbabilityParams::uniform(2, 1.0, 0.5, 0.5, 0.5)),
               RangeError);
  EXPECT_THROW(attack_success_probability(AttackScenario::kDestroy, AttackStage::kReceived,
                                          AttackProbabilityParams::uniform(2, 0.5, 0.5, 0.5, 0.0)),
               RangeError);
}

TEST(Accounting, ExactBytes) {
  EXPECT_EQ(report_size_bytes(10, AccountingMode::kPerReport), (Rational{600, 1}));
  EXPECT_EQ(report_size_bytes(10, AccountingMode::kPerPeriod), (Rational{625, 3}));
  EXPECT_EQ(report_size_bytes(10, AccountingMode::kPerPeriod).to_string(), "625/3");
  EXPECT_EQ(report_size_bytes(1, AccountingMode::kPerReport).to_string(), "240");
  EXPECT_EQ(report_size_bytes(12, AccountingMode::kPerPeriod, 48).to_string(), "210");
  EXPECT_THROW(report_size_bytes(0, AccountingMode::kPerReport), MisuseError);
  EXPECT_THROW(report_size_bytes(10, AccountingMode::kPerPeriod, 0), MisuseError);
}
