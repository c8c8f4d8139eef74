#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridtrust/detect/model.hpp"
#include "gridtrust/ledger/block.hpp"
#include "gridtrust/sim/attacks.hpp"
#include "gridtrust/sim/judge.hpp"
#include "gridtrust/sim/readings.hpp"

namespace gridtrust::sim {

struct AttackAssignment {
  std::uint32_t meter_id = 0;
  AttackKind kind = AttackKind::kF1;
  /// Fixed alpha for f1; drawn per day when absent.
  std::optional<double> alpha;
  /// First attacked day, 0-based over the whole run.
  std::size_t start_day = 0;
};

struct ConsensusSettings {
  double quorum_fraction = 2.0 / 3.0;
  int max_retries = 1;
  std::vector<std::uint32_t> byzantine;
  /// Meters that, once elected miner, alter a record after it was signed.
  std::vector<std::uint32_t> tampering_miners;
};

/// Everything a run depends on. The same config and seed give byte-identical
/// reports and chains.
struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t areas = 1;
  std::size_t meters_per_area = 10;
  std::size_t slots = 48;
  std::size_t days = 10;
  /// Leading days treated as honest history for the technical-loss estimate.
  std::size_t history_days = 7;
  std::string start_date = "2009-07-15";
  /// Readings CSV; synthetic households when empty.
  std::string dataset;
  /// Weight file; a seeded random model when empty.
  std::string weights;
  std::size_t model_n = 10;
  std::size_t model_units = 300;
  std::size_t model_lstm_layers = 2;
  /// DTM = true consumption * (1 + loss_rate) + fixed_loss_kwh per slot.
  double loss_rate = 0.03;
  double fixed_loss_kwh = 0.05;
  std::vector<AttackAssignment> attacks;
  ConsensusSettings consensus;
  /// Sign, ledger and vote on every report.
  bool ledger = true;
  /// Run the classifier on every meter of days judged as theft.
  bool detection = true;
  /// Run the classifier on every judged day, not only flagged ones.
  bool detect_all_days = false;
};

/// ParseError for malformed text or unknown keys.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);
std::string config_to_text(const SimConfig& cfg);

struct DayResult {
  std::string date;
  std::vector<std::int64_t> slot_totals;  // decrypted area totals per slot
  std::int64_t e_sum = 0;
  std::int64_t e_dtm = 0;
  bool history = false;
  std::optional<Verdict> verdict;
  /// Decrypted totals equal the sum of the reported readings (simulator-side check).
  bool conservation = true;
};

struct MeterDetection {
  std::string date;
  std::uint32_t meter_id = 0;
  double p_theft = 0;
  bool theft = false;
  bool attacked = false;  // ground truth from the roster
};

struct AreaResult {
  std::size_t area = 0;
  std::vector<std::uint32_t> meters;
  LossEstimate loss;
  std::vector<DayResult> days;
  std::vector<MeterDetection> detections;
  ledger::Chain chain;
  std::size_t rejected_blocks = 0;
  std::vector<std::uint32_t> miners;  // miner per committed block's day, in election order
  bool chain_valid = true;
};

struct PeriodReport {
  SimConfig config;
  std::vector<AreaResult> areas;
  std::size_t report_bytes_measured = 0;
};

/// Runs key setup, reporting, ledger, aggregation, judgement and detection
/// for every area. TopologyError for zero meters; module errors propagate
/// with area context.
PeriodReport run_period(const SimConfig& cfg);

/// Report as structured text (JSON); excludes wall-clock measurements.
std::string report_to_text(const PeriodReport& report);

/// Recomputes verdicts from a report's totals and estimates. ParseError on
/// malformed input.
struct Rejudgement {
  std::size_t area;
  std::string date;
  Verdict stored;
  Verdict recomputed;
};
std::vector<Rejudgement> rejudge_report(const std::string& report_text);

/// Classifies every meter-day found in a chain: functional decryption of the
/// first layer with the DW sets stored on the chain, then the LSTM head.
struct ChainDetection {
  std::string date;
  std::uint32_t meter_id;
  std::vector<std::int64_t> products;
  detect::Inference inference;
};
std::vector<ChainDetection> detect_chain(const ledger::Chain& chain, const detect::ModelWeights& weights);

}  // namespace gridtrust::sim
