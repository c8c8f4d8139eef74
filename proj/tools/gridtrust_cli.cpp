#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <typeinfo>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridtrust/agg/secure_agg.hpp"
#include "gridtrust/bls/bls.hpp"
#include "gridtrust/crypto/params.hpp"
#include "gridtrust/errors.hpp"
#include "gridtrust/ledger/consensus.hpp"
#include "gridtrust/sim/pipeline.hpp"

namespace gt = gridtrust;
using ojson = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gt::ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gt::Error("cannot write " + path);
  out << text;
  if (!out) throw gt::Error("write failed for " + path);
}

std::string error_kind(const gt::Error& e) {
  if (dynamic_cast<const gt::ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const gt::DecodeError*>(&e)) return "DecodeError";
  if (dynamic_cast<const gt::RangeError*>(&e)) return "RangeError";
  if (dynamic_cast<const gt::TopologyError*>(&e)) return "TopologyError";
  if (dynamic_cast<const gt::DlogNotFound*>(&e)) return "DlogNotFound";
  if (dynamic_cast<const gt::ShapeError*>(&e)) return "ShapeError";
  if (dynamic_cast<const gt::SignatureError*>(&e)) return "SignatureError";
  if (dynamic_cast<const gt::StaleTimestamp*>(&e)) return "StaleTimestamp";
  if (dynamic_cast<const gt::EmptyInput*>(&e)) return "EmptyInput";
  if (dynamic_cast<const gt::NoCandidate*>(&e)) return "NoCandidate";
  if (dynamic_cast<const gt::NonFiniteError*>(&e)) return "NonFiniteError";
  if (dynamic_cast<const gt::InsufficientHistory*>(&e)) return "InsufficientHistory";
  if (dynamic_cast<const gt::LengthMismatch*>(&e)) return "LengthMismatch";
  if (dynamic_cast<const gt::MisuseError*>(&e)) return "MisuseError";
  return "Error";
}

std::string chain_path(const std::string& report_path, std::size_t area) {
  return report_path + ".area" + std::to_string(area) + ".chain.json";
}

int cmd_keygen(std::size_t meters, std::uint64_t seed) {
  gt::Rng rng(seed);
  ojson doc;
  doc["params"] = ojson::parse(gt::crypto::SystemParams::standard().to_text());
  ojson keys = ojson::array();
  for (std::size_t i = 0; i < meters; ++i) {
    const auto sec = gt::agg::generate_meter_secret(rng);
    ojson k;
    k["meter"] = i + 1;
    k["x"] = gt::to_hex(gt::crypto::scalar_to_bytes(sec.x));
    k["s0"] = gt::to_hex(gt::crypto::scalar_to_bytes(sec.s[0]));
    k["s1"] = gt::to_hex(gt::crypto::scalar_to_bytes(sec.s[1]));
    k["pk"] = gt::to_hex(gt::bls::verify_key(gt::bls::SigningKey{sec.x}).to_bytes());
    k["ka_pub"] = gt::to_hex(gt::agg::ka_public(sec.x).to_bytes());
    keys.push_back(k);
  }
  doc["meters"] = keys;
  std::cout << doc.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out) {
  auto cfg = gt::sim::load_config(config);
  if (seed) cfg.seed = *seed;
  const auto report = gt::sim::run_period(cfg);
  write_file(out, gt::sim::report_to_text(report));
  for (const auto& a : report.areas) {
    if (!a.chain.empty()) write_file(chain_path(out, a.area), gt::ledger::chain_to_text(a.chain));
  }
  for (const auto& a : report.areas) {
    std::size_t flagged = 0, judged = 0;
    for (const auto& d : a.days) {
      if (!d.verdict) continue;
      ++judged;
      flagged += *d.verdict == gt::sim::Verdict::kTheft ? 1 : 0;
    }
    std::size_t theft_meters = 0;
    for (const auto& d : a.detections) theft_meters += d.theft ? 1 : 0;
    std::cout << "area " << a.area << ": " << a.meters.size() << " meters, " << judged << " judged days, " << flagged
              << " flagged, " << theft_meters << " meter-days classified as theft, " << a.chain.size()
              << " blocks (" << (a.chain_valid ? "valid" : "INVALID") << ")\n";
  }
  return 0;
}

int cmd_detect(const std::string& chain_file, const std::string& weights_file) {
  const auto chain = gt::ledger::chain_from_text(read_file(chain_file));
  const auto weights = gt::detect::load_weights(weights_file);
  const auto found = gt::sim::detect_chain(chain, weights);
  std::cout << "date,meter_id,p_theft,verdict\n";
  for (const auto& d : found) {
    char p[32];
    std::snprintf(p, sizeof p, "%.6f", d.inference.probs[1]);
    std::cout << d.date << "," << d.meter_id << "," << p << "," << (d.inference.theft() ? "theft" : "honest") << "\n";
  }
  return 0;
}

int cmd_judge(const std::string& report_file) {
  const auto rows = gt::sim::rejudge_report(read_file(report_file));
  std::size_t mismatches = 0;
  std::cout << "area,date,stored,recomputed\n";
  for (const auto& r : rows) {
    auto name = [](gt::sim::Verdict v) { return v == gt::sim::Verdict::kTheft ? "theft" : "clear"; };
    std::cout << r.area << "," << r.date << "," << name(r.stored) << "," << name(r.recomputed) << "\n";
    mismatches += r.stored == r.recomputed ? 0 : 1;
  }
  if (mismatches != 0) {
    std::cerr << "error: " << mismatches << " stored verdicts differ from the recomputed ones\n";
    return 3;
  }
  return 0;
}

int cmd_bench(std::size_t lo, std::size_t hi, std::size_t step, std::size_t trials, std::uint64_t seed) {
  if (step == 0 || lo == 0 || hi < lo) throw gt::MisuseError("bench-block needs 0 < min <= max and step > 0");
  std::vector<std::size_t> counts;
  for (std::size_t n = lo; n <= hi; n += step) counts.push_back(n);
  const auto rows = gt::ledger::bench_block_time(counts, trials, seed);
  std::cout << "meters  mean_seconds  cv\n";
  for (const auto& r : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%6zu  %12.6f  %.4f\n", r.meters, r.mean_seconds, r.cv);
    std::cout << line;
  }
  return 0;
}

int cmd_probe(int scenario, const std::string& stage, std::size_t meters, double p_sm, double p_c, double p_k,
              double p_mn) {
  gt::sim::AttackStage st;
  if (stage == "pre") st = gt::sim::AttackStage::kPre;
  else if (stage == "transit") st = gt::sim::AttackStage::kTransit;
  else if (stage == "received") st = gt::sim::AttackStage::kReceived;
  else throw gt::MisuseError("unknown stage '" + stage + "'");
  const auto params = gt::sim::AttackProbabilityParams::uniform(meters, p_sm, p_c, p_k, p_mn);
  const double p = gt::sim::attack_success_probability(static_cast<gt::sim::AttackScenario>(scenario), st, params);
  char line[64];
  std::snprintf(line, sizeof line, "%.17g\n", p);
  std::cout << line;
  return 0;
}

int cmd_gen_weights(std::size_t d, std::size_t n, std::size_t units, std::size_t layers, std::uint64_t seed,
                    const std::string& out) {
  gt::Rng rng(seed);
  write_file(out, gt::detect::weights_to_text(gt::detect::random_weights(d, n, units, layers, rng)));
  return 0;
}

int cmd_synth(std::size_t meters, std::size_t days, const std::string& start, std::size_t slots, std::uint64_t seed,
              const std::string& out) {
  gt::Rng rng(seed);
  const auto series = gt::sim::synthesize_readings(meters, days, start, slots, rng);
  std::ofstream f(out, std::ios::binary);
  if (!f) throw gt::Error("cannot write " + out);
  gt::sim::write_readings(f, series);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving energy theft detection toolkit"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* keygen = app.add_subcommand("keygen", "Print system parameters and fresh meter keys");
  std::size_t kg_meters = 3;
  std::uint64_t kg_seed = 1;
  keygen->add_option("--meters", kg_meters, "Number of meters")->check(CLI::Range(1, 100000));
  keygen->add_option("--seed", kg_seed, "RNG seed")->required();

  auto* simulate = app.add_subcommand("simulate", "Run the full reporting, ledger and detection pipeline");
  std::string sim_config, sim_out;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--config", sim_config, "Config file (JSON)")->required();
  simulate->add_option("--seed", sim_seed, "Seed; overrides the config's seed");
  simulate->add_option("--out", sim_out, "Report path; chains are written next to it")->required();

  auto* detect = app.add_subcommand("detect", "Classify every meter-day stored on a chain");
  std::string det_chain, det_weights;
  detect->add_option("--chain", det_chain, "Chain file")->required();
  detect->add_option("--weights", det_weights, "Weight file")->required();

  auto* judge = app.add_subcommand("judge", "Recompute the theft verdicts of a report");
  std::string judge_report;
  judge->add_option("--report", judge_report, "Report file")->required();

  auto* bench = app.add_subcommand("bench-block", "Time block creation against the number of meters");
  std::size_t b_min = 50, b_max = 300, b_step = 50, b_trials = 5;
  std::uint64_t b_seed = 1;
  bench->add_option("--min", b_min, "Smallest meter count");
  bench->add_option("--max", b_max, "Largest meter count");
  bench->add_option("--step", b_step, "Step");
  bench->add_option("--trials", b_trials, "Trials per size");
  bench->add_option("--seed", b_seed, "RNG seed");

  auto* probe = app.add_subcommand("probe", "Success probability of an attack on the reporting path");
  int p_scenario = 1;
  std::string p_stage;
  std::size_t p_meters = 1;
  double p_sm = 0.5, p_c = 0.5, p_k = 0.5, p_mn = 0.5;
  probe->add_option("--scenario", p_scenario, "1 destroy, 2 tamper")->required()->check(CLI::IsMember({1, 2}));
  probe->add_option("--stage", p_stage, "pre, transit or received")
      ->required()
      ->check(CLI::IsMember({"pre", "transit", "received"}));
  probe->add_option("--meters", p_meters, "Meters the adversary must compromise");
  probe->add_option("--p-sm", p_sm, "Per-meter probability of hacking the meter");
  probe->add_option("--p-c", p_c, "Per-meter probability of hacking the channel");
  probe->add_option("--p-k", p_k, "Per-meter probability of obtaining the signing key");
  probe->add_option("--p-mn", p_mn, "Probability of hacking the mining node");

  auto* genw = app.add_subcommand("gen-weights", "Write a seeded random weight file");
  std::size_t g_d = 48, g_n = 10, g_units = 300, g_layers = 2;
  std::uint64_t g_seed = 1;
  std::string g_out;
  genw->add_option("--d", g_d, "Readings per day");
  genw->add_option("--n", g_n, "First-layer width");
  genw->add_option("--units", g_units, "LSTM units");
  genw->add_option("--layers", g_layers, "LSTM layers");
  genw->add_option("--seed", g_seed, "RNG seed");
  genw->add_option("--out", g_out, "Output path")->required();

  auto* synth = app.add_subcommand("synth-readings", "Write a synthetic readings CSV");
  std::size_t s_meters = 5, s_days = 7, s_slots = 48;
  std::string s_start = "2009-07-15", s_out;
  std::uint64_t s_seed = 1;
  synth->add_option("--meters", s_meters, "Meters");
  synth->add_option("--days", s_days, "Days");
  synth->add_option("--start", s_start, "First date, YYYY-MM-DD");
  synth->add_option("--slots", s_slots, "Readings per day");
  synth->add_option("--seed", s_seed, "RNG seed");
  synth->add_option("--out", s_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors print help and exit 1; module errors exit 2.
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*keygen) return cmd_keygen(kg_meters, kg_seed);
    if (*simulate) return cmd_simulate(sim_config, sim_seed, sim_out);
    if (*detect) return cmd_detect(det_chain, det_weights);
    if (*judge) return cmd_judge(judge_report);
    if (*bench) return cmd_bench(b_min, b_max, b_step, b_trials, b_seed);
    if (*probe) return cmd_probe(p_scenario, p_stage, p_meters, p_sm, p_c, p_k, p_mn);
    if (*genw) return cmd_gen_weights(g_d, g_n, g_units, g_layers, g_seed, g_out);
    if (*synth) return cmd_synth(s_meters, s_days, s_start, s_slots, s_seed, s_out);
  } catch (const gt::Error& e) {
    std::cerr << "error: " << error_kind(e) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
