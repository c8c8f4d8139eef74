#include "gridtrust/sim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gridtrust/agg/secure_agg.hpp"
#include "gridtrust/errors.hpp"
#include "gridtrust/fe/fe.hpp"
#include "gridtrust/ledger/consensus.hpp"
#include "gridtrust/sim/accounting.hpp"
#include "json.hpp"

namespace gridtrust::sim {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kSecondsPerDay = 86400;

std::string verdict_name(Verdict v) { return v == Verdict::kTheft ? "theft" : "clear"; }

Verdict verdict_from_name(const std::string& s) {
  if (s == "theft") return Verdict::kTheft;
  if (s == "clear") return Verdict::kClear;
  throw ParseError("unknown verdict '" + s + "'");
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ParseError("unknown key '" + k + "' in " + where);
  }
}

// Everything one meter produces for a day.
struct MeterDay {
  std::vector<std::int64_t> true_readings;
  std::vector<std::int64_t> reported;
  bool attacked = false;
  std::vector<fe::CipherReading> ciphers;
  std::optional<fe::DetectionKeySet> keys;
  Bytes dw_bytes;
};

struct Meter {
  std::uint32_t id;
  agg::MeterSecret secret;
  bls::SigningKey sk;
};

// Readings per meter per day: meter index -> day -> encoded slots.
using ReadingTable = std::vector<std::vector<ReadingSeries>>;

ReadingTable readings_for_area(const SimConfig& cfg, std::size_t area, const std::vector<ReadingSeries>& dataset,
                               Rng& rng) {
  const std::size_t m = cfg.meters_per_area;
  ReadingTable table(m);
  if (cfg.dataset.empty()) {
    const auto series = synthesize_readings(m, cfg.days, cfg.start_date, cfg.slots, rng);
    for (const auto& s : series) table[s.meter_id - 1].push_back(s);
    return table;
  }
  std::map<std::uint32_t, std::vector<ReadingSeries>> by_meter;
  for (const auto& s : dataset) by_meter[s.meter_id].push_back(s);
  if (by_meter.size() < (area + 1) * m) {
    throw TopologyError("dataset has " + std::to_string(by_meter.size()) + " meters, area " + std::to_string(area) +
                        " needs " + std::to_string((area + 1) * m));
  }
  auto it = by_meter.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(area * m));
  for (std::size_t i = 0; i < m; ++i, ++it) {
    auto days = it->second;
    std::sort(days.begin(), days.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
    if (days.size() < cfg.days) {
      throw TopologyError("meter " + std::to_string(it->first) + " has " + std::to_string(days.size()) +
                          " days, config needs " + std::to_string(cfg.days));
    }
    days.resize(cfg.days);
    table[i] = std::move(days);
  }
  return table;
}

std::vector<std::int64_t> products_for(const std::vector<fe::CipherReading>& ciphers,
                                       const std::vector<crypto::PlainPoint>& dw, const fe::QuantizedFirstLayer& layer) {
  const std::int64_t bound = fe::inner_product_bound(layer);
  std::vector<std::int64_t> out(layer.n());
  for (std::size_t c = 0; c < layer.n(); ++c) {
    const auto col = layer.column(c);
    out[c] = fe::decrypt_inner_product(ciphers, col, dw[c], bound);
  }
  return out;
}

AreaResult run_area(const SimConfig& cfg, std::size_t area, const std::vector<ReadingSeries>& dataset,
                    const std::optional<detect::ModelWeights>& model, Rng& area_rng, std::size_t& report_bytes) {
  const std::size_t m = cfg.meters_per_area;
  Rng key_rng = area_rng.fork();
  Rng data_rng = area_rng.fork();
  Rng attack_rng = area_rng.fork();
  Rng vote_rng = area_rng.fork();

  AreaResult res;
  res.area = area;
  const ReadingTable readings = readings_for_area(cfg, area, dataset, data_rng);

  // Key generation and secure aggregation of DA.
  std::vector<Meter> meters;
  std::vector<agg::MeterSecret> secrets;
  for (std::size_t i = 0; i < m; ++i) {
    const std::uint32_t id = cfg.dataset.empty() ? static_cast<std::uint32_t>(i + 1) : readings[i].front().meter_id;
    agg::MeterSecret sec = agg::generate_meter_secret(key_rng);
    meters.push_back({id, sec, bls::SigningKey{sec.x}});
    secrets.push_back(sec);
    res.meters.push_back(id);
  }
  const auto shares = agg::simulate_area_shares(res.meters, secrets);
  const crypto::ScalarPair da = agg::aggregate_da(shares, m);

  const std::set<std::uint32_t> byzantine(cfg.consensus.byzantine.begin(), cfg.consensus.byzantine.end());
  const std::set<std::uint32_t> tamperers(cfg.consensus.tampering_miners.begin(), cfg.consensus.tampering_miners.end());
  std::set<std::uint32_t> failures;
  ledger::ChainTip tip;
  ledger::ConsensusConfig ccfg;
  ccfg.quorum_fraction = cfg.consensus.quorum_fraction;
  ccfg.max_retries = cfg.consensus.max_retries;

  std::vector<std::pair<double, double>> history;
  const auto& codec = model ? model->first.codec() : crypto::FixedPointCodec();
  const std::int64_t agg_bound = fe::aggregate_bound(m, codec);

  for (std::size_t day = 0; day < cfg.days; ++day) {
    const std::string date = readings[0][day].date;
    std::vector<fe::TimestampPoints> period;
    period.reserve(cfg.slots);
    for (std::size_t t = 0; t < cfg.slots; ++t) period.push_back(fe::TimestampPoints::derive(slot_label(date, t, cfg.slots)));

    // Meter side: readings (possibly tampered by the consumer), encryption, DW keys.
    std::vector<MeterDay> md(m);
    for (std::size_t i = 0; i < m; ++i) {
      const ReadingSeries& truth = readings[i][day];
      if (truth.readings.size() != cfg.slots) throw ShapeError("reading series length differs from slots");
      md[i].true_readings = truth.readings;
      ReadingSeries reported = truth;
      for (const auto& a : cfg.attacks) {
        if (a.meter_id != meters[i].id || day < a.start_day) continue;
        AttackSpec spec = random_attack_spec(a.kind, cfg.slots, attack_rng);
        if (a.alpha && a.kind == AttackKind::kF1) spec.alpha = *a.alpha;
        reported = apply_attack(spec, reported, codec);
        md[i].attacked = true;
      }
      md[i].reported = reported.readings;
      const auto masks = fe::mask_points(meters[i].secret.s, period);
      md[i].ciphers.reserve(cfg.slots);
      for (std::size_t t = 0; t < cfg.slots; ++t) {
        md[i].ciphers.push_back(fe::encrypt_with_mask(masks[t], md[i].reported[t], codec));
      }
      if (model && (cfg.ledger || cfg.detection)) {
        md[i].keys = fe::gen_detection_keys_from_masks(masks, model->first, period);
        md[i].dw_bytes = ledger::encode_key_set(*md[i].keys);
      }
    }

    // Mining node: one block per slot, voted on by every meter.
    if (cfg.ledger) {
      auto election = ledger::elect_miner(res.meters, day, failures);
      for (std::size_t t = 0; t < cfg.slots; ++t) {
        const std::string label = period[t].label();
        std::vector<ledger::ReportRecord> records;
        std::vector<ledger::Validator> validators;
        for (std::size_t i = 0; i < m; ++i) {
          const auto rep = ledger::make_report(meters[i].sk, md[i].ciphers[t], period[t], md[i].dw_bytes);
          if (report_bytes == 0) report_bytes = rep.serialize().size();
          records.push_back(ledger::to_record(meters[i].id, rep, label));
          validators.push_back({meters[i].id, byzantine.contains(meters[i].id), records.back()});
        }
        std::vector<Bytes> key_sets;
        if (t == 0)
          for (const auto& d : md) key_sets.push_back(d.dw_bytes);
        const std::uint64_t stamp = day * kSecondsPerDay + t * (kSecondsPerDay / cfg.slots);
        for (;;) {
          ledger::Block block;
          if (tamperers.contains(election.miner)) {
            auto altered = records;
            altered.front().cipher[1] ^= 0x01;
            block = ledger::assemble_block(tip.next_height, tip.hash, altered, label, stamp, key_sets);
          } else {
            block = ledger::build_block(tip.next_height, tip.hash, records, label, stamp, key_sets, tip.keys);
          }
          const auto outcome = ledger::consensus_round(block, validators, ccfg, tip, vote_rng);
          if (outcome.committed) {
            res.miners.push_back(election.miner);
            ledger::absorb_key_sets(block, tip.keys);
            tip.next_height = block.height + 1;
            tip.hash = block.hash;
            tip.timestamp = block.timestamp;
            res.chain.push_back(std::move(block));
            break;
          }
          // Dissent after the second check: the miner is replaced.
          ++res.rejected_blocks;
          failures.insert(election.miner);
          election = ledger::elect_miner(res.meters, day, failures);
        }
      }
    }

    // Operator: area totals with DA, then judgement against the DTM.
    DayResult dr;
    dr.date = date;
    std::int64_t true_total = 0;
    for (std::size_t t = 0; t < cfg.slots; ++t) {
      std::vector<fe::CipherReading> cs;
      std::int64_t reported_total = 0;
      for (std::size_t i = 0; i < m; ++i) {
        cs.push_back(md[i].ciphers[t]);
        reported_total += md[i].reported[t];
        true_total += md[i].true_readings[t];
      }
      const std::int64_t total = fe::decrypt_aggregate(cs, da, period[t], agg_bound);
      dr.conservation = dr.conservation && total == reported_total;
      dr.slot_totals.push_back(total);
      dr.e_sum += total;
    }
    const double fixed = cfg.fixed_loss_kwh * static_cast<double>(codec.reading_scale()) * static_cast<double>(cfg.slots);
    dr.e_dtm = std::llround(static_cast<double>(true_total) * (1.0 + cfg.loss_rate) + fixed);

    if (day < cfg.history_days) {
      dr.history = true;
      history.emplace_back(static_cast<double>(dr.e_dtm), static_cast<double>(dr.e_sum));
      if (day + 1 == cfg.history_days) res.loss = estimate_technical_loss(history);
    } else {
      if (history.size() < kDefaultMinHistory) res.loss = estimate_technical_loss(history);
      dr.verdict = judge_area({static_cast<double>(dr.e_dtm), static_cast<double>(dr.e_sum), res.loss.e_tl,
                               res.loss.epsilon});
      const bool run_detector = cfg.detection && model && (cfg.detect_all_days || *dr.verdict == Verdict::kTheft);
      if (run_detector) {
        for (std::size_t i = 0; i < m; ++i) {
          const auto products = products_for(md[i].ciphers, md[i].keys->dw, model->first);
          const auto inf = detect::infer_private(products, *model);
          res.detections.push_back({date, meters[i].id, inf.probs[1], inf.theft(), md[i].attacked});
        }
      }
    }
    res.days.push_back(std::move(dr));
  }
  if (cfg.ledger) res.chain_valid = !ledger::validate_chain(res.chain).has_value();
  return res;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  try {
    const json j = json::parse(text);
    check_keys(j, {"seed", "areas", "meters_per_area", "slots", "days", "history_days", "start_date", "dataset",
                   "weights", "model", "loss_rate", "fixed_loss_kwh", "attacks", "consensus", "ledger", "detection",
                   "detect_all_days"},
               "config");
    read_opt(j, "seed", cfg.seed);
    read_opt(j, "areas", cfg.areas);
    read_opt(j, "meters_per_area", cfg.meters_per_area);
    read_opt(j, "slots", cfg.slots);
    read_opt(j, "days", cfg.days);
    read_opt(j, "history_days", cfg.history_days);
    read_opt(j, "start_date", cfg.start_date);
    read_opt(j, "dataset", cfg.dataset);
    read_opt(j, "weights", cfg.weights);
    read_opt(j, "loss_rate", cfg.loss_rate);
    read_opt(j, "fixed_loss_kwh", cfg.fixed_loss_kwh);
    read_opt(j, "ledger", cfg.ledger);
    read_opt(j, "detection", cfg.detection);
    read_opt(j, "detect_all_days", cfg.detect_all_days);
    if (j.contains("model")) {
      const auto& jm = j.at("model");
      check_keys(jm, {"n", "units", "lstm_layers"}, "model");
      read_opt(jm, "n", cfg.model_n);
      read_opt(jm, "units", cfg.model_units);
      read_opt(jm, "lstm_layers", cfg.model_lstm_layers);
    }
    if (j.contains("attacks")) {
      for (const auto& ja : j.at("attacks")) {
        check_keys(ja, {"meter", "kind", "alpha", "start_day"}, "attack");
        AttackAssignment a;
        a.meter_id = ja.at("meter").get<std::uint32_t>();
        a.kind = attack_kind_from_string(ja.at("kind").get<std::string>());
        if (ja.contains("alpha")) a.alpha = ja.at("alpha").get<double>();
        read_opt(ja, "start_day", a.start_day);
        cfg.attacks.push_back(a);
      }
    }
    if (j.contains("consensus")) {
      const auto& jc = j.at("consensus");
      check_keys(jc, {"quorum_fraction", "max_retries", "byzantine", "tampering_miners"}, "consensus");
      read_opt(jc, "quorum_fraction", cfg.consensus.quorum_fraction);
      read_opt(jc, "max_retries", cfg.consensus.max_retries);
      read_opt(jc, "byzantine", cfg.consensus.byzantine);
      read_opt(jc, "tampering_miners", cfg.consensus.tampering_miners);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ojson config_json(const SimConfig& cfg) {
  ojson j;
  j["seed"] = cfg.seed;
  j["areas"] = cfg.areas;
  j["meters_per_area"] = cfg.meters_per_area;
  j["slots"] = cfg.slots;
  j["days"] = cfg.days;
  j["history_days"] = cfg.history_days;
  j["start_date"] = cfg.start_date;
  j["dataset"] = cfg.dataset;
  j["weights"] = cfg.weights;
  j["model"] = {{"n", cfg.model_n}, {"units", cfg.model_units}, {"lstm_layers", cfg.model_lstm_layers}};
  j["loss_rate"] = cfg.loss_rate;
  j["fixed_loss_kwh"] = cfg.fixed_loss_kwh;
  ojson attacks = ojson::array();
  for (const auto& a : cfg.attacks) {
    ojson ja;
    ja["meter"] = a.meter_id;
    ja["kind"] = to_string(a.kind);
    if (a.alpha) ja["alpha"] = *a.alpha;
    ja["start_day"] = a.start_day;
    attacks.push_back(ja);
  }
  j["attacks"] = attacks;
  ojson jc;
  jc["quorum_fraction"] = cfg.consensus.quorum_fraction;
  jc["max_retries"] = cfg.consensus.max_retries;
  jc["byzantine"] = cfg.consensus.byzantine;
  jc["tampering_miners"] = cfg.consensus.tampering_miners;
  j["consensus"] = jc;
  j["ledger"] = cfg.ledger;
  j["detection"] = cfg.detection;
  j["detect_all_days"] = cfg.detect_all_days;
  return j;
}

}  // namespace

std::string config_to_text(const SimConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

PeriodReport run_period(const SimConfig& cfg) {
  if (cfg.meters_per_area == 0) throw TopologyError("an area needs at least one meter");
  if (cfg.areas == 0) throw TopologyError("at least one area is required");
  if (cfg.slots < 2) throw ShapeError("a day needs at least two slots");

  Rng master(cfg.seed);
  Rng model_rng = master.fork();
  std::vector<ReadingSeries> dataset;
  if (!cfg.dataset.empty()) dataset = load_readings(cfg.dataset, cfg.slots);

  std::optional<detect::ModelWeights> model;
  if (cfg.ledger || cfg.detection) {
    model = cfg.weights.empty() ? detect::random_weights(cfg.slots, cfg.model_n, cfg.model_units,
                                                         cfg.model_lstm_layers, model_rng)
                                : detect::load_weights(cfg.weights);
    if (model->first.d() != cfg.slots) throw ShapeError("model first layer d differs from the slot count");
  }

  PeriodReport report;
  report.config = cfg;
  for (std::size_t a = 0; a < cfg.areas; ++a) {
    Rng area_rng = master.fork();
    try {
      report.areas.push_back(run_area(cfg, a, dataset, model, area_rng, report.report_bytes_measured));
    } catch (const TopologyError& e) {
      throw TopologyError("area " + std::to_string(a) + ": " + e.what());
    }
  }
  return report;
}

std::string report_to_text(const PeriodReport& report) {
  ojson doc;
  doc["version"] = 1;
  doc["config"] = config_json(report.config);
  const std::uint64_t n_dw = report.config.model_n;
  ojson bytes;
  bytes["measured_report"] = report.report_bytes_measured;
  bytes["per_report"] = report_size_bytes(n_dw, AccountingMode::kPerReport, report.config.slots).to_string();
  bytes["per_period"] = report_size_bytes(n_dw, AccountingMode::kPerPeriod, report.config.slots).to_string();
  doc["bytes"] = bytes;
  ojson areas = ojson::array();
  for (const auto& a : report.areas) {
    ojson ja;
    ja["area"] = a.area;
    ja["meters"] = a.meters;
    ja["e_tl"] = a.loss.e_tl;
    ja["epsilon"] = a.loss.epsilon;
    ojson days = ojson::array();
    for (const auto& d : a.days) {
      ojson jd;
      jd["date"] = d.date;
      jd["e_dtm"] = d.e_dtm;
      jd["e_sum"] = d.e_sum;
      jd["history"] = d.history;
      jd["verdict"] = d.verdict ? verdict_name(*d.verdict) : "none";
      jd["conservation"] = d.conservation;
      jd["slot_totals"] = d.slot_totals;
      days.push_back(jd);
    }
    ja["days"] = days;
    ojson det = ojson::array();
    for (const auto& d : a.detections) {
      ojson jd;
      jd["date"] = d.date;
      jd["meter"] = d.meter_id;
      jd["p_theft"] = d.p_theft;
      jd["theft"] = d.theft;
      jd["attacked"] = d.attacked;
      det.push_back(jd);
    }
    ja["detections"] = det;
    ojson chain;
    chain["blocks"] = a.chain.size();
    chain["tip"] = a.chain.empty() ? std::string() : to_hex(a.chain.back().hash);
    chain["valid"] = a.chain_valid;
    chain["rejected_blocks"] = a.rejected_blocks;
    ojson miners = ojson::array();
    for (std::size_t i = 0; i < a.miners.size(); i += report.config.slots) miners.push_back(a.miners[i]);
    chain["daily_miners"] = miners;
    ja["chain"] = chain;
    areas.push_back(ja);
  }
  doc["areas"] = areas;
  return doc.dump(1) + "\n";
}

std::vector<Rejudgement> rejudge_report(const std::string& report_text) {
  std::vector<Rejudgement> out;
  try {
    const json doc = json::parse(report_text);
    for (const auto& ja : doc.at("areas")) {
      const double e_tl = ja.at("e_tl").get<double>();
      const double eps = ja.at("epsilon").get<double>();
      for (const auto& jd : ja.at("days")) {
        const std::string v = jd.at("verdict").get<std::string>();
        if (v == "none") continue;
        const JudgementInput in{jd.at("e_dtm").get<double>(), jd.at("e_sum").get<double>(), e_tl, eps};
        out.push_back({ja.at("area").get<std::size_t>(), jd.at("date").get<std::string>(), verdict_from_name(v),
                       judge_area(in)});
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed report: ") + e.what());
  }
  return out;
}

std::vector<ChainDetection> detect_chain(const ledger::Chain& chain, const detect::ModelWeights& weights) {
  const auto& layer = weights.first;
  ledger::KeyStore store;
  // (date, meter) -> slot label -> (cipher, dw_ref)
  std::map<std::pair<std::string, std::uint32_t>, std::map<std::string, std::pair<fe::CipherReading, crypto::Digest>>>
      days;
  for (const auto& b : chain) {
    ledger::absorb_key_sets(b, store);
    for (const auto& r : b.records) {
      const std::string date = r.ts_label.substr(0, r.ts_label.find('T'));
      days[{date, r.meter_id}][r.ts_label] = {fe::CipherReading::from_bytes(r.cipher), r.dw_ref};
    }
  }
  std::vector<ChainDetection> out;
  for (const auto& [key, slots] : days) {
    if (slots.size() != layer.d()) continue;  // incomplete period
    std::vector<fe::CipherReading> ciphers;
    const crypto::Digest ref = slots.begin()->second.second;
    bool same_ref = true;
    for (const auto& [label, entry] : slots) {
      ciphers.push_back(entry.first);
      same_ref = same_ref && entry.second == ref;
    }
    auto it = store.find(ref);
    if (!same_ref || it == store.end()) throw DecodeError("detection keys for meter " + std::to_string(key.second) + " on " + key.first + " are missing");
    const auto dw = ledger::decode_key_set(it->second);
    if (dw.size() != layer.n()) throw ShapeError("stored DW set size differs from the model's n");
    ChainDetection d{key.first, key.second, products_for(ciphers, dw, layer), {}};
    d.inference = detect::infer_private(d.products, weights);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace gridtrust::sim
