// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "../support/chain_fixture.hpp"
#include "gridtrust/agg/secure_agg.hpp"
#include "gridtrust/bls/bls.hpp"
#include "gridtrust/detect/metrics.hpp"
#include "gridtrust/detect/model.hpp"
#include "gridtrust/errors.hpp"
#include "gridtrust/fe/fe.hpp"
#include "gridtrust/ledger/consensus.hpp"
#include "gridtrust/ledger/report.hpp"
#include "gridtrust/sim/accounting.hpp"
#include "gridtrust/sim/pipeline.hpp"
#include "gridtrust/sim/readings.hpp"

using namespace gridtrust;
using boost::multiprecision::cpp_int;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <std::size_t N>
cpp_int to_cpp(const crypto::UInt<N>& v) {
  cpp_int r = 0;
  for (std::size_t i = N; i-- > 0;) r = (r << 64) | cpp_int(v.limb[i]);
  return r;
}

std::vector<fe::TimestampPoints> day_points(const std::string& date, std::size_t slots) {
  std::vector<fe::TimestampPoints> out;
  for (std::size_t t = 0; t < slots; ++t) out.push_back(fe::TimestampPoints::derive(sim::slot_label(date, t, slots)));
  return out;
}

// 100 areas of 200 meters, one slot each. DA is the plain sum of the meters'
// s keys; that this equals the blinded-share aggregate is the mask check below.
Outcome fe_aggregate() {
  const auto t0 = Clock::now();
  Rng rng(101);
  const crypto::FixedPointCodec codec;
  std::size_t exact = 0;
  for (int area = 0; area < 100; ++area) {
    const auto ts = fe::TimestampPoints::derive(sim::slot_label(sim::add_days("2009-07-15", area), 17));
    std::vector<fe::CipherReading> ciphers;
    crypto::ScalarPair da{};
    std::int64_t plain = 0;
    for (int i = 0; i < 200; ++i) {
      const auto s = agg::generate_meter_secret(rng).s;
      da[0] += s[0];
      da[1] += s[1];
      const std::int64_t r = rng.uniform_int(0, codec.max_encoded_reading());
      plain += r;
      ciphers.push_back(fe::encrypt_reading(s, ts, r));
    }
    if (fe::decrypt_aggregate(ciphers, da, ts, fe::aggregate_bound(200)) == plain) ++exact;
  }
  const double secs = seconds_since(t0);
  return {exact == 100 && secs < 60.0, fmt("%zu/100 areas exact (m=200, readings <= 65 kWh), %.1f s (limit 60 s)",
                                           exact, secs)};
}

// 100 meter-days x 10 weight columns of the bundled detector fixture.
Outcome fe_functional(const detect::ModelWeights& model) {
  Rng rng(202);
  const auto& layer = model.first;
  const auto bound = fe::inner_product_bound(layer);
  const auto period = day_points("2009-08-01", layer.d());
  std::size_t pairs = 0;
  std::size_t exact = 0;
  std::size_t negative = 0;
  for (int day = 0; day < 100; ++day) {
    const auto s = agg::generate_meter_secret(rng).s;
    std::vector<std::int64_t> r(layer.d());
    std::vector<fe::CipherReading> c;
    for (std::size_t t = 0; t < layer.d(); ++t) {
      r[t] = rng.uniform_int(0, 65000);
      c.push_back(fe::encrypt_reading(s, period[t], r[t]));
    }
    const auto keys = fe::gen_detection_keys(s, layer, period);
    for (std::size_t col = 0; col < layer.n(); ++col) {
      const auto w = layer.column(col);
      cpp_int expect = 0;
      for (std::size_t t = 0; t < layer.d(); ++t) expect += cpp_int(w[t]) * r[t];
      const auto got = fe::decrypt_inner_product(c, w, keys.dw[col], bound);
      ++pairs;
      if (expect < 0) ++negative;
      if (cpp_int(got) == expect) ++exact;
    }
  }
  return {pairs == 1000 && exact == pairs,
          fmt("%zu/%zu (meter-day, column) pairs exact, %zu with negative products", exact, pairs, negative)};
}

Outcome mask_cancellation() {
  Rng rng(303);
  const cpp_int q = to_cpp(crypto::kGroupOrder);
  std::string detail;
  bool ok = true;
  for (std::size_t m : {1, 2, 3, 10, 200}) {
    std::vector<std::uint32_t> roster;
    std::vector<agg::MeterSecret> secrets;
    for (std::size_t i = 0; i < m; ++i) {
      roster.push_back(static_cast<std::uint32_t>(1000 + 7 * i));
      secrets.push_back(agg::generate_meter_secret(rng));
    }
    const auto shares = agg::simulate_area_shares(roster, secrets);
    const auto da = agg::aggregate_da(shares, m);
    bool area_ok = true;
    for (int k = 0; k < 2; ++k) {
      cpp_int sum = 0;
      for (const auto& s : secrets) sum += to_cpp(s.s[k].to_int());
      area_ok = area_ok && to_cpp(da[k].to_int()) == sum % q;
      // Blinding must actually hide s when there are peers.
      if (m > 1) area_ok = area_ok && !(shares[0][k] == secrets[0].s[k]);
    }
    ok = ok && area_ok;
    detail += fmt("m=%zu %s; ", m, area_ok ? "exact" : "MISMATCH");
  }
  return {ok, detail + "checked against big-integer sums mod q"};
}

template <class F>
void mutate_byte(std::vector<std::uint8_t>& b, Rng& rng, F&& body) {
  const auto pos = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(b.size()) - 1));
  const auto flip = static_cast<std::uint8_t>(rng.uniform_int(1, 255));
  b[pos] ^= flip;
  body();
  b[pos] ^= flip;
}

Outcome signatures() {
  Rng rng(404);
  constexpr std::size_t kBatch = 200;
  std::vector<bls::VerifyKey> vks;
  std::vector<std::vector<std::uint8_t>> msgs, vk_bytes, sig_bytes;
  std::vector<bls::Signature> sigs;
  for (std::size_t i = 0; i < kBatch; ++i) {
    const auto sk = bls::generate_signing_key(rng);
    std::vector<std::uint8_t> m(static_cast<std::size_t>(rng.uniform_int(1, 600)));
    for (auto& b : m) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    vks.push_back(bls::verify_key(sk));
    sigs.push_back(bls::sign(sk, m));
    const auto vb = vks.back().to_bytes();
    const auto sb = sigs.back().to_bytes();
    vk_bytes.emplace_back(vb.begin(), vb.end());
    sig_bytes.emplace_back(sb.begin(), sb.end());
    msgs.push_back(std::move(m));
  }
  std::size_t single_ok = 0, single_rej = 0, single_mut = 0;
  for (std::size_t i = 0; i < kBatch; ++i) {
    if (bls::verify_encoded(vk_bytes[i], msgs[i], sig_bytes[i])) ++single_ok;
    for (auto* target : {&msgs[i], &sig_bytes[i], &vk_bytes[i]}) {
      mutate_byte(*target, rng, [&] {
        ++single_mut;
        if (!bls::verify_encoded(vk_bytes[i], msgs[i], sig_bytes[i])) ++single_rej;
      });
    }
  }
  // Every byte position of a signature and a key, for a few items.
  for (std::size_t i = 0; i < 4; ++i) {
    for (auto* target : {&sig_bytes[i], &vk_bytes[i]}) {
      for (std::size_t pos = 0; pos < target->size(); ++pos) {
        (*target)[pos] ^= 0x01;
        ++single_mut;
        if (!bls::verify_encoded(vk_bytes[i], msgs[i], sig_bytes[i])) ++single_rej;
        (*target)[pos] ^= 0x01;
      }
    }
  }

  auto batch_of = [&] {
    std::vector<bls::BatchItem> items;
    for (std::size_t i = 0; i < kBatch; ++i) items.push_back({vks[i], msgs[i], sigs[i]});
    return items;
  };
  const bool batch_ok = bls::batch_verify(batch_of());
  std::size_t batch_mut = 0, batch_rej = 0;
  for (int trial = 0; trial < 4; ++trial) {
    const auto i = static_cast<std::size_t>(rng.uniform_int(0, kBatch - 1));
    for (int kind = 0; kind < 3; ++kind) {
      auto* target = kind == 0 ? &msgs[i] : kind == 1 ? &sig_bytes[i] : &vk_bytes[i];
      mutate_byte(*target, rng, [&] {
        ++batch_mut;
        auto items = batch_of();
        try {
          items[i].sig = bls::Signature::from_bytes(sig_bytes[i]);
          items[i].vk = bls::VerifyKey::from_bytes(vk_bytes[i]);
        } catch (const DecodeError&) {
          ++batch_rej;  // the mutated encoding never reaches the batch
          return;
        }
        if (!bls::batch_verify(items)) ++batch_rej;
      });
    }
  }
  const bool ok = single_ok == kBatch && single_rej == single_mut && batch_ok && batch_rej == batch_mut;
  return {ok, fmt("single valid %zu/%zu, single mutated rejected %zu/%zu; batch(200) valid %s, batch mutated "
                  "rejected %zu/%zu",
                  single_ok, kBatch, single_rej, single_mut, batch_ok ? "accepted" : "REJECTED", batch_rej,
                  batch_mut)};
}

Outcome ledger_tamper() {
  const auto area = fixture::make_signed_area(3, 10, 505);
  if (ledger::validate_chain(area.chain)) return {false, "pristine chain does not validate"};
  std::size_t cases = 0, correct = 0;
  std::string first_miss;
  auto check = [&](std::size_t h, const std::string& what, const std::function<void(ledger::Block&)>& mutate) {
    auto chain = area.chain;
    mutate(chain[h]);
    ++cases;
    const auto at = ledger::validate_chain(chain);
    if (at && *at == h) ++correct;
    else if (first_miss.empty()) first_miss = fmt("block %zu ", h) + what;
  };
  auto flip = [](auto& bytes) { bytes[bytes.size() / 2] ^= 0x10; };
  for (std::size_t h = 0; h < area.chain.size(); ++h) {
    check(h, "height", [](auto& b) { b.height += 1; });
    check(h, "prev_hash", [&](auto& b) { flip(b.prev_hash); });
    check(h, "merkle_root", [&](auto& b) { flip(b.merkle_root); });
    check(h, "timestamp", [](auto& b) { b.timestamp += 1; });
    check(h, "slot_label", [](auto& b) { b.slot_label.back() ^= 0x01; });
    check(h, "hash", [&](auto& b) { flip(b.hash); });
    check(h, "records dropped", [](auto& b) { b.records.pop_back(); });
    check(h, "records reordered", [](auto& b) { std::swap(b.records[0], b.records[1]); });
    if (h == 0) {
      for (std::size_t k = 0; k < area.chain[h].key_sets.size(); ++k)
        check(h, fmt("key_set %zu", k), [&](auto& b) { flip(b.key_sets[k]); });
    } else {
      check(h, "key_sets added", [&](auto& b) { b.key_sets.push_back(area.dw[0]); });
    }
    for (std::size_t r = 0; r < area.chain[h].records.size(); ++r) {
      const auto tag = fmt("record %zu ", r);
      check(h, tag + "meter_id", [&](auto& b) { b.records[r].meter_id += 1; });
      check(h, tag + "cipher", [&](auto& b) { flip(b.records[r].cipher); });
      check(h, tag + "ts_label", [&](auto& b) { b.records[r].ts_label.back() ^= 0x01; });
      check(h, tag + "dw_ref", [&](auto& b) { flip(b.records[r].dw_ref); });
      check(h, tag + "sig", [&](auto& b) { flip(b.records[r].sig); });
      check(h, tag + "pk", [&](auto& b) { flip(b.records[r].pk); });
    }
  }
  return {correct == cases,
          fmt("%zu/%zu single-field mutations caught at the mutated height", correct, cases) +
              (first_miss.empty() ? "" : "; first miss: " + first_miss)};
}

Outcome byte_accounting() {
  Rng rng(606);
  const auto secret = agg::generate_meter_secret(rng);
  const auto layer = fe::QuantizedFirstLayer(48, 10, std::vector<std::int64_t>(480, 3), std::vector<double>(10, 0.0));
  const auto period = day_points("2009-07-15", 48);
  const auto dw = ledger::encode_key_set(fe::gen_detection_keys(secret.s, layer, period));
  const auto c = fe::encrypt_reading(secret.s, period[0], 1234);
  const auto rep = ledger::make_report(bls::SigningKey{secret.x}, c, period[0], dw);
  const auto measured = rep.serialize().size();
  const auto model = sim::report_size_bytes(10, sim::AccountingMode::kPerReport);
  return {measured == 600 && model == sim::Rational{600, 1},
          fmt("serialized report %zu bytes with n_dw=10 (expected 600), size model %s", measured,
              model.to_string().c_str())};
}

Outcome judgement() {
  sim::SimConfig c;
  c.seed = 707;
  c.meters_per_area = 20;
  c.slots = 48;
  c.history_days = 10;
  c.days = 60;
  c.ledger = false;
  c.detection = false;
  auto t0 = Clock::now();
  const auto honest = sim::run_period(c);
  const double honest_secs = seconds_since(t0);
  c.attacks.push_back({7, sim::AttackKind::kF1, 0.3, c.history_days});
  t0 = Clock::now();
  const auto theft = sim::run_period(c);
  const double theft_secs = seconds_since(t0);
  std::size_t judged = 0, false_verdicts = 0, flagged = 0, attacked_days = 0;
  for (const auto& d : honest.areas[0].days) {
    if (!d.verdict) continue;
    ++judged;
    if (*d.verdict == sim::Verdict::kTheft) ++false_verdicts;
  }
  for (const auto& d : theft.areas[0].days) {
    if (!d.verdict) continue;
    ++attacked_days;
    if (*d.verdict == sim::Verdict::kTheft) ++flagged;
  }
  const double rate = attacked_days ? static_cast<double>(flagged) / static_cast<double>(attacked_days) : 0.0;
  const bool ok = judged == 50 && false_verdicts == 0 && attacked_days == 50 && rate >= 0.95 && honest_secs < 30.0 &&
                  theft_secs < 30.0;
  return {ok, fmt("honest: %zu false theft verdicts over %zu days; f1 alpha=0.3: %zu/%zu days flagged (%.1f%%, "
                  "need >= 95%%); runtimes %.1f s and %.1f s (limit 30 s); E_TL=%.1f eps=%.1f",
                  false_verdicts, judged, flagged, attacked_days, 100.0 * rate, honest_secs, theft_secs,
                  honest.areas[0].loss.e_tl, honest.areas[0].loss.epsilon)};
}

// Private path decrypts real ciphertexts; the plain path runs on the same
// readings in kWh. The full-precision first layer may differ from the
// quantized one by at most sum_t |r_t| * 2^-11 <= d * max|r| * 2^-11 per neuron.
Outcome path_equivalence(const detect::ModelWeights& model) {
  Rng rng(808);
  const auto& layer = model.first;
  const crypto::FixedPointCodec codec;
  const auto bound = fe::inner_product_bound(layer);
  const auto period = day_points("2009-09-01", layer.d());
  std::size_t identical = 0, within = 0;
  double worst_ratio = 0;
  for (int day = 0; day < 100; ++day) {
    const auto s = agg::generate_meter_secret(rng).s;
    // Alternate household-scale and full-range days.
    const std::int64_t top = day % 2 == 0 ? 2000 : codec.max_encoded_reading();
    std::vector<std::int64_t> r(layer.d());
    std::vector<double> kwh(layer.d());
    std::vector<fe::CipherReading> c;
    double max_r = 0;
    for (std::size_t t = 0; t < layer.d(); ++t) {
      r[t] = rng.uniform_int(0, top);
      kwh[t] = codec.decode_reading(r[t]);
      max_r = std::max(max_r, kwh[t]);
      c.push_back(fe::encrypt_reading(s, period[t], r[t]));
    }
    const auto keys = fe::gen_detection_keys(s, layer, period);
    std::vector<std::int64_t> products(layer.n());
    for (std::size_t col = 0; col < layer.n(); ++col)
      products[col] = fe::decrypt_inner_product(c, layer.column(col), keys.dw[col], bound);
    const auto priv = detect::infer_private(products, model);
    const auto plain = detect::infer_plain(kwh, model);
    if (priv.logits == plain.logits && priv.probs == plain.probs) ++identical;
    const auto pq = detect::preactivation_private(products, layer);
    const auto pf = detect::preactivation_full_precision(kwh, layer);
    const double limit = static_cast<double>(layer.d()) * max_r * std::ldexp(1.0, -11);
    bool ok = true;
    for (std::size_t col = 0; col < layer.n(); ++col) {
      const double dev = std::abs(pq[col] - pf[col]);
      worst_ratio = std::max(worst_ratio, dev / limit);
      ok = ok && dev <= limit;
    }
    if (ok) ++within;
  }
  return {identical == 100 && within == 100,
          fmt("private vs plain logits identical on %zu/100 meter-days; full-precision pre-activations within "
              "d*max|r|*2^-11 on %zu/100 (worst %.3f of the bound)",
              identical, within, worst_ratio)};
}

Outcome metric_formulas() {
  Rng rng(909);
  std::size_t agree = 0;
  for (int set = 0; set < 200; ++set) {
    const auto len = static_cast<std::size_t>(rng.uniform_int(1, 400));
    const double p_pos = rng.uniform01();
    std::vector<int> pred(len), label(len);
    for (std::size_t i = 0; i < len; ++i) {
      label[i] = rng.uniform01() < p_pos ? 1 : 0;
      pred[i] = rng.uniform01() < 0.5 ? label[i] : 1 - label[i];
    }
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < len; ++i) {
      if (pred[i] == 1 && label[i] == 1) ++tp;
      else if (pred[i] == 1) ++fp;
      else if (label[i] == 0) ++tn;
      else ++fn;
    }
    const double dr = tp + fn ? double(tp) / double(tp + fn) : 0.0;
    const double fa = fp + tn ? double(fp) / double(fp + tn) : 0.0;
    const double acc = double(tp + tn) / double(len);
    const auto m = detect::evaluate(pred, label);
    if (m.tp == tp && m.fp == fp && m.tn == tn && m.fn == fn && m.dr == dr && m.fa == fa && m.hd == dr - fa &&
        m.accuracy == acc)
      ++agree;
  }
  // Published detection figures: HD is DR minus FA.
  const bool published = std::abs((93.72 - 2.62) - 91.10) < 1e-9;
  return {agree == 200 && published,
          fmt("%zu/200 random sets match brute-force counts and DR=TP/(TP+FN), FA=FP/(FP+TN), HD=DR-FA exactly; "
              "published HD 91.10 = 93.72 - 2.62 %s",
              agree, published ? "holds" : "FAILS")};
}

int run_command(const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / "gridtrust_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"seed": 99, "areas": 2, "meters_per_area": 3, "slots": 8, "days": 9,
  "history_days": 7, "model": {"n": 3, "units": 6, "lstm_layers": 1},
  "attacks": [{"meter": 2, "kind": "f2", "start_day": 7}],
  "consensus": {"tampering_miners": [1]}, "detect_all_days": true})";
  const std::string cli = GRIDTRUST_CLI;
  std::vector<std::string> outputs;
  for (const char* name : {"a.json", "b.json"}) {
    const int rc = run_command(cli + " simulate --config " + cfg.string() + " --out " + (dir / name).string());
    if (rc != 0) return {false, fmt("simulate exited with status %d", rc)};
  }
  std::size_t compared = 0, identical = 0, bytes = 0;
  auto same = [&](const fs::path& a, const fs::path& b) {
    const auto ta = read_file(a);
    ++compared;
    bytes += ta.size();
    if (!ta.empty() && ta == read_file(b)) ++identical;
  };
  same(dir / "a.json", dir / "b.json");
  for (int area = 0; area < 2; ++area)
    same(dir / fmt("a.json.area%d.chain.json", area), dir / fmt("b.json.area%d.chain.json", area));
  fs::remove_all(dir);
  return {compared == 3 && identical == 3,
          fmt("%zu/%zu output files byte-identical across two runs (%zu bytes)", identical, compared, bytes)};
}

Outcome block_bench() {
  const std::vector<std::size_t> sizes{50, 100, 150, 200, 250, 300};
  const auto rows = ledger::bench_block_time(sizes, 5, 1111);
  bool monotone = true;
  std::string table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].mean_seconds < rows[i - 1].mean_seconds) monotone = false;
    table += fmt("%zu:%.3fs ", rows[i].meters, rows[i].mean_seconds);
  }
  return {monotone && rows.size() == sizes.size(), "mean block time (5 trials) " + table +
                                                       (monotone ? "non-decreasing" : "NOT monotone")};
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto model = detect::load_weights(GRIDTRUST_WEIGHT_FIXTURE);
  report("fe_aggregate", fe_aggregate);
  report("fe_functional", [&] { return fe_functional(model); });
  report("mask_cancellation", mask_cancellation);
  report("signature_suite", signatures);
  report("ledger_tamper", ledger_tamper);
  report("byte_accounting", byte_accounting);
  report("judgement", judgement);
  report("path_equivalence", [&] { return path_equivalence(model); });
  report("metric_formulas", metric_formulas);
  report("determinism", determinism);
  report("block_bench", block_bench);
  std::printf("%d criteria failed, %.1f s total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
