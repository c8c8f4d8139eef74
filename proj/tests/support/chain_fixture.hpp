#pragma once

#include <string>
#include <vector>

#include "gridtrust/agg/secure_agg.hpp"
#include "gridtrust/fe/fe.hpp"
#include "gridtrust/ledger/block.hpp"
#include "gridtrust/ledger/report.hpp"
#include "gridtrust/sim/readings.hpp"

namespace fixture {

// One detection period of `blocks` slots with `meters` signed reports per
// slot; every meter's DW set rides in the first block.
struct SignedArea {
  std::vector<gridtrust::agg::MeterSecret> secrets;
  std::vector<gridtrust::fe::TimestampPoints> period;
  std::vector<gridtrust::Bytes> dw;
  std::vector<std::vector<gridtrust::ledger::ReportRecord>> records;  // [slot][meter]
  gridtrust::ledger::Chain chain;
};

inline SignedArea make_signed_area(std::size_t blocks, std::size_t meters, std::uint64_t seed) {
  using namespace gridtrust;
  SignedArea a;
  Rng rng(seed);
  // A one-neuron first layer over the period (needs blocks >= 2).
  std::vector<std::int64_t> w(blocks);
  for (auto& x : w) x = rng.uniform_int(-500, 500);
  const fe::QuantizedFirstLayer layer(blocks, 1, w, std::vector<double>(1, 0.0));
  for (std::size_t t = 0; t < blocks; ++t)
    a.period.push_back(fe::TimestampPoints::derive(sim::slot_label("2009-07-15", t, blocks)));
  for (std::size_t i = 0; i < meters; ++i) {
    a.secrets.push_back(agg::generate_meter_secret(rng));
    a.dw.push_back(ledger::encode_key_set(fe::gen_detection_keys(a.secrets.back().s, layer, a.period)));
  }
  ledger::KeyStore known;
  ledger::Digest prev{};
  for (std::size_t t = 0; t < blocks; ++t) {
    std::vector<ledger::ReportRecord> recs;
    for (std::size_t i = 0; i < meters; ++i) {
      const auto c = fe::encrypt_reading(a.secrets[i].s, a.period[t], rng.uniform_int(0, 65000));
      const auto rep = ledger::make_report(bls::SigningKey{a.secrets[i].x}, c, a.period[t], a.dw[i]);
      recs.push_back(ledger::to_record(static_cast<std::uint32_t>(i + 1), rep, a.period[t].label()));
    }
    a.records.push_back(recs);
    auto b = ledger::build_block(t, prev, recs, a.period[t].label(), 1800 * t, t == 0 ? a.dw : std::vector<Bytes>{},
                                 known);
    ledger::absorb_key_sets(b, known);
    prev = b.hash;
    a.chain.push_back(std::move(b));
  }
  return a;
}

}  // namespace fixture
