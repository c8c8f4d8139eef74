#include "gridtrust/crypto/params.hpp"

#include "gridtrust/bytes.hpp"
#include "json.hpp"

namespace gridtrust::crypto {

SystemParams SystemParams::standard(const FixedPointCodec& codec) {
  return SystemParams{std::string(PlainCurve::kName),
                      std::string(PairingCurve::kName),
                      kGroupOrder,
                      plain_generator(),
                      pairing_generator(),
                      kH1Label,
                      kH2Label,
                      codec};
}

std::string SystemParams::to_text() const {
  nlohmann::json j;
  j["version"] = 1;
  j["plain_group"] = plain_group;
  j["pairing_group"] = pairing_group;
  j["q"] = order_q.to_hex();
  j["g"] = to_hex(g.to_bytes());
  j["g2"] = to_hex(g2.to_bytes());
  j["h1"] = h1_label;
  j["h2"] = h2_label;
  j["reading_scale"] = codec.reading_scale();
  j["weight_scale_bits"] = codec.weight_scale_bits();
  return j.dump(2) + "\n";
}

SystemParams SystemParams::from_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("params: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) throw DecodeError("params: unsupported version");
    SystemParams p{j.at("plain_group").get<std::string>(),
                   j.at("pairing_group").get<std::string>(),
                   UInt<4>::from_hex(j.at("q").get<std::string>()),
                   PlainPoint::from_bytes(from_hex(j.at("g").get<std::string>())),
                   PairingPoint::from_bytes(from_hex(j.at("g2").get<std::string>())),
                   j.at("h1").get<std::string>(),
                   j.at("h2").get<std::string>(),
                   FixedPointCodec(j.at("reading_scale").get<std::int64_t>(), j.at("weight_scale_bits").get<int>())};
    if (p.plain_group != PlainCurve::kName || p.pairing_group != PairingCurve::kName) {
      throw DecodeError("params: unknown group identifier");
    }
    if (p.order_q != kGroupOrder) throw DecodeError("params: group order mismatch");
    if (!(p.g == plain_generator()) || !(p.g2 == pairing_generator())) {
      throw DecodeError("params: generator mismatch");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DecodeError(std::string("params: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DecodeError(std::string("params: ") + e.what());
  }
}

}  // namespace gridtrust::crypto
