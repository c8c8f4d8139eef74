#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/integer.hpp>

#include "gridtrust/bytes.hpp"
#include "gridtrust/bls/bls.hpp"
#include "gridtrust/crypto/codec.hpp"
#include "gridtrust/crypto/group.hpp"
#include "gridtrust/crypto/hash.hpp"
#include "gridtrust/crypto/pairing.hpp"
#include "gridtrust/crypto/params.hpp"
#include "gridtrust/errors.hpp"
#include "gridtrust/ledger/merkle.hpp"
#include "test_util.hpp"

using namespace gridtrust;
using namespace gridtrust::crypto;
using testutil::cpp_int;
using testutil::from_cpp;
using testutil::to_cpp;

namespace {

template <class F>
cpp_int random_below(Rng& rng, const cpp_int& bound) {
  cpp_int v = 0;
  for (int i = 0; i < 6; ++i) v = (v << 64) | cpp_int(rng.next_u64());
  return v % bound;
}

template <class F>
void check_field_against_cpp_int(std::uint64_t seed) {
  using Int = typename F::Int;
  const cpp_int p = to_cpp(F::kModulus);
  Rng rng(seed);
  for (int iter = 0; iter < 300; ++iter) {
    const cpp_int a = random_below<F>(rng, p);
    const cpp_int b = iter == 0 ? cpp_int(0) : random_below<F>(rng, p);
    const F fa = F::from_int(from_cpp<F::N>(a));
    const F fb = F::from_int(from_cpp<F::N>(b));
    EXPECT_EQ(to_cpp((fa + fb).to_int()), (a + b) % p);
    EXPECT_EQ(to_cpp((fa - fb).to_int()), ((a - b) % p + p) % p);
    EXPECT_EQ(to_cpp((fa * fb).to_int()), (a * b) % p);
    EXPECT_EQ(to_cpp((-fa).to_int()), (p - a) % p);
    if (a != 0) {
      EXPECT_EQ(to_cpp(fa.inverse().to_int()), boost::multiprecision::powm(a, p - 2, p));
    }
    const bool qr = boost::multiprecision::powm(a, (p - 1) / 2, p) == 1 || a == 0;
    EXPECT_EQ(fa.is_square(), qr);
    const auto r = fa.sqrt();
    ASSERT_EQ(r.has_value(), qr);
    if (r) EXPECT_EQ(to_cpp(r->to_int()) * to_cpp(r->to_int()) % p, a);
  }
  // Values >= p given to from_int reduce.
  const cpp_int wide = p + 5;
  if (wide < (cpp_int(1) << (64 * F::N))) EXPECT_EQ(to_cpp(F::from_int(from_cpp<F::N>(wide)).to_int()), cpp_int(5));
  (void)sizeof(Int);
}

std::string hex_of(const PointBytes& b) { return to_hex(b); }

}  // namespace

TEST(Field, PlainFieldMatchesBigIntegerOracle) { check_field_against_cpp_int<PlainField>(1); }
TEST(Field, PairingFieldMatchesBigIntegerOracle) { check_field_against_cpp_int<PairingField>(2); }
TEST(Field, ScalarFieldMatchesBigIntegerOracle) { check_field_against_cpp_int<Scalar>(3); }

TEST(Field, WideBytesReduceAsBigEndianInteger) {
  Rng rng(4);
  for (int iter = 0; iter < 50; ++iter) {
    std::array<std::uint8_t, 64> wide{};
    for (auto& b : wide) b = static_cast<std::uint8_t>(rng.next_u64());
    cpp_int v = 0;
    for (auto b : wide) v = (v << 8) | b;
    EXPECT_EQ(to_cpp(Scalar::from_wide_bytes(wide).to_int()), v % to_cpp(kGroupOrder));
    EXPECT_EQ(to_cpp(PairingField::from_wide_bytes(wide).to_int()), v % to_cpp(PairingFieldConfig::kModulus));
  }
}

TEST(Field, BatchInverseSkipsZero) {
  Rng rng(5);
  std::vector<PlainField> xs;
  for (int i = 0; i < 9; ++i) xs.push_back(i == 4 ? PlainField::zero() : PlainField::from_u64(rng.next_u64()));
  auto inv = xs;
  PlainField::batch_inverse(inv);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].is_zero()) EXPECT_TRUE(inv[i].is_zero());
    else EXPECT_EQ(xs[i] * inv[i], PlainField::one());
  }
}

TEST(Scalars, SignedValuesWrapModOrder) {
  const cpp_int q = to_cpp(kGroupOrder);
  EXPECT_EQ(to_cpp(scalar_from_signed(-1).to_int()), q - 1);
  EXPECT_EQ(to_cpp(scalar_from_signed(INT64_MIN).to_int()), q - (cpp_int(1) << 63));
  EXPECT_EQ(to_cpp(scalar_from_signed(42).to_int()), cpp_int(42));
}

TEST(Scalars, ByteEncodingRejectsNonCanonical) {
  Rng rng(6);
  const Scalar s = random_scalar(rng);
  EXPECT_EQ(scalar_from_bytes(scalar_to_bytes(s)), s);
  ScalarBytes q{};
  kGroupOrder.to_be_bytes(q);
  EXPECT_THROW(scalar_from_bytes(q), DecodeError);
  EXPECT_THROW(scalar_from_bytes(std::vector<std::uint8_t>(31)), DecodeError);
}

TEST(Vectors, GeneratorsMatchReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  EXPECT_EQ(hex_of(plain_generator().to_bytes()), v["plain_generator"]);
  EXPECT_EQ(hex_of(pairing_generator().to_bytes()), v["pairing_generator"]);
}

TEST(Vectors, ScalarMultiplicationMatchesReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  for (const auto& c : v["scalar_mul"]) {
    const auto k = UInt<4>::from_hex(c["k"].get<std::string>());
    EXPECT_EQ(hex_of(plain_generator().mul(k).to_bytes()), c["plain"]);
    EXPECT_EQ(hex_of(plain_generator_table().mul(k).to_bytes()), c["plain"]);
    EXPECT_EQ(hex_of(pairing_generator().mul(k).to_bytes()), c["pairing"]);
  }
}

TEST(Vectors, TimestampHashMatchesReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  for (const auto& c : v["h1"]) {
    const auto [p0, p1] = hash_to_point_pair(c["domain"].get<std::string>(), c["label"].get<std::string>());
    EXPECT_EQ(hex_of(p0.to_bytes()), c["p0"]);
    EXPECT_EQ(hex_of(p1.to_bytes()), c["p1"]);
  }
  EXPECT_THROW(hash_to_point_pair("TS", ""), MisuseError);
}

TEST(Vectors, MessageHashMatchesReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  for (const auto& c : v["h2"]) {
    const Bytes msg = from_hex(c["message"].get<std::string>());
    EXPECT_EQ(hex_of(bls::hash_message(msg).to_bytes()), c["point"]);
  }
  for (const auto& c : v["hash_to_scalar"]) {
    const Bytes msg = from_hex(c["message"].get<std::string>());
    const Scalar s = hash_to_scalar(c["label"].get<std::string>(), msg);
    EXPECT_EQ(to_hex(scalar_to_bytes(s)), c["scalar"]);
  }
}

TEST(Vectors, PairingMatchesReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  for (const auto& c : v["pairing"]) {
    const auto a = UInt<4>::from_hex(c["a"].get<std::string>());
    const auto b = UInt<4>::from_hex(c["b"].get<std::string>());
    const GtElement e = pairing(pairing_generator().mul(a), pairing_generator().mul(b));
    EXPECT_EQ(e.re.to_int().to_hex(), c["re"]);
    EXPECT_EQ(e.im.to_int().to_hex(), c["im"]);
  }
}

TEST(Vectors, MerkleRootsMatchReference) {
  const auto v = testutil::load_fixture("crypto_vectors.json");
  for (const auto& c : v["merkle"]) {
    std::vector<Bytes> leaves;
    for (const auto& l : c["leaves"]) leaves.push_back(from_hex(l.get<std::string>()));
    EXPECT_EQ(to_hex(ledger::merkle_root(leaves)), c["root"]);
  }
}

TEST(Curve, GroupLaw) {
  const PlainPoint g = plain_generator();
  const PlainPoint o = PlainPoint::identity();
  EXPECT_EQ(g + o, g);
  EXPECT_EQ(g - g, o);
  EXPECT_EQ(g.dbl(), g + g);
  EXPECT_EQ((g + g) + g, g + (g + g));
  EXPECT_TRUE(g.mul(kGroupOrder).is_identity());
  EXPECT_TRUE(g.in_subgroup());
  EXPECT_TRUE(pairing_generator().in_subgroup());
  EXPECT_EQ(g.mul_signed(-5), -(g.mul(UInt<1>(5))));
  EXPECT_TRUE(g.mul_signed(0).is_identity());
}

TEST(Curve, MultiMulAgreesWithSeparateMultiplications) {
  Rng rng(7);
  const auto [p0, p1] = hash_to_point_pair("TS", "2009-07-15T01:00");
  const ScalarPair s{random_scalar(rng), random_scalar(rng)};
  EXPECT_EQ(inner_point(s, p0, p1), p0.mul(s[0].to_int()) + p1.mul(s[1].to_int()));
  const std::vector<PlainPoint> pts{p0, p1, plain_generator()};
  const std::vector<std::int64_t> ks{-123456, 0, 98765};
  EXPECT_EQ(PlainPoint::small_multi_mul(pts, ks), p0.mul_signed(-123456) + plain_generator().mul_signed(98765));
}

TEST(Curve, FixedBaseTableMatchesDoubleAndAdd) {
  Rng rng(8);
  const auto [p0, p1] = hash_to_point_pair("TS", "2009-07-15T02:00");
  const FixedBaseTable<PlainCurve> table(p0);
  for (int i = 0; i < 20; ++i) {
    const auto k = random_scalar(rng, false).to_int();
    EXPECT_EQ(table.mul(k), p0.mul(k));
  }
  EXPECT_TRUE(table.mul(UInt<4>()).is_identity());
  EXPECT_TRUE(table.mul(kGroupOrder).is_identity());
  (void)p1;
}

TEST(Encoding, RoundTripAndIdentity) {
  Rng rng(9);
  for (int i = 0; i < 10; ++i) {
    const PlainPoint p = plain_generator().mul(random_scalar(rng).to_int());
    EXPECT_EQ(PlainPoint::from_bytes(p.to_bytes()), p);
    const PairingPoint r = pairing_generator().mul(random_scalar(rng).to_int());
    EXPECT_EQ(PairingPoint::from_bytes(r.to_bytes()), r);
  }
  const PointBytes zero{};
  EXPECT_TRUE(PlainPoint::from_bytes(zero).is_identity());
  EXPECT_EQ(PlainPoint::identity().to_bytes(), zero);
}

TEST(Encoding, RejectsMalformedPoints) {
  PointBytes b = plain_generator().to_bytes();
  PointBytes bad_tag = b;
  bad_tag[0] = 0x04;
  EXPECT_FALSE(PlainPoint::try_from_bytes(bad_tag));
  EXPECT_FALSE(PlainPoint::try_from_bytes(std::span<const std::uint8_t>(b).first(39)));
  PointBytes nonzero_identity{};
  nonzero_identity[39] = 1;
  EXPECT_FALSE(PlainPoint::try_from_bytes(nonzero_identity));
  // x = p is not canonical.
  PointBytes big{};
  big[0] = 0x02;
  PlainFieldConfig::kModulus.to_be_bytes(std::span<std::uint8_t>(big).subspan(1));
  EXPECT_FALSE(PlainPoint::try_from_bytes(big));
  // Bytes above the field width must be zero.
  PointBytes wide = b;
  wide[1] = 0x01;
  EXPECT_FALSE(PlainPoint::try_from_bytes(wide));
  // An x with no point on the curve.
  for (std::uint64_t x = 1;; ++x) {
    if (PlainCurve::Field::from_u64(x * x * x + 10).is_square()) continue;
    PointBytes off{};
    off[0] = 0x02;
    UInt<4>(x).to_be_bytes(std::span<std::uint8_t>(off).subspan(1));
    EXPECT_FALSE(PlainPoint::try_from_bytes(off));
    break;
  }
  EXPECT_THROW(PlainPoint::from_bytes(bad_tag), DecodeError);
}

TEST(Encoding, PairingPointsOutsideSubgroupAreRejected) {
  for (std::uint64_t x = 2;; ++x) {
    const auto fx = PairingField::from_u64(x);
    const auto y = (fx.square() * fx + fx).sqrt();
    if (!y) continue;
    const auto p = PairingPoint::from_affine_unchecked(fx, *y);
    if (p.mul(kGroupOrder).is_identity()) continue;
    EXPECT_FALSE(PairingPoint::try_from_bytes(p.to_bytes()));
    EXPECT_TRUE(PairingPoint::try_from_bytes(p.mul_cofactor().to_bytes()));
    break;
  }
}

TEST(Pairing, BilinearAndNonDegenerate) {
  Rng rng(10);
  const PairingPoint g = pairing_generator();
  const GtElement e = pairing(g, g);
  EXPECT_FALSE(e == GtElement::one());
  const Scalar a = random_scalar(rng);
  const Scalar b = random_scalar(rng);
  const GtElement lhs = pairing(g.mul(a.to_int()), g.mul(b.to_int()));
  const Scalar ab = a * b;
  EXPECT_EQ(lhs, pairing(g, g.mul(ab.to_int())));
  EXPECT_EQ(lhs, pairing(g.mul(ab.to_int()), g));
  EXPECT_EQ(pairing(PairingPoint::identity(), g), GtElement::one());
  // e^q = 1 in the target group.
  GtElement acc = GtElement::one();
  GtElement base = e;
  for (std::size_t i = 0; i < kGroupOrder.bit_length(); ++i) {
    if (kGroupOrder.bit(i)) acc = acc * base;
    base = base.square();
  }
  EXPECT_EQ(acc, GtElement::one());
  const std::array<std::pair<PairingPoint, PairingPoint>, 2> pairs{std::make_pair(g.mul(a.to_int()), g),
                                                                   std::make_pair(-g, g.mul(a.to_int()))};
  EXPECT_EQ(multi_pairing(pairs), GtElement::one());
}

TEST(Hash, Sha256KnownAnswer) {
  EXPECT_EQ(to_hex(Sha256::digest(std::string_view("abc"))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(Sha256::digest(std::string_view(""))),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Bytes, HexRoundTripAndErrors) {
  const Bytes b{0x00, 0xab, 0xff};
  EXPECT_EQ(to_hex(b), "00abff");
  EXPECT_EQ(from_hex("00ABff"), b);
  EXPECT_THROW(from_hex("abc"), DecodeError);
  EXPECT_THROW(from_hex("zz"), DecodeError);
}

TEST(Codec, ReadingsRoundHalfAwayFromZero) {
  const FixedPointCodec c;
  EXPECT_EQ(c.encode_reading(1.234), 1234);
  EXPECT_EQ(c.encode_reading(0.0015), 2);
  EXPECT_EQ(c.encode_reading(-0.0015), -2);
  EXPECT_EQ(c.encode_reading(65.0), 65000);
  EXPECT_THROW(c.encode_reading(65.001), RangeError);
  EXPECT_THROW(c.encode_reading(std::nan("")), RangeError);
  EXPECT_DOUBLE_EQ(c.decode_reading(1234), 1.234);
  EXPECT_EQ(c.max_encoded_reading(), 65000);
}

TEST(Codec, ParsesDecimalsExactly) {
  const FixedPointCodec c;
  EXPECT_EQ(c.parse_reading("1.234"), 1234);
  EXPECT_EQ(c.parse_reading("0.1"), 100);
  EXPECT_EQ(c.parse_reading("65"), 65000);
  EXPECT_EQ(c.parse_reading("-2.5"), -2500);
  EXPECT_THROW(c.parse_reading("0.0005"), RangeError);
  EXPECT_THROW(c.parse_reading("65.001"), RangeError);
  EXPECT_THROW(c.parse_reading("1.2.3"), RangeError);
  EXPECT_THROW(c.parse_reading(""), RangeError);
  EXPECT_THROW(c.parse_reading("."), RangeError);
}

TEST(Codec, WeightsUsePowerOfTwoScale) {
  const FixedPointCodec c;
  EXPECT_EQ(c.weight_scale(), 1024);
  EXPECT_EQ(c.encode_weight(0.5), 512);
  EXPECT_EQ(c.encode_weight(std::ldexp(1.0, -11)), 1);
  EXPECT_EQ(c.encode_weight(-std::ldexp(1.0, -11)), -1);
  EXPECT_EQ(c.encode_weight(-1.25), -1280);
  EXPECT_THROW(c.encode_weight(32.0), RangeError);
  EXPECT_THROW(c.encode_weight(40.0), RangeError);
  EXPECT_THROW(FixedPointCodec(999, 10), RangeError);
  EXPECT_THROW(FixedPointCodec(1000, 21), RangeError);
}

TEST(Params, TextRoundTripAndMismatch) {
  const auto p = SystemParams::standard();
  const std::string text = p.to_text();
  const auto back = SystemParams::from_text(text);
  EXPECT_EQ(back.g, plain_generator());
  EXPECT_EQ(back.order_q, kGroupOrder);
  EXPECT_EQ(back.h1_label, "TS");
  auto j = nlohmann::json::parse(text);
  j["g"] = to_hex(plain_generator().dbl().to_bytes());
  EXPECT_THROW(SystemParams::from_text(j.dump()), DecodeError);
  EXPECT_THROW(SystemParams::from_text("{"), DecodeError);
}
