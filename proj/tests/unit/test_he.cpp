#include <gtest/gtest.h>

#include <random>

#include "cmosb/error.hpp"
#include "cmosb/fixed_point.hpp"
#include "cmosb/he_scheme.hpp"
#include "cmosb/paillier.hpp"

using namespace cmosb;
using namespace cmosb::fed;

namespace {

std::vector<std::unique_ptr<HomomorphicScheme>> both(std::uint64_t seed) {
  std::vector<std::unique_ptr<HomomorphicScheme>> out;
  out.push_back(make_scheme(BackendKind::Counting, seed));
  out.push_back(make_scheme(BackendKind::Paillier, seed, 256));
  return out;
}

}  // namespace

TEST(FixedPoint, ExactRoundTrips) {
  const FixedPointCodec codec;
  EXPECT_EQ(codec.fraction_bits(), 40);
  EXPECT_EQ(codec.decode(codec.encode(-0.5)), -0.5);
  EXPECT_EQ(codec.decode(codec.encode(3.0)), 3.0);
  EXPECT_EQ(codec.encode(1.0), std::int64_t{1} << 40);
  EXPECT_NEAR(codec.quantize(0.1), 0.1, 1.0 / codec.scale());
  EXPECT_THROW(codec.encode(1e30), RangeError);
  EXPECT_THROW(codec.encode(-1e30), RangeError);
}

TEST(Scheme, AddTwoAndThree) {
  for (auto& s : both(1)) {
    EXPECT_EQ(s->decrypt(s->add(s->encrypt(2.0), s->encrypt(3.0))), 5.0) << to_string(s->kind());
    EXPECT_EQ(s->decrypt(s->encrypt(-0.5)), -0.5);
  }
}

TEST(Scheme, RandomPairsMatchPlaintextSum) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-10, 10);
  for (auto& s : both(2)) {
    const auto& codec = s->codec();
    for (int i = 0; i < 100; ++i) {
      const double a = U(rng), b = U(rng);
      const double want = codec.decode(codec.encode(a) + codec.encode(b));
      EXPECT_EQ(s->decrypt(s->add(s->encrypt(a), s->encrypt(b))), want);
      EXPECT_NEAR(want, a + b, 2.0 / codec.scale());
    }
  }
}

TEST(Scheme, CountersAgreeAcrossBackends) {
  auto schemes = both(4);
  for (auto& s : schemes) {
    auto acc = s->encrypt(0.25);
    for (int i = 0; i < 7; ++i) acc = s->add(acc, s->encrypt(i * 0.5));
    s->decrypt(acc);
    s->decrypt(s->encrypt(1.0));
  }
  EXPECT_EQ(schemes[0]->counters(), schemes[1]->counters());
  EXPECT_EQ(schemes[0]->counters(), (HECounters{9, 2, 7}));
}

TEST(Scheme, WrongKeyIsIntegrityError) {
  for (auto kind : {BackendKind::Counting, BackendKind::Paillier}) {
    auto a = make_scheme(kind, 10, 256);
    auto b = make_scheme(kind, 11, 256);
    const auto ct = a->encrypt(1.5);
    EXPECT_THROW(b->decrypt(ct), IntegrityError);
    EXPECT_THROW(b->add(ct, b->encrypt(1.0)), IntegrityError);
  }
}

TEST(Scheme, AccumulatorOverflowIsRangeError) {
  auto s = make_scheme(BackendKind::Counting, 1);
  const double big = s->codec().max_abs() * 0.9;
  const auto ct = s->encrypt(big);
  auto acc = s->add(ct, ct);  // 1.8 * 2^62 still fits
  EXPECT_THROW(acc = s->add(acc, ct), RangeError);
}

TEST(Scheme, ThousandRandomRoundTrips) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1000, 1000);
  auto s = make_scheme(BackendKind::Paillier, 5, 256);
  const auto& codec = s->codec();
  for (int i = 0; i < 1000; ++i) {
    const double a = codec.quantize(U(rng)), b = codec.quantize(U(rng));
    ASSERT_EQ(s->decrypt(s->add(s->encrypt(a), s->encrypt(b))), codec.decode(codec.encode(a) + codec.encode(b)));
  }
}

TEST(Backend, ParseNames) {
  EXPECT_EQ(parse_backend("counting"), BackendKind::Counting);
  EXPECT_EQ(parse_backend("paillier"), BackendKind::Paillier);
  EXPECT_FALSE(parse_backend("rsa").has_value());
  EXPECT_EQ(to_string(BackendKind::Paillier), "paillier");
}

TEST(CostModel, Validation) {
  HECostModel m;
  EXPECT_NO_THROW(m.validate());
  m.t_add = -1;
  EXPECT_THROW(m.validate(), ParameterError);
}

TEST(Paillier, KeysDeterministicAndSized) {
  const auto a = paillier::generate_keypair(256, 3);
  const auto b = paillier::generate_keypair(256, 3);
  EXPECT_EQ(a.public_key.n, b.public_key.n);
  EXPECT_EQ(a.public_key.fingerprint, b.public_key.fingerprint);
  EXPECT_GE(mpz_sizeinbase(a.public_key.n.get_mpz_t(), 2), 255u);
  EXPECT_EQ(a.public_key.n_squared, a.public_key.n * a.public_key.n);
}

TEST(Paillier, RawHomomorphismAndSigns) {
  const auto keys = paillier::generate_keypair(256, 8);
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(1);
  const auto& pk = keys.public_key;
  for (std::int64_t a : {-7, 0, 123456789}) {
    for (std::int64_t b : {-100, 5}) {
      const auto ct = paillier::add(pk, paillier::encrypt(pk, paillier::to_residue(pk, a), rng),
                                    paillier::encrypt(pk, paillier::to_residue(pk, b), rng));
      EXPECT_EQ(paillier::from_residue(pk, paillier::decrypt(keys.private_key, ct)), a + b);
    }
  }
  // Probabilistic: two encryptions of one value differ.
  EXPECT_NE(paillier::encrypt(pk, 5, rng), paillier::encrypt(pk, 5, rng));
}
