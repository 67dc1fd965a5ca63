#include "cmosb/he_scheme.hpp"

#include <string>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::fed {

void HECostModel::validate() const {
  if (!(t_enc >= 0.0) || !(t_dec >= 0.0) || !(t_add >= 0.0))
    throw ParameterError("HECostModel: per-operation times must be non-negative");
}

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::Counting ? "counting" : "paillier";
}

std::optional<BackendKind> parse_backend(std::string_view name) {
  if (name == "counting") return BackendKind::Counting;
  if (name == "paillier") return BackendKind::Paillier;
  return std::nullopt;
}

Ciphertext HomomorphicScheme::encrypt(double value) {
  const std::int64_t encoded = codec_.encode(value);
  ++counters_.enc;
  return encrypt_encoded(encoded);
}

Ciphertext HomomorphicScheme::add(const Ciphertext& a, const Ciphertext& b) {
  if (a.key_id != key_id() || b.key_id != key_id())
    throw IntegrityError("he add: operands encrypted under a different key");
  ++counters_.add;
  return add_raw(a, b);
}

double HomomorphicScheme::decrypt(const Ciphertext& ct) {
  if (ct.key_id != key_id()) throw IntegrityError("he decrypt: ciphertext from a different key");
  ++counters_.dec;
  return codec_.decode(decrypt_encoded(ct));
}

CountingScheme::CountingScheme(std::uint64_t seed, FixedPointCodec codec)
    : HomomorphicScheme(codec), key_id_(derive_seed(seed, {0xc0de})) {}

Ciphertext CountingScheme::encrypt_encoded(std::int64_t value) { return {key_id_, value}; }

Ciphertext CountingScheme::add_raw(const Ciphertext& a, const Ciphertext& b) const {
  std::int64_t out = 0;
  if (__builtin_add_overflow(std::get<std::int64_t>(a.payload), std::get<std::int64_t>(b.payload),
                             &out))
    throw RangeError("he add: fixed-point accumulator overflow");
  return {key_id_, out};
}

std::int64_t CountingScheme::decrypt_encoded(const Ciphertext& ct) const {
  return std::get<std::int64_t>(ct.payload);
}

PaillierScheme::PaillierScheme(std::uint64_t seed, int modulus_bits, FixedPointCodec codec)
    : HomomorphicScheme(codec),
      keys_(paillier::generate_keypair(modulus_bits, seed)),
      rng_(gmp_randinit_mt) {
  rng_.seed(mpz_class(std::to_string(derive_seed(seed, {0xe4c})), 10));
}

Ciphertext PaillierScheme::encrypt_encoded(std::int64_t value) {
  const auto& pub = keys_.public_key;
  return {pub.fingerprint, paillier::encrypt(pub, paillier::to_residue(pub, value), rng_)};
}

Ciphertext PaillierScheme::add_raw(const Ciphertext& a, const Ciphertext& b) const {
  const auto& pub = keys_.public_key;
  return {pub.fingerprint,
          paillier::add(pub, std::get<mpz_class>(a.payload), std::get<mpz_class>(b.payload))};
}

std::int64_t PaillierScheme::decrypt_encoded(const Ciphertext& ct) const {
  const auto& m = paillier::decrypt(keys_.private_key, std::get<mpz_class>(ct.payload));
  return paillier::from_residue(keys_.public_key, m);
}

std::unique_ptr<HomomorphicScheme> make_scheme(BackendKind kind, std::uint64_t seed,
                                               int modulus_bits) {
  if (kind == BackendKind::Counting) return std::make_unique<CountingScheme>(seed);
  return std::make_unique<PaillierScheme>(seed, modulus_bits);
}

}  // namespace cmosb::fed
