#pragma once

#include <gmpxx.h>

#include <cstdint>

namespace cmosb::fed::paillier {

inline constexpr int kDefaultModulusBits = 512;

struct PublicKey {
  mpz_class n;
  mpz_class n_squared;
  int modulus_bits = 0;
  std::uint64_t fingerprint = 0;
};

struct PrivateKey {
  PublicKey public_key;
  mpz_class lambda;  // lcm(p-1, q-1)
  mpz_class mu;      // lambda^{-1} mod n (generator g = n + 1)
};

struct KeyPair {
  PublicKey public_key;
  PrivateKey private_key;
};

// Deterministic in `seed`; the primes are each modulus_bits / 2 long.
KeyPair generate_keypair(int modulus_bits, std::uint64_t seed);

// Plaintexts live in Z_n; callers map signed values with to_residue / from_residue.
mpz_class encrypt(const PublicKey& key, const mpz_class& plaintext, gmp_randclass& rng);
mpz_class add(const PublicKey& key, const mpz_class& a, const mpz_class& b);
// Throws IntegrityError when the ciphertext is not a valid encryption under `key`.
mpz_class decrypt(const PrivateKey& key, const mpz_class& ciphertext);

mpz_class to_residue(const PublicKey& key, std::int64_t value);
// Values above n/2 decode as negative; throws RangeError when outside int64.
std::int64_t from_residue(const PublicKey& key, const mpz_class& residue);

}  // namespace cmosb::fed::paillier
