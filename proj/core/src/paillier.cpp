#include "cmosb/paillier.hpp"

#include <limits>
#include <string>

#include "cmosb/error.hpp"
#include "cmosb/random.hpp"

namespace cmosb::fed::paillier {
namespace {

mpz_class random_prime(gmp_randclass& rng, int bits) {
  mpz_class candidate = rng.get_z_bits(bits);
  mpz_setbit(candidate.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 1));
  mpz_setbit(candidate.get_mpz_t(), static_cast<mp_bitcnt_t>(bits - 2));
  mpz_class prime;
  mpz_nextprime(prime.get_mpz_t(), candidate.get_mpz_t());
  return prime;
}

std::uint64_t fingerprint_of(const mpz_class& n) {
  std::uint64_t h = 0;
  const std::size_t limbs = mpz_size(n.get_mpz_t());
  for (std::size_t i = 0; i < limbs; ++i)
    h = mix64(h ^ static_cast<std::uint64_t>(mpz_getlimbn(n.get_mpz_t(), static_cast<mp_size_t>(i))));
  return h;
}

}  // namespace

KeyPair generate_keypair(int modulus_bits, std::uint64_t seed) {
  if (modulus_bits < 128 || modulus_bits % 2 != 0)
    throw ParameterError("paillier: modulus size must be an even number of bits >= 128");
  gmp_randclass rng(gmp_randinit_mt);
  rng.seed(mpz_class(std::to_string(derive_seed(seed, {0x9a11})), 10));

  mpz_class p, q, n;
  do {
    p = random_prime(rng, modulus_bits / 2);
    q = random_prime(rng, modulus_bits / 2);
    n = p * q;
  } while (p == q || mpz_sizeinbase(n.get_mpz_t(), 2) != static_cast<std::size_t>(modulus_bits));

  KeyPair kp;
  kp.public_key.n = n;
  kp.public_key.n_squared = n * n;
  kp.public_key.modulus_bits = modulus_bits;
  kp.public_key.fingerprint = fingerprint_of(n);

  mpz_class pm1 = p - 1;
  mpz_class qm1 = q - 1;
  mpz_class lambda;
  mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
  mpz_class mu;
  if (mpz_invert(mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0)
    throw ParameterError("paillier: lambda not invertible modulo n");
  kp.private_key.public_key = kp.public_key;
  kp.private_key.lambda = lambda;
  kp.private_key.mu = mu;
  return kp;
}

mpz_class encrypt(const PublicKey& key, const mpz_class& plaintext, gmp_randclass& rng) {
  mpz_class r;
  do {
    r = rng.get_z_range(key.n);
  } while (r == 0 || gcd(r, key.n) != 1);
  // (1 + n)^m = 1 + m*n (mod n^2)
  mpz_class gm = (1 + plaintext * key.n) % key.n_squared;
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), key.n.get_mpz_t(), key.n_squared.get_mpz_t());
  mpz_class c = (gm * rn) % key.n_squared;
  return c;
}

mpz_class add(const PublicKey& key, const mpz_class& a, const mpz_class& b) {
  mpz_class c = (a * b) % key.n_squared;
  return c;
}

mpz_class decrypt(const PrivateKey& key, const mpz_class& ciphertext) {
  const auto& pub = key.public_key;
  if (ciphertext <= 0 || ciphertext >= pub.n_squared)
    throw IntegrityError("paillier: ciphertext outside Z_{n^2}");
  mpz_class u;
  mpz_powm(u.get_mpz_t(), ciphertext.get_mpz_t(), key.lambda.get_mpz_t(), pub.n_squared.get_mpz_t());
  mpz_class t = u - 1;
  if (mpz_divisible_p(t.get_mpz_t(), pub.n.get_mpz_t()) == 0)
    throw IntegrityError("paillier: ciphertext does not decrypt under this key");
  mpz_class l = t / pub.n;
  mpz_class m = (l * key.mu) % pub.n;
  return m;
}

mpz_class to_residue(const PublicKey& key, std::int64_t value) {
  mpz_class v(std::to_string(value), 10);
  if (v < 0) v += key.n;
  return v;
}

std::int64_t from_residue(const PublicKey& key, const mpz_class& residue) {
  mpz_class v = residue;
  mpz_class half = key.n / 2;
  if (v > half) v -= key.n;
  static const mpz_class lo(std::to_string(std::numeric_limits<std::int64_t>::min()), 10);
  static const mpz_class hi(std::to_string(std::numeric_limits<std::int64_t>::max()), 10);
  if (v < lo || v > hi) throw RangeError("paillier: decrypted value exceeds the fixed-point range");
  return std::stoll(v.get_str(10));
}

}  // namespace cmosb::fed::paillier
