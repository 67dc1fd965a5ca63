#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <variant>

#include "cmosb/fixed_point.hpp"
#include "cmosb/paillier.hpp"

namespace cmosb::fed {

struct HECounters {
  std::uint64_t enc = 0;
  std::uint64_t dec = 0;
  std::uint64_t add = 0;

  HECounters& operator+=(const HECounters& o) {
    enc += o.enc;
    dec += o.dec;
    add += o.add;
    return *this;
  }
  friend HECounters operator+(HECounters a, const HECounters& b) { return a += b; }
  friend HECounters operator-(const HECounters& a, const HECounters& b) {
    return {a.enc - b.enc, a.dec - b.dec, a.add - b.add};
  }
  friend bool operator==(const HECounters&, const HECounters&) = default;
};

// Seconds per operation.
struct HECostModel {
  double t_enc = 2e-3;
  double t_dec = 1e-3;
  double t_add = 1e-5;

  void validate() const;
};

enum class BackendKind { Counting, Paillier };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> parse_backend(std::string_view name);

struct Ciphertext {
  std::uint64_t key_id = 0;
  // Counting backend carries the fixed-point plaintext; Paillier carries c in Z_{n^2}.
  std::variant<std::int64_t, mpz_class> payload;
};

// Additive HE over fixed-point reals with operation accounting. Encryption,
// addition and decryption each bump their counter; both backends see the same
// call sequence for the same protocol run, so their counters agree.
class HomomorphicScheme {
 public:
  explicit HomomorphicScheme(FixedPointCodec codec) : codec_(codec) {}
  virtual ~HomomorphicScheme() = default;
  HomomorphicScheme(const HomomorphicScheme&) = delete;
  HomomorphicScheme& operator=(const HomomorphicScheme&) = delete;

  virtual BackendKind kind() const = 0;
  virtual std::uint64_t key_id() const = 0;

  Ciphertext encrypt(double value);
  Ciphertext add(const Ciphertext& a, const Ciphertext& b);
  // Throws IntegrityError for ciphertexts produced under another key.
  double decrypt(const Ciphertext& ct);

  const HECounters& counters() const { return counters_; }
  const FixedPointCodec& codec() const { return codec_; }

 protected:
  virtual Ciphertext encrypt_encoded(std::int64_t value) = 0;
  virtual Ciphertext add_raw(const Ciphertext& a, const Ciphertext& b) const = 0;
  virtual std::int64_t decrypt_encoded(const Ciphertext& ct) const = 0;

 private:
  FixedPointCodec codec_;
  HECounters counters_;
};

// Stores the encoded plaintext; exact integer arithmetic, no cryptography.
class CountingScheme final : public HomomorphicScheme {
 public:
  explicit CountingScheme(std::uint64_t seed, FixedPointCodec codec = FixedPointCodec());

  BackendKind kind() const override { return BackendKind::Counting; }
  std::uint64_t key_id() const override { return key_id_; }

 protected:
  Ciphertext encrypt_encoded(std::int64_t value) override;
  Ciphertext add_raw(const Ciphertext& a, const Ciphertext& b) const override;
  std::int64_t decrypt_encoded(const Ciphertext& ct) const override;

 private:
  std::uint64_t key_id_;
};

class PaillierScheme final : public HomomorphicScheme {
 public:
  PaillierScheme(std::uint64_t seed, int modulus_bits = paillier::kDefaultModulusBits,
                 FixedPointCodec codec = FixedPointCodec());

  BackendKind kind() const override { return BackendKind::Paillier; }
  std::uint64_t key_id() const override { return keys_.public_key.fingerprint; }
  const paillier::PublicKey& public_key() const { return keys_.public_key; }

 protected:
  Ciphertext encrypt_encoded(std::int64_t value) override;
  Ciphertext add_raw(const Ciphertext& a, const Ciphertext& b) const override;
  std::int64_t decrypt_encoded(const Ciphertext& ct) const override;

 private:
  paillier::KeyPair keys_;
  gmp_randclass rng_;
};

std::unique_ptr<HomomorphicScheme> make_scheme(BackendKind kind, std::uint64_t seed,
                                               int modulus_bits = paillier::kDefaultModulusBits);

}  // namespace cmosb::fed
