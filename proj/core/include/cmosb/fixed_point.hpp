#pragma once

#include <cstdint>

namespace cmosb::fed {

// Signed fixed-point codec for reals carried through additive HE.
class FixedPointCodec {
 public:
  static constexpr int kDefaultFractionBits = 40;
  // Encoded magnitudes stay below 2^62 so sums of a few encodings cannot wrap int64.
  static constexpr int kMagnitudeBits = 62;

  explicit FixedPointCodec(int fraction_bits = kDefaultFractionBits);

  int fraction_bits() const { return fraction_bits_; }
  double scale() const { return scale_; }
  double max_abs() const { return max_abs_; }

  // Throws RangeError when |value| * scale does not fit.
  std::int64_t encode(double value) const;
  double decode(std::int64_t encoded) const;
  // encode then decode: the value the protocol effectively transports.
  double quantize(double value) const { return decode(encode(value)); }

 private:
  int fraction_bits_;
  double scale_;
  double max_abs_;
};

}  // namespace cmosb::fed
