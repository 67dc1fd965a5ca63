#include "cmosb/fixed_point.hpp"

#include <cmath>
#include <string>

#include "cmosb/error.hpp"

namespace cmosb::fed {

FixedPointCodec::FixedPointCodec(int fraction_bits) : fraction_bits_(fraction_bits) {
  if (fraction_bits < 0 || fraction_bits > 52)
    throw ParameterError("FixedPointCodec: fraction bits must be in [0, 52]");
  scale_ = std::ldexp(1.0, fraction_bits);
  max_abs_ = std::ldexp(1.0, kMagnitudeBits - fraction_bits);
}

std::int64_t FixedPointCodec::encode(double value) const {
  if (!std::isfinite(value) || std::abs(value) >= max_abs_)
    throw RangeError("fixed-point overflow encoding " + std::to_string(value) + " at 2^" +
                     std::to_string(fraction_bits_));
  return static_cast<std::int64_t>(std::llround(value * scale_));
}

double FixedPointCodec::decode(std::int64_t encoded) const {
  return static_cast<double>(encoded) / scale_;
}

}  // namespace cmosb::fed
