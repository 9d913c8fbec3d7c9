#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dsm/numeric.hpp"

namespace dsm {

enum class OtfMode { narrow, wide };

// On-the-fly digit accumulation for power-of-two radices. Maintains
// two's-complement bit vectors for A = B*H and its decremented neighbours
// ({A-1, A} in narrow mode, {A-2 .. A+1} in wide mode), updated only by
// selecting a predecessor vector and appending the digit's trailing bits —
// previously accumulated bits are copied verbatim, never recomputed.
class OtfAccumulator {
 public:
  using Bits = std::vector<std::uint8_t>;  // MSB first, sign bit explicit

  // Narrow mode accepts digits |v| < beta (after the first), wide mode
  // |v| < 2*beta - 1. The first digit is unrestricted.
  static OtfAccumulator init(OtfMode mode, const Integer& v1);

  // Functional update: A_new = beta * A_old + v. beta = 2^mu with mu >= 1.
  OtfAccumulator append(const Integer& beta, const Integer& v) const;

  Integer value() const;                     // readback of A
  Integer value_at_offset(int offset) const; // readback of A + offset
  Rational head(const Rational& cumulative_base) const;  // H = A / B

  OtfMode mode() const { return mode_; }
  std::size_t bit_length() const { return length_; }
  const Bits& bits(int offset) const;
  std::vector<int> offsets() const;
  const std::vector<unsigned>& radix_bits_history() const { return mu_history_; }

  struct TargetUpdate {
    int target_offset;
    int selector_offset;
    std::string appended_bits;
  };
  struct StepRecord {
    unsigned mu;
    Integer digit;
    std::vector<TargetUpdate> updates;
  };
  const std::vector<StepRecord>& history() const { return history_; }

  // Per step: binary strings of each maintained vector, selector chosen,
  // appended bits.
  std::string debug_dump() const;

 private:
  OtfMode mode_ = OtfMode::narrow;
  std::size_t length_ = 0;
  std::map<int, Bits> vectors_;
  std::vector<unsigned> mu_history_;
  std::vector<StepRecord> history_;
};

}  // namespace dsm
