#include "dsm/otf.hpp"

#include <sstream>
#include <stdexcept>

#include "dsm/engine.hpp"

namespace dsm {

namespace {

// Smallest width whose two's complement range [-2^(w-1), 2^(w-1) - 1]
// contains x.
std::size_t twos_complement_width(const Integer& x) {
  std::size_t w = 1;
  while (true) {
    Integer lo = -(Integer(1) << (w - 1));
    Integer hi = (Integer(1) << (w - 1)) - 1;
    if (x >= lo && x <= hi) return w;
    ++w;
  }
}

OtfAccumulator::Bits encode(const Integer& x, std::size_t width) {
  // x mod 2^width, emitted MSB first.
  Integer m = x;
  Integer modulus = Integer(1) << width;
  mpz_fdiv_r(m.get_mpz_t(), m.get_mpz_t(), modulus.get_mpz_t());
  OtfAccumulator::Bits bits(width, 0);
  for (std::size_t pos = 0; pos < width; ++pos)
    bits[width - 1 - pos] = mpz_tstbit(m.get_mpz_t(), pos);
  return bits;
}

Integer decode(const OtfAccumulator::Bits& bits) {
  if (bits.empty()) return 0;
  Integer value = bits[0] ? -1 : 0;  // sign extension
  for (std::size_t j = 1; j < bits.size(); ++j) value = 2 * value + bits[j];
  return value;
}

std::string bit_string(const OtfAccumulator::Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

OtfAccumulator OtfAccumulator::init(OtfMode mode, const Integer& v1) {
  OtfAccumulator acc;
  acc.mode_ = mode;
  const int lo = (mode == OtfMode::narrow) ? -1 : -2;
  const int hi = (mode == OtfMode::narrow) ? 0 : 1;
  std::size_t width = 1;
  for (int k = lo; k <= hi; ++k) {
    std::size_t w = twos_complement_width(v1 + k);
    if (w > width) width = w;
  }
  acc.length_ = width;
  for (int k = lo; k <= hi; ++k) acc.vectors_[k] = encode(v1 + k, width);
  return acc;
}

OtfAccumulator OtfAccumulator::append(const Integer& beta, const Integer& v) const {
  if (!is_power_of_two(beta) || beta < 2)
    throw std::invalid_argument("otf: radix must be a power of two, >= 2");
  const unsigned mu = log2_exact(beta);
  if (mode_ == OtfMode::narrow) {
    if (abs(v) >= beta)
      throw std::invalid_argument("otf: narrow mode requires |v| < beta = " + beta.get_str());
  } else {
    if (abs(v) >= 2 * beta - 1)
      throw std::invalid_argument("otf: wide mode requires |v| < 2*beta - 1 = " +
                                  Integer(2 * beta - 1).get_str());
  }

  OtfAccumulator next = *this;
  next.length_ = length_ + mu;
  next.mu_history_.push_back(mu);

  StepRecord record;
  record.mu = mu;
  record.digit = v;
  for (auto& [offset, target] : next.vectors_) {
    Integer z = v + offset;
    // z = j * 2^mu + tail with 0 <= tail < 2^mu; j picks the predecessor.
    Integer j, tail;
    mpz_fdiv_qr(j.get_mpz_t(), tail.get_mpz_t(), z.get_mpz_t(), beta.get_mpz_t());
    int selector = static_cast<int>(j.get_si());
    auto it = vectors_.find(selector);
    if (it == vectors_.end()) throw std::logic_error("otf: selector outside maintained set");
    Bits appended = encode(tail, mu);
    Bits combined = it->second;
    combined.insert(combined.end(), appended.begin(), appended.end());
    target = std::move(combined);
    record.updates.push_back({offset, selector, bit_string(appended)});
  }
  next.history_.push_back(std::move(record));
  return next;
}

Integer OtfAccumulator::value() const { return value_at_offset(0); }

Integer OtfAccumulator::value_at_offset(int offset) const { return decode(bits(offset)); }

Rational OtfAccumulator::head(const Rational& cumulative_base) const {
  return Rational(value()) / cumulative_base;
}

const OtfAccumulator::Bits& OtfAccumulator::bits(int offset) const {
  auto it = vectors_.find(offset);
  if (it == vectors_.end()) throw std::out_of_range("otf: offset not maintained in this mode");
  return it->second;
}

std::vector<int> OtfAccumulator::offsets() const {
  std::vector<int> out;
  for (const auto& [k, _] : vectors_) out.push_back(k);
  return out;
}

std::string OtfAccumulator::debug_dump() const {
  std::ostringstream out;
  for (std::size_t step = 0; step < history_.size(); ++step) {
    const auto& rec = history_[step];
    out << "step " << step + 2 << ": mu=" << rec.mu << " v=" << rec.digit << '\n';
    for (const auto& upd : rec.updates) {
      out << "  A" << (upd.target_offset >= 0 ? "+" : "") << upd.target_offset << " <- A"
          << (upd.selector_offset >= 0 ? "+" : "") << upd.selector_offset << " ++ "
          << upd.appended_bits << '\n';
    }
  }
  out << "vectors:\n";
  for (const auto& [offset, bits] : vectors_)
    out << "  A" << (offset >= 0 ? "+" : "") << offset << " = " << bit_string(bits) << " ("
        << decode(bits) << ")\n";
  return out.str();
}

}  // namespace dsm
