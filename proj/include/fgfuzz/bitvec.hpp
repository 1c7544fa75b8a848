#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgfuzz {

// MSB-first bit buffer. Bit 0 is the most significant bit of the message,
// matching the wire layout used by the codec (fields concatenated in
// declaration order, most-significant-bit first).
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits) : nbits_(nbits), bytes_((nbits + 7) / 8, 0) {}

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool get(std::size_t i) const {
    check_index(i);
    return (bytes_[i / 8] >> (7 - i % 8)) & 1;
  }

  void set(std::size_t i, bool v) {
    check_index(i);
    uint8_t mask = static_cast<uint8_t>(1u << (7 - i % 8));
    if (v)
      bytes_[i / 8] |= mask;
    else
      bytes_[i / 8] &= static_cast<uint8_t>(~mask);
  }

  void flip(std::size_t i) { set(i, !get(i)); }

  // Appends the low `width` bits of `value`, most significant first.
  void append_uint(uint64_t value, std::size_t width) {
    if (width > 64) throw std::invalid_argument("append_uint: width > 64");
    if (width < 64 && value >> width)
      throw std::invalid_argument("append_uint: value does not fit width");
    for (std::size_t k = 0; k < width; ++k) {
      nbits_++;
      if (bytes_.size() * 8 < nbits_) bytes_.push_back(0);
      set(nbits_ - 1, (value >> (width - 1 - k)) & 1);
    }
  }

  uint64_t read_uint(std::size_t pos, std::size_t width) const {
    if (width > 64) throw std::invalid_argument("read_uint: width > 64");
    if (pos + width > nbits_) throw std::out_of_range("read_uint: range past end");
    uint64_t v = 0;
    for (std::size_t k = 0; k < width; ++k) v = (v << 1) | (get(pos + k) ? 1 : 0);
    return v;
  }

  void write_uint(std::size_t pos, uint64_t value, std::size_t width) {
    if (width > 64) throw std::invalid_argument("write_uint: width > 64");
    if (pos + width > nbits_) throw std::out_of_range("write_uint: range past end");
    for (std::size_t k = 0; k < width; ++k)
      set(pos + k, (value >> (width - 1 - k)) & 1);
  }

  // Replaces bits [pos, pos+other.size()) with `other`.
  void write_bits(std::size_t pos, const BitVec& other) {
    if (pos + other.size() > nbits_) throw std::out_of_range("write_bits: range past end");
    for (std::size_t k = 0; k < other.size(); ++k) set(pos + k, other.get(k));
  }

  BitVec slice(std::size_t pos, std::size_t width) const {
    if (pos + width > nbits_) throw std::out_of_range("slice: range past end");
    BitVec out(width);
    for (std::size_t k = 0; k < width; ++k) out.set(k, get(pos + k));
    return out;
  }

  void append_bits(const BitVec& other) {
    for (std::size_t k = 0; k < other.size(); ++k) {
      nbits_++;
      if (bytes_.size() * 8 < nbits_) bytes_.push_back(0);
      set(nbits_ - 1, other.get(k));
    }
  }

  // Hex dump, MSB first; trailing partial byte is left-aligned.
  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes_.size() * 2);
    for (uint8_t b : bytes_) {
      s.push_back(digits[b >> 4]);
      s.push_back(digits[b & 0xf]);
    }
    return s;
  }

  const std::vector<uint8_t>& bytes() const { return bytes_; }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.bytes_ == b.bytes_;
  }
  friend bool operator!=(const BitVec& a, const BitVec& b) { return !(a == b); }

private:
  void check_index(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("BitVec index out of range");
  }

  std::size_t nbits_ = 0;
  std::vector<uint8_t> bytes_;
};

} // namespace fgfuzz
