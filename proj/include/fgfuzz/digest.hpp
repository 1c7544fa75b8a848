#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fgfuzz {

// Self-contained SHA-256. The simulator's key schedule and the campaign's
// per-case seed mixing need a deterministic, input-sensitive digest; a
// vendored implementation keeps the toolkit dependency-free.
class Sha256 {
public:
  Sha256();
  void update(const void* data, std::size_t len);
  void update(const std::string& s) { update(s.data(), s.size()); }
  std::array<uint8_t, 32> finish();

  static std::array<uint8_t, 32> hash(const void* data, std::size_t len);
  static std::array<uint8_t, 32> hash(const std::string& s) { return hash(s.data(), s.size()); }

private:
  void process_block(const uint8_t* block);

  std::array<uint32_t, 8> state_;
  std::array<uint8_t, 64> buffer_;
  std::size_t buffered_ = 0;
  uint64_t total_len_ = 0;
};

std::string hex_string(const uint8_t* data, std::size_t len);

// Digest over a tag plus length-prefixed byte strings; the building block
// for key derivation, MACs and seed mixing.
std::array<uint8_t, 32> tagged_digest(const std::string& tag,
                                      const std::vector<std::vector<uint8_t>>& parts);

// First 8 bytes of SHA-256 of `s`, big-endian. Used to mix case ids into seeds.
uint64_t digest64(const std::string& s);

// splitmix64: tiny deterministic PRNG used wherever the spec calls for
// seeded randomness. Fully pinned, no standard-library distribution
// dependence, so serialized output is byte-identical across platforms.
class Prng {
public:
  explicit Prng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) via rejection sampling; bound must be > 0.
  uint64_t below(uint64_t bound) {
    uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Deterministic Fisher-Yates shuffle.
  template <typename T> void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

private:
  uint64_t state_;
};

inline uint64_t mix_seed(uint64_t global_seed, const std::string& label) {
  return global_seed ^ digest64(label);
}

} // namespace fgfuzz
