#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace himc {

// Simulated time is kept in CPU cycles (2 GHz core clock, 500 ps per cycle).
// Energy is kept in integer femtojoules so reports are byte-stable across
// platforms; conversion to pJ/ns happens only at emission.
using cycles_t = std::uint64_t;
using fj_t = std::int64_t;
using block_id_t = std::uint32_t;

inline constexpr std::uint64_t kPicosecondsPerCycle = 500;

inline constexpr std::uint64_t cycles_to_ps(cycles_t c) { return c * kPicosecondsPerCycle; }
inline constexpr cycles_t ns_to_cycles(std::uint64_t ns) { return ns * 2; }

/// mW -> fJ per cycle at 2 GHz (1 mW = 500 fJ per 500 ps cycle).
inline constexpr fj_t mw_to_fj_per_cycle(std::int64_t milliwatts) { return milliwatts * 500; }

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct TraceError : std::runtime_error {
  explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses a non-negative decimal such as "15.604" into an integer number of
/// thousandths (pJ -> fJ, mW -> uW). Exact for up to three fraction digits.
inline std::int64_t parse_milli(std::string_view text) {
  std::int64_t whole = 0;
  std::size_t i = 0;
  if (i >= text.size()) throw ConfigError("empty decimal field");
  for (; i < text.size() && text[i] != '.'; ++i) {
    if (text[i] < '0' || text[i] > '9') throw ConfigError("bad decimal: " + std::string(text));
    whole = whole * 10 + (text[i] - '0');
  }
  std::int64_t frac = 0;
  int digits = 0;
  if (i < text.size()) {
    for (++i; i < text.size(); ++i, ++digits) {
      if (text[i] < '0' || text[i] > '9' || digits >= 3)
        throw ConfigError("bad decimal: " + std::string(text));
      frac = frac * 10 + (text[i] - '0');
    }
  }
  for (; digits < 3; ++digits) frac *= 10;
  return whole * 1000 + frac;
}

/// Renders an integer number of thousandths back to its shortest decimal form
/// ("15.604", "0.75", "2"). Inverse of parse_milli for canonical inputs.
inline std::string format_milli(std::int64_t milli) {
  std::int64_t whole = milli / 1000;
  std::int64_t frac = milli % 1000;
  std::string out = std::to_string(whole);
  if (frac != 0) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%03lld", static_cast<long long>(frac));
    std::string f(buf);
    while (!f.empty() && f.back() == '0') f.pop_back();
    out += "." + f;
  }
  return out;
}

/// SplitMix64: tiny deterministic generator used for seeding and for the
/// counter-based sample streams (stable across platforms, unlike libstdc++
/// distributions).
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix64(state_); }
  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next() >> 32); }
  /// Uniform in (0, 1]: never returns 0 so it is safe under log().
  double next_unit_open() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a over little-endian 32-bit words; used for final-data checksums.
inline std::uint64_t fnv1a64_words(const std::uint32_t* words, std::size_t count) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint32_t w = words[i];
    for (int b = 0; b < 4; ++b) {
      h ^= (w >> (8 * b)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

}  // namespace himc
