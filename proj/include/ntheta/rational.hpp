#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include <gmpxx.h>

#include "ntheta/errors.hpp"

namespace ntheta {

using Rational = mpq_class;
using Integer = mpz_class;

/// "p/q" or "p" when integral. Never floating point.
inline std::string to_string(Rational q) {
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Parses "-3", "7/2" or "  4 / 6 " (normalized).
inline Rational parse_rational(std::string_view text) {
  std::string cleaned;
  for (char c : text)
    if (c != ' ' && c != '\t') cleaned.push_back(c);
  detail::require(!cleaned.empty(), "rational-syntax", "empty rational literal");
  const auto slash = cleaned.find('/');
  auto valid_int = [](std::string_view s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  const std::string num = cleaned.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : cleaned.substr(slash + 1);
  detail::require(valid_int(num) && valid_int(den), "rational-syntax",
                  "malformed rational literal '" + std::string(text) + "'");
  Integer n(num[0] == '+' ? num.substr(1) : num, 10);
  Integer d(den[0] == '+' ? den.substr(1) : den, 10);
  detail::require(d != 0, "rational-syntax", "zero denominator in '" + std::string(text) + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

/// Deterministic generator. Draws are defined through mt19937_64 raw output
/// and rejection sampling so sequences are identical on every platform
/// (std::uniform_int_distribution is implementation-defined).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  std::int64_t nonzero(std::int64_t lo, std::int64_t hi) {
    for (;;) {
      auto x = uniform(lo, hi);
      if (x != 0) return x;
    }
  }

  bool coin() { return uniform(0, 1) == 1; }

  /// Independent stream for shard k; shards never share engine state.
  Rng split(std::uint64_t k) { return Rng(engine_() ^ (0x9E3779B97F4A7C15ULL * (k + 1))); }

private:
  std::mt19937_64 engine_;
};

} // namespace ntheta
