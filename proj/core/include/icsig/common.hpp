#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace icsig {

/// Bad user-facing configuration (unknown labels, out-of-range parameters,
/// malformed experiment specs). Carries the offending field name when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg, std::string field = {})
      : std::runtime_error(field.empty() ? msg : field + ": " + msg),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Numerical failure inside an optimization routine. The last iterate and
/// residual are kept so callers can degrade gracefully instead of aborting.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_ = 0.0;
};

using Rng = std::mt19937_64;

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Deterministic substream derivation: mixes a master seed with a list of
/// task identifiers so that parallel workers get independent, reproducible
/// streams regardless of scheduling order.
template <typename... Ids>
Rng derive_stream(std::uint64_t master_seed, Ids... ids) {
  std::uint64_t state = master_seed;
  ((state = detail::splitmix64(state) ^ (0x9e3779b97f4a7c15ULL * (1 + static_cast<std::uint64_t>(ids)))), ...);
  return Rng(detail::splitmix64(state));
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace icsig
