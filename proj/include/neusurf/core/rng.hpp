#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace neusurf {

// Deterministic random stream.
//
// Wraps std::mt19937_64 but derives all variates through fixed arithmetic
// instead of the standard distributions, whose results are implementation
// defined.  Identical seeds therefore produce identical sequences on every
// platform/standard library, which the resume and ablation contracts depend
// on.  State can be serialized exactly (the engine's stream representation).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // Uniform in [0, 1).  53-bit mantissa construction.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).  Rejection-free multiply-shift would bias for
  // huge n; with n far below 2^53 the simple scaled draw is exact enough and,
  // more importantly, reproducible.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
    auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  // Standard normal via Box-Muller.  The spare value is discarded so that
  // one call always consumes exactly two engine steps; predictable
  // consumption keeps interleaved streams replayable.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();  // log(0) guard; astronomically rare
    double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  // Exact engine state as text (std::mt19937_64 stream format: 312 words &
  // position).  Used by checkpoints.
  std::string state() const;
  void set_state(const std::string& s);

 private:
  std::mt19937_64 engine_;
};

inline std::string Rng::state() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

inline void Rng::set_state(const std::string& s) {
  std::istringstream is(s);
  is >> engine_;
  if (is.fail()) throw std::runtime_error("Rng::set_state: malformed state");
}

}  // namespace neusurf
