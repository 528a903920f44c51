#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Configuration-space point; axis 1 unused for 1D problems.
using Point = std::array<double, 2>;
using Vec = std::array<double, 2>;

// Every recoverable failure carries a machine-readable category so the CLI
// can map it to a stable exit code.
enum class ErrorCategory {
  invalid_extent,
  invalid_points,
  support_overflow,
  empty_spec_list,
  out_of_extent,
  node_singularity,
  stability_guard,
  non_finite_state,
  target_mismatch,
  non_convergence,
  rejection_inefficiency,
  too_few_samples,
  time_base_mismatch,
  unknown_branch,
  geometry_error,
  validation_error,
  parse_error,
  missing_artifacts,
  io_error,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::invalid_extent: return "invalid-extent";
    case ErrorCategory::invalid_points: return "invalid-points";
    case ErrorCategory::support_overflow: return "support-overflow";
    case ErrorCategory::empty_spec_list: return "empty-spec-list";
    case ErrorCategory::out_of_extent: return "out-of-extent";
    case ErrorCategory::node_singularity: return "node-singularity";
    case ErrorCategory::stability_guard: return "stability-guard";
    case ErrorCategory::non_finite_state: return "non-finite-state";
    case ErrorCategory::target_mismatch: return "target-mismatch";
    case ErrorCategory::non_convergence: return "non-convergence";
    case ErrorCategory::rejection_inefficiency: return "rejection-inefficiency";
    case ErrorCategory::too_few_samples: return "too-few-samples";
    case ErrorCategory::time_base_mismatch: return "time-base-mismatch";
    case ErrorCategory::unknown_branch: return "unknown-branch";
    case ErrorCategory::geometry_error: return "geometry-error";
    case ErrorCategory::validation_error: return "validation-error";
    case ErrorCategory::parse_error: return "parse-error";
    case ErrorCategory::missing_artifacts: return "missing-artifacts";
    case ErrorCategory::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(std::string(to_string(category)) + ": " + what),
        category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& what) {
  throw Error(c, what);
}

inline void require(bool ok, ErrorCategory c, const std::string& what) {
  if (!ok) fail(c, what);
}

// splitmix64: cheap, well-mixed counter hash used to derive independent
// per-sample RNG streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic counter-based uniform stream.
class UniformStream {
 public:
  UniformStream(std::uint64_t master, std::uint64_t stream)
      : state_(splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  double next() {
    state_ = splitmix64(state_);
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

inline double sqr(double v) { return v * v; }

}  // namespace pw
