#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dykls {

/// Two halfspaces with opposite parallel normals and inconsistent offsets.
struct InfeasibleIntersection : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Subgradient requested from an indicator-type function.
struct NotSubdifferentiableHere : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear solve or factorization failed.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Block sums of a product vector do not cancel.
struct NotInDPerp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A stored dual vector is not colinear with its frozen minorant slope.
struct InconsistentDual : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Rate fitting on a series that is too short or not positive.
struct DegenerateSeries : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Instance checks failed; carries the violated checks.
struct ValidationFailed : std::runtime_error {
  explicit ValidationFailed(std::vector<std::string> checks)
      : std::runtime_error("instance validation failed: " + join(checks)),
        failures(std::move(checks)) {}
  std::vector<std::string> failures;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
};

/// Nondegeneracy redraws exhausted while generating an instance.
struct GenerationRetryExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scalar root search did not bracket or converge.
struct BisectionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dykls
