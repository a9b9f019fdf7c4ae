#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacobi/hamiltonian.hpp"

namespace jacobi::app {

using Json = nlohmann::ordered_json;

struct TermSpec {
  double coef = 0.0;
  std::vector<int> exponents;
};

// Polynomial given as an optional quadratic part 1/2 v^T M v plus monomials.
struct PolySpec {
  std::optional<Mat> quadratic;
  std::vector<TermSpec> terms;
  bool pendulum = false;  // potentials only: adds -sum cos y_i
};

struct SystemSpec {
  std::string family = "natural";  // natural | metric | custom
  int n = 1;
  std::string builtin;  // natural only: free_particle | oscillator | inverted_oscillator | pendulum
  double frequency = 1.0;
  PolySpec potential;       // natural and metric
  std::vector<Mat> metric;  // g0, g1..gn
  PolySpec hamiltonian;     // custom, in the 2n variables (x, y)
};

struct Tolerances {
  double rank_tol = kRankTol;
  double energy_tol = 1e-6;
  double symp_tol = 1e-8;
  std::optional<double> fd_step;  // unset: chosen from the horizon
};

struct LDerivSpec {
  Mat a;
  Mat q;
  // Affine family A + tau (A1 - A), Q + tau (Q1 - Q) over [tau0, tau1].
  std::optional<Mat> a1;
  std::optional<Mat> q1;
  double tau0 = 0.0;
  double tau1 = 1.0;
};

struct CommandOptions {
  std::optional<int> samples;
  int base_times = 8;
  double trim = 0.0;  // 0: automatic
  bool reduced = false;
  int grid_points = 201;
  std::optional<LDerivSpec> lderiv;
};

struct RunConfig {
  SystemSpec system;
  std::optional<Vec> initial;  // unset: drawn from the seed
  double horizon = 1.0;
  double step = 1e-3;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  CommandOptions options;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> all{"flow",    "jacobi",  "curvature", "conjugate",
                                            "morse",   "maslov",  "reduce",    "compare",
                                            "hyperbolic", "lderiv"};
  return all;
}

// Schema errors are appended to `diagnostics`; the returned config holds
// whatever parsed.
RunConfig parse_config(const Json& j, std::vector<std::string>& diagnostics);
Json to_json(const RunConfig& c);

// Semantic checks; `command` enables command-specific ones. Empty means runnable.
std::vector<std::string> validate(const RunConfig& c, const std::string& command = "");

HamiltonianSystem build_system(const RunConfig& c);
Vec initial_point(const RunConfig& c);

}  // namespace jacobi::app
