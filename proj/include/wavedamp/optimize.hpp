#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wavedamp/norms.hpp"
#include "wavedamp/types.hpp"

namespace wavedamp {

enum class Criterion { H2, Hinf };

std::string_view to_string(Criterion criterion);
Criterion criterion_from_string(std::string_view name);

// Which transfer function the criterion is computed from.
struct Backend {
  enum class Kind { Analytic, Discrete };
  Kind kind = Kind::Analytic;
  int grid = 0;  // number of intervals for Discrete

  static Backend analytic() { return {}; }
  static Backend discrete(int n) { return {Kind::Discrete, n}; }
};

// Parses "analytic" or "discrete:N".
Backend backend_from_string(std::string_view text);
std::string to_string(const Backend& backend);

// Criterion value of the transfer function for a single damper.
// Analytic: norms of output_h. Discrete: Lyapunov H2 when the discrete
// system has no feedthrough, otherwise norms of discrete_tf.
double evaluate_criterion(Criterion criterion, Forcing forcing,
                          const Backend& backend, const StringParams& params,
                          const Damper& damper, const NormConfig& cfg);

struct LinearRange {
  double lo = 0.0;
  double hi = 0.0;
  int count = 2;
};

struct SweepSpec {
  LinearRange p_range;  // linearly spaced positions
  LinearRange g_range;  // logarithmically spaced gains
  Criterion criterion = Criterion::H2;
  Forcing forcing = Forcing::Uniform;
  Backend backend;

  void validate(const StringParams& params) const;
  std::vector<double> positions() const;
  std::vector<double> gains() const;
};

struct SweepCell {
  double p = 0.0;
  double g = 0.0;
  double value = 0.0;
};

struct SweepResult {
  std::vector<double> positions;
  std::vector<double> gains;
  // Row-major: values[row * positions.size() + col], row indexes g.
  std::vector<double> values;
  SweepCell min_cell;
  SweepCell max_cell;

  double at(std::size_t g_index, std::size_t p_index) const {
    return values[g_index * positions.size() + p_index];
  }
};

// Cells whose norm diverges are stored as +inf. Deterministic for any
// thread count; threads = 0 uses worker_threads().
SweepResult sweep(const SweepSpec& spec, const StringParams& params,
                  const NormConfig& cfg, int threads = 0);

struct Bounds {
  double p_lo = 0.0;
  double p_hi = 0.0;
  double g_lo = 0.0;
  double g_hi = 0.0;

  void validate(const StringParams& params) const;
};

struct MinimizeOptions {
  int max_iterations = 300;    // per start
  double simplex_tol = 1e-4;   // diameter in (p, log g)
  int threads = 0;
  Backend backend;
};

struct OptimResult {
  double p_star = 0.0;
  double g_star = 0.0;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Nelder-Mead in (p, log g) from every start, projecting onto the bounds;
// returns the best converged start. Throws NoConvergence if none converged.
OptimResult minimize(Criterion criterion, Forcing forcing,
                     const StringParams& params, const Bounds& bounds,
                     const std::vector<std::pair<double, double>>& starts,
                     const NormConfig& cfg, const MinimizeOptions& options = {});

// per_axis x per_axis seeds at cell centres of the bounds (log-spaced in g).
std::vector<std::pair<double, double>> grid_starts(const Bounds& bounds,
                                                   int per_axis = 5);

// WAVEDAMP_THREADS if set to a positive integer, else hardware concurrency.
int worker_threads();

}  // namespace wavedamp
