#include "wavedamp/optimize.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "wavedamp/analytic.hpp"
#include "wavedamp/discrete.hpp"

namespace wavedamp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs task(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers join.
template <class Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double safe_criterion(Criterion criterion, Forcing forcing, const Backend& backend,
                      const StringParams& params, const Damper& damper,
                      const NormConfig& cfg) {
  try {
    return evaluate_criterion(criterion, forcing, backend, params, damper, cfg);
  } catch (const NormDiverged&) {
    return kInf;
  }
}

struct Vertex {
  std::array<double, 2> x;  // (p, log g)
  double f;
};

struct LocalRun {
  Vertex best;
  int evaluations = 0;
  bool converged = false;
};

LocalRun nelder_mead(const std::function<double(const std::array<double, 2>&)>& objective,
                     const std::array<double, 2>& start,
                     const std::array<double, 2>& lo, const std::array<double, 2>& hi,
                     const MinimizeOptions& options) {
  LocalRun run;
  auto project = [&](std::array<double, 2> x) {
    for (int i = 0; i < 2; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
    return x;
  };
  auto eval = [&](const std::array<double, 2>& x) {
    ++run.evaluations;
    return Vertex{x, objective(x)};
  };

  std::array<Vertex, 3> simplex;
  simplex[0] = eval(project(start));
  for (int i = 0; i < 2; ++i) {
    std::array<double, 2> x = simplex[0].x;
    const double step = 0.1 * (hi[i] - lo[i]);
    x[i] = x[i] + step <= hi[i] ? x[i] + step : x[i] - step;
    simplex[i + 1] = eval(project(x));
  }

  auto diameter = [&] {
    double d = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        d = std::max(d, std::hypot(simplex[a].x[0] - simplex[b].x[0],
                                   simplex[a].x[1] - simplex[b].x[1]));
      }
    }
    return d;
  };
  auto order = [&] {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  auto blend = [&](const std::array<double, 2>& c, const std::array<double, 2>& w,
                   double t) {
    return project({c[0] + t * (w[0] - c[0]), c[1] + t * (w[1] - c[1])});
  };

  order();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (diameter() < options.simplex_tol) {
      run.converged = true;
      break;
    }
    const std::array<double, 2> centroid = {0.5 * (simplex[0].x[0] + simplex[1].x[0]),
                                            0.5 * (simplex[0].x[1] + simplex[1].x[1])};
    const Vertex reflected = eval(blend(centroid, simplex[2].x, -1.0));
    if (reflected.f < simplex[0].f) {
      const Vertex expanded = eval(blend(centroid, simplex[2].x, -2.0));
      simplex[2] = expanded.f < reflected.f ? expanded : reflected;
    } else if (reflected.f < simplex[1].f) {
      simplex[2] = reflected;
    } else {
      const bool outside = reflected.f < simplex[2].f;
      const Vertex contracted =
          eval(blend(centroid, outside ? reflected.x : simplex[2].x, 0.5));
      const bool accept = outside ? contracted.f <= reflected.f
                                  : contracted.f < simplex[2].f;
      if (accept) {
        simplex[2] = contracted;
      } else {
        for (int i = 1; i < 3; ++i) {
          simplex[i] = eval(blend(simplex[0].x, simplex[i].x, 0.5));
        }
      }
    }
    order();
  }
  if (!run.converged && diameter() < options.simplex_tol) run.converged = true;
  run.best = simplex[0];
  return run;
}

}  // namespace

std::string_view to_string(Criterion criterion) {
  return criterion == Criterion::H2 ? "h2" : "hinf";
}

Criterion criterion_from_string(std::string_view name) {
  if (name == "h2") return Criterion::H2;
  if (name == "hinf") return Criterion::Hinf;
  throw InvalidArgument("unknown criterion '" + std::string(name) +
                        "' (expected h2|hinf)");
}

Backend backend_from_string(std::string_view text) {
  if (text == "analytic") return Backend::analytic();
  constexpr std::string_view prefix = "discrete:";
  if (text.starts_with(prefix)) {
    const std::string_view digits = text.substr(prefix.size());
    int n = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && n >= 4) {
      return Backend::discrete(n);
    }
  }
  throw InvalidArgument("backend must be 'analytic' or 'discrete:N' with N >= 4, got '" +
                        std::string(text) + "'");
}

std::string to_string(const Backend& backend) {
  if (backend.kind == Backend::Kind::Analytic) return "analytic";
  return "discrete:" + std::to_string(backend.grid);
}

double evaluate_criterion(Criterion criterion, Forcing forcing,
                          const Backend& backend, const StringParams& params,
                          const Damper& damper, const NormConfig& base) {
  const NormConfig cfg = fit_to_damper(base, params, damper);
  if (backend.kind == Backend::Kind::Analytic) {
    damper.validate(params);
    const FrequencyResponse resp = [&](double omega) {
      return output_h(Complex{0.0, omega}, params, damper, forcing);
    };
    return criterion == Criterion::H2 ? h2_norm(resp, cfg)
                                      : hinf_norm(resp, params, cfg).value;
  }
  const SecondOrderSystem sys = discretize(backend.grid, params, damper, forcing);
  if (criterion == Criterion::H2 && sys.feedthrough == 0.0 &&
      backend.grid <= kLyapunovMaxGrid) {
    try {
      return discrete_h2_lyapunov(sys);
    } catch (const UnstableSystem& e) {
      throw NormDiverged(e.what());
    }
  }
  const FrequencyResponse resp = [&](double omega) {
    try {
      return discrete_tf(sys, Complex{0.0, omega});
    } catch (const SingularPencil& e) {
      throw PoleEncountered(e.what());
    }
  };
  return criterion == Criterion::H2 ? h2_norm(resp, cfg)
                                    : hinf_norm(resp, params, cfg).value;
}

void SweepSpec::validate(const StringParams& params) const {
  params.validate();
  if (!(p_range.lo > 0.0 && p_range.lo < p_range.hi && p_range.hi < params.length)) {
    throw InvalidArgument("position range must satisfy 0 < lo < hi < length");
  }
  if (!(g_range.lo > 0.0 && g_range.lo < g_range.hi)) {
    throw InvalidArgument("gain range must satisfy 0 < lo < hi");
  }
  if (p_range.count < 2 || g_range.count < 2) {
    throw InvalidArgument("sweep ranges need at least 2 points each");
  }
  if (backend.kind == Backend::Kind::Discrete && backend.grid < 4) {
    throw InvalidGrid("discrete backend needs n >= 4");
  }
}

std::vector<double> SweepSpec::positions() const {
  std::vector<double> out(p_range.count);
  for (int i = 0; i < p_range.count; ++i) {
    out[i] = p_range.lo + (p_range.hi - p_range.lo) * i / (p_range.count - 1);
  }
  out.back() = p_range.hi;
  return out;
}

std::vector<double> SweepSpec::gains() const {
  std::vector<double> out(g_range.count);
  const double a = std::log10(g_range.lo);
  const double b = std::log10(g_range.hi);
  for (int i = 0; i < g_range.count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * i / (g_range.count - 1));
  }
  out.front() = g_range.lo;
  out.back() = g_range.hi;
  return out;
}

SweepResult sweep(const SweepSpec& spec, const StringParams& params,
                  const NormConfig& cfg, int threads) {
  spec.validate(params);
  cfg.validate();
  SweepResult result;
  result.positions = spec.positions();
  result.gains = spec.gains();
  const std::size_t cols = result.positions.size();
  result.values.assign(result.gains.size() * cols, kInf);

  parallel_for(result.values.size(), threads > 0 ? threads : worker_threads(),
               [&](std::size_t idx) {
                 const Damper damper{result.positions[idx % cols],
                                     result.gains[idx / cols]};
                 result.values[idx] = safe_criterion(spec.criterion, spec.forcing,
                                                     spec.backend, params, damper, cfg);
               });

  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 1; i < result.values.size(); ++i) {
    if (result.values[i] < result.values[lo]) lo = i;
    if (result.values[i] > result.values[hi]) hi = i;
  }
  auto cell = [&](std::size_t i) {
    return SweepCell{result.positions[i % cols], result.gains[i / cols], result.values[i]};
  };
  result.min_cell = cell(lo);
  result.max_cell = cell(hi);
  return result;
}

void Bounds::validate(const StringParams& params) const {
  params.validate();
  if (!(p_lo > 0.0 && p_lo <= p_hi && p_hi < params.length)) {
    throw InvalidArgument("position bounds must satisfy 0 < lo <= hi < length");
  }
  if (!(g_lo > 0.0 && g_lo <= g_hi && std::isfinite(g_hi))) {
    throw InvalidArgument("gain bounds must satisfy 0 < lo <= hi < inf");
  }
}

OptimResult minimize(Criterion criterion, Forcing forcing,
                     const StringParams& params, const Bounds& bounds,
                     const std::vector<std::pair<double, double>>& starts,
                     const NormConfig& cfg, const MinimizeOptions& options) {
  bounds.validate(params);
  cfg.validate();
  if (starts.empty()) throw InvalidArgument("minimize needs at least one start");

  const std::array<double, 2> lo = {bounds.p_lo, std::log(bounds.g_lo)};
  const std::array<double, 2> hi = {bounds.p_hi, std::log(bounds.g_hi)};
  auto objective = [&](const std::array<double, 2>& x) {
    return safe_criterion(criterion, forcing, options.backend, params,
                          Damper{x[0], std::exp(x[1])}, cfg);
  };

  std::vector<LocalRun> runs(starts.size());
  parallel_for(starts.size(), options.threads > 0 ? options.threads : worker_threads(),
               [&](std::size_t i) {
                 const std::array<double, 2> x0 = {starts[i].first,
                                                   std::log(std::max(starts[i].second,
                                                                     bounds.g_lo))};
                 runs[i] = nelder_mead(objective, x0, lo, hi, options);
               });

  OptimResult out;
  const LocalRun* best = nullptr;
  for (const LocalRun& run : runs) {
    out.evaluations += run.evaluations;
    if (run.converged && (best == nullptr || run.best.f < best->best.f)) best = &run;
  }
  if (best == nullptr) {
    throw NoConvergence("no start converged within " +
                        std::to_string(options.max_iterations) + " iterations");
  }
  out.p_star = best->best.x[0];
  out.g_star = std::exp(best->best.x[1]);
  out.value = best->best.f;
  out.converged = true;
  return out;
}

std::vector<std::pair<double, double>> grid_starts(const Bounds& bounds, int per_axis) {
  if (per_axis < 1) throw InvalidArgument("per_axis must be >= 1");
  std::vector<std::pair<double, double>> out;
  const double a = std::log(bounds.g_lo);
  const double b = std::log(bounds.g_hi);
  for (int j = 0; j < per_axis; ++j) {
    for (int i = 0; i < per_axis; ++i) {
      const double t_p = (i + 0.5) / per_axis;
      const double t_g = (j + 0.5) / per_axis;
      out.emplace_back(bounds.p_lo + t_p * (bounds.p_hi - bounds.p_lo),
                       std::exp(a + t_g * (b - a)));
    }
  }
  return out;
}

int worker_threads() {
  if (const char* env = std::getenv("WAVEDAMP_THREADS")) {
    int n = 0;
    const std::string_view text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec == std::errc{} && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace wavedamp
