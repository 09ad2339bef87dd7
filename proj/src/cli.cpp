#include "wavedamp/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavedamp/analytic.hpp"
#include "wavedamp/discrete.hpp"
#include "wavedamp/norms.hpp"
#include "wavedamp/optimize.hpp"

namespace wavedamp::cli {

namespace {

using nlohmann::json;

struct PhysicalFlags {
  std::string forcing = "uniform";
  double length = 10.0;
  double damping = 0.08;
  double stiffness = 1.0;
  double pos = 4.5;
  double gain = 10.0;

  StringParams params() const {
    StringParams p{length, damping, stiffness};
    p.validate();
    return p;
  }
  Damper damper() const { return Damper{pos, gain}; }
  Forcing forcing_kind() const { return forcing_from_string(forcing); }
};

void add_physical(CLI::App* sub, PhysicalFlags& f, bool with_damper = true) {
  sub->add_option("--forcing", f.forcing, "uniform|boundary")
      ->check(CLI::IsMember({"uniform", "boundary"}));
  sub->add_option("--length", f.length, "string length l");
  sub->add_option("--damping", f.damping, "internal damping d");
  sub->add_option("--stiffness", f.stiffness, "stiffness k");
  if (with_damper) {
    sub->add_option("--pos", f.pos, "damper position p");
    sub->add_option("--gain", f.gain, "damper viscosity g");
  }
}

struct NormFlags {
  double omega_max = 0.0;  // 0 selects the default truncation
  double quad_rel_tol = 1e-6;
  int peak_samples = 16;
  int refine_iters = 50;
  int h2_panels = 256;

  NormConfig resolve(const StringParams& params, Forcing forcing) const {
    NormConfig cfg = default_norm_config(params, forcing);
    if (omega_max > 0.0) {
      cfg.omega_max = omega_max;
      cfg.segment_cover = 0.0;  // an explicit truncation is taken as given
    }
    cfg.quad_rel_tol = quad_rel_tol;
    cfg.peak_samples_per_mode = peak_samples;
    cfg.refine_iters = refine_iters;
    cfg.h2_panels = h2_panels;
    cfg.validate();
    return cfg;
  }
};

void add_norm_flags(CLI::App* sub, NormFlags& f) {
  sub->add_option("--omega-max", f.omega_max, "truncation frequency (0: default, widened for dampers near an end)");
  sub->add_option("--quad-rel-tol", f.quad_rel_tol, "quadrature relative tolerance");
  sub->add_option("--peak-samples", f.peak_samples, "H-inf scan samples per modal spacing");
  sub->add_option("--refine-iters", f.refine_iters, "golden-section iterations per peak");
  sub->add_option("--h2-panels", f.h2_panels, "initial Gauss-Kronrod panels");
}

// JSON has no infinity; non-finite values are written as strings.
json number(double value) {
  if (std::isfinite(value)) return value;
  return format_double(value);
}

json config_json(const NormConfig& cfg) {
  return {{"omega_max", cfg.omega_max},
          {"quad_rel_tol", cfg.quad_rel_tol},
          {"peak_samples_per_mode", cfg.peak_samples_per_mode},
          {"refine_iters", cfg.refine_iters},
          {"h2_panels", cfg.h2_panels},
          {"segment_cover", cfg.segment_cover},
          {"tail_decay",
           cfg.tail_decay == TailDecay::InverseOmega ? "inverse_omega" : "inverse_omega_sq"}};
}

json manifest_json(const CLI::App* sub) {
  json parameters = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) {
        if (i > 0) value += ",";
        value += results[i];
      }
    } else {
      value = opt->get_default_str();
    }
    parameters[name] = value;
  }
  return {{"command", sub->get_name()},
          {"parameters", parameters},
          {"tool_version", kToolVersion},
          {"timestamp", utc_timestamp()}};
}

// Destination stream: the named file, or `fallback` when the path is empty.
class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : path_(path) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open output file " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  bool to_file() const { return !path_.empty(); }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

void write_csv_manifest(std::ostream& os, const json& manifest) {
  os << "# manifest: " << manifest.dump() << '\n';
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path);
  os << doc.dump(2) << '\n';
}

FrequencyResponse make_response(const Backend& backend, const StringParams& params,
                                const Damper& damper, Forcing forcing,
                                std::shared_ptr<SecondOrderSystem>& storage) {
  if (backend.kind == Backend::Kind::Analytic) {
    return [params, damper, forcing](double omega) {
      return output_h(Complex{0.0, omega}, params, damper, forcing);
    };
  }
  storage = std::make_shared<SecondOrderSystem>(
      discretize(backend.grid, params, damper, forcing));
  return [sys = storage](double omega) {
    try {
      return discrete_tf(*sys, Complex{0.0, omega});
    } catch (const SingularPencil& e) {
      throw PoleEncountered(e.what());
    }
  };
}

// ---------------------------------------------------------------- bode

struct BodeFlags {
  PhysicalFlags physical;
  double omega_min = 1e-2;
  double omega_max = 1e2;
  int points = 200;
  bool log_freq = false;
  std::string out;
};

int cmd_bode(const BodeFlags& f, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  if (f.points < 1) throw InvalidArgument("--points must be at least 1");
  if (!(f.omega_min >= 0.0) || !(f.omega_max >= f.omega_min)) {
    throw InvalidArgument("need 0 <= omega-min <= omega-max");
  }
  if (f.log_freq && !(f.omega_min > 0.0)) {
    throw InvalidArgument("--log-freq needs omega-min > 0");
  }
  const StringParams params = f.physical.params();
  const Damper damper = f.physical.damper();
  damper.validate(params);
  const Forcing forcing = f.physical.forcing_kind();

  std::vector<double> omegas(f.points);
  for (int i = 0; i < f.points; ++i) {
    const double t = f.points == 1 ? 0.0 : static_cast<double>(i) / (f.points - 1);
    omegas[i] = f.log_freq ? std::pow(10.0, std::log10(f.omega_min) +
                                                t * (std::log10(f.omega_max) -
                                                     std::log10(f.omega_min)))
                           : f.omega_min + t * (f.omega_max - f.omega_min);
  }
  if (f.points > 1) omegas.back() = f.omega_max;

  std::ostringstream body;
  for (double omega : omegas) {
    Complex h;
    try {
      h = output_h(Complex{0.0, omega}, params, damper, forcing);
    } catch (const PoleEncountered& e) {
      err << "pole encountered at omega = " << format_double(omega) << ": " << e.what()
          << '\n';
      return kPole;
    }
    body << format_double(omega) << ',' << format_double(std::abs(h)) << ','
         << format_double(std::arg(h)) << '\n';
  }
  Output os(f.out, out);
  write_csv_manifest(*os, manifest_json(sub));
  *os << "omega,magnitude,phase\n" << body.str();
  return kOk;
}

// ---------------------------------------------------------------- norm

struct NormCmdFlags {
  std::string criterion;
  PhysicalFlags physical;
  NormFlags norm;
  std::string backend = "analytic";
  std::string out;
};

int cmd_norm(const NormCmdFlags& f, const CLI::App* sub, std::ostream& out,
             std::ostream& err) {
  const Criterion criterion = criterion_from_string(f.criterion);
  const StringParams params = f.physical.params();
  const Damper damper = f.physical.damper();
  damper.validate(params);
  const Forcing forcing = f.physical.forcing_kind();
  const Backend backend = backend_from_string(f.backend);
  const NormConfig cfg = fit_to_damper(f.norm.resolve(params, forcing), params, damper);

  json doc = {{"criterion", to_string(criterion)},
              {"forcing", to_string(forcing)},
              {"backend", to_string(backend)},
              {"config", config_json(cfg)}};
  try {
    if (criterion == Criterion::Hinf) {
      std::shared_ptr<SecondOrderSystem> storage;
      const HinfResult r =
          hinf_norm(make_response(backend, params, damper, forcing, storage), params, cfg);
      doc["value"] = r.value;
      doc["argmax_omega"] = r.argmax_omega;
    } else {
      doc["value"] = evaluate_criterion(criterion, forcing, backend, params, damper, cfg);
    }
  } catch (const NormDiverged& e) {
    json failure = {{"error", "NormDiverged"},
                    {"message", e.what()},
                    {"criterion", to_string(criterion)},
                    {"backend", to_string(backend)},
                    {"config", config_json(cfg)}};
    err << failure.dump(2) << '\n';
    return kNormDiverged;
  }
  doc["manifest"] = manifest_json(sub);
  Output os(f.out, out);
  *os << doc.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepFlags {
  std::string criterion = "h2";
  PhysicalFlags physical;
  NormFlags norm;
  std::string backend = "analytic";
  double p_min = 0.1;
  double p_max = 5.0;
  int p_count = 50;
  double g_min = 0.1;
  double g_max = 1000.0;
  int g_count = 50;
  std::string out;
};

int cmd_sweep(const SweepFlags& f, const CLI::App* sub, std::ostream& out, std::ostream&) {
  const StringParams params = f.physical.params();
  SweepSpec spec;
  spec.criterion = criterion_from_string(f.criterion);
  spec.forcing = f.physical.forcing_kind();
  spec.backend = backend_from_string(f.backend);
  spec.p_range = {f.p_min, f.p_max, f.p_count};
  spec.g_range = {f.g_min, f.g_max, f.g_count};
  const NormConfig cfg = f.norm.resolve(params, spec.forcing);
  const SweepResult result = sweep(spec, params, cfg);

  const json manifest = manifest_json(sub);
  Output os(f.out, out);
  write_csv_manifest(*os, manifest);
  *os << "p,g,value\n";
  for (std::size_t gi = 0; gi < result.gains.size(); ++gi) {
    for (std::size_t pi = 0; pi < result.positions.size(); ++pi) {
      *os << format_double(result.positions[pi]) << ',' << format_double(result.gains[gi])
          << ',' << format_double(result.at(gi, pi)) << '\n';
    }
  }
  auto cell = [](const SweepCell& c) {
    return json{{"p", c.p}, {"g", c.g}, {"value", number(c.value)}};
  };
  const json summary = {{"criterion", to_string(spec.criterion)},
                        {"forcing", to_string(spec.forcing)},
                        {"backend", to_string(spec.backend)},
                        {"min_cell", cell(result.min_cell)},
                        {"max_cell", cell(result.max_cell)},
                        {"config", config_json(cfg)},
                        {"manifest", manifest}};
  if (os.to_file()) write_json_file(f.out + ".json", summary);
  return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeFlags {
  std::string criterion = "h2";
  PhysicalFlags physical;
  NormFlags norm;
  std::optional<double> p_min, p_max, g_min, g_max;
  int starts_per_axis = 5;
  std::vector<std::string> starts;
  int max_iter = 300;
  std::string out;
};

int cmd_optimize(const OptimizeFlags& f, const CLI::App* sub, std::ostream& out,
                 std::ostream&) {
  const Criterion criterion = criterion_from_string(f.criterion);
  const StringParams params = f.physical.params();
  const Forcing forcing = f.physical.forcing_kind();
  const double l = params.length;
  // Uniform forcing is mirror symmetric, so only the left half is searched.
  Bounds bounds = forcing == Forcing::Uniform ? Bounds{0.005 * l, 0.5 * l, 0.1, 1000.0}
                                              : Bounds{0.02 * l, 0.98 * l, 0.1, 100.0};
  if (f.p_min) bounds.p_lo = *f.p_min;
  if (f.p_max) bounds.p_hi = *f.p_max;
  if (f.g_min) bounds.g_lo = *f.g_min;
  if (f.g_max) bounds.g_hi = *f.g_max;
  bounds.validate(params);

  std::vector<std::pair<double, double>> starts;
  for (const std::string& text : f.starts) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw InvalidArgument("--start expects P,G");
    starts.emplace_back(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1)));
  }
  if (starts.empty()) starts = grid_starts(bounds, f.starts_per_axis);

  const NormConfig cfg = f.norm.resolve(params, forcing);
  MinimizeOptions options;
  options.max_iterations = f.max_iter;

  json doc = {{"criterion", to_string(criterion)},
              {"forcing", to_string(forcing)},
              {"bounds",
               {{"p_lo", bounds.p_lo}, {"p_hi", bounds.p_hi},
                {"g_lo", bounds.g_lo}, {"g_hi", bounds.g_hi}}},
              {"starts", starts.size()}};
  int code = kOk;
  try {
    const OptimResult r = minimize(criterion, forcing, params, bounds, starts, cfg, options);
    doc["p_star"] = r.p_star;
    doc["g_star"] = r.g_star;
    doc["value"] = r.value;
    doc["evaluations"] = r.evaluations;
    doc["converged"] = r.converged;
  } catch (const NoConvergence& e) {
    doc["converged"] = false;
    doc["message"] = e.what();
    code = kNoConvergence;
  }
  doc["manifest"] = manifest_json(sub);
  Output os(f.out, out);
  *os << doc.dump(2) << '\n';
  return code;
}

// ---------------------------------------------------------------- compare

struct CompareFlags {
  PhysicalFlags physical;
  double omega = 1.0;
  std::vector<int> n_list = {25, 50, 100, 200};
  std::string out;
};

int cmd_compare(const CompareFlags& f, const CLI::App* sub, std::ostream& out,
                std::ostream&) {
  const StringParams params = f.physical.params();
  const Damper damper = f.physical.damper();
  const Forcing forcing = f.physical.forcing_kind();
  const std::vector<ConvergenceRow> rows =
      convergence_study(params, damper, forcing, Complex{0.0, f.omega}, f.n_list);

  Output os(f.out, out);
  write_csv_manifest(*os, manifest_json(sub));
  *os << "n,h,abs_error,analytic_re,analytic_im,discrete_re,discrete_im\n";
  for (const ConvergenceRow& row : rows) {
    *os << row.n << ',' << format_double(row.h) << ',' << format_double(row.abs_error) << ','
        << format_double(row.analytic.real()) << ',' << format_double(row.analytic.imag())
        << ',' << format_double(row.discrete.real()) << ','
        << format_double(row.discrete.imag()) << '\n';
  }
  if (rows.size() >= 2) {
    const double order = fitted_order(rows);
    if (os.to_file()) {
      out << "fitted_order: " << format_double(order) << '\n';
    } else {
      out << "# fitted_order: " << format_double(order) << '\n';
    }
  }
  return kOk;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Point-damper analysis of the damped wave equation", "wavedamp"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  BodeFlags bode;
  CLI::App* bode_cmd = app.add_subcommand("bode", "magnitude/phase of H(i omega) as CSV");
  add_physical(bode_cmd, bode.physical);
  bode_cmd->add_option("--omega-min", bode.omega_min, "lowest frequency");
  bode_cmd->add_option("--omega-max", bode.omega_max, "highest frequency");
  bode_cmd->add_option("--points", bode.points, "number of frequencies");
  bode_cmd->add_flag("--log-freq", bode.log_freq, "log-spaced frequencies");
  bode_cmd->add_option("--out", bode.out, "output CSV (default stdout)");

  NormCmdFlags norm;
  CLI::App* norm_cmd = app.add_subcommand("norm", "H2 or H-inf norm of H as JSON");
  norm_cmd->add_option("criterion", norm.criterion, "h2|hinf")
      ->required()
      ->check(CLI::IsMember({"h2", "hinf"}));
  add_physical(norm_cmd, norm.physical);
  add_norm_flags(norm_cmd, norm.norm);
  norm_cmd->add_option("--backend", norm.backend, "analytic|discrete:N");
  norm_cmd->add_option("--out", norm.out, "output JSON (default stdout)");

  SweepFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "criterion over a (p, g) grid as CSV");
  sweep_cmd->add_option("--criterion", sweep_flags.criterion, "h2|hinf")
      ->check(CLI::IsMember({"h2", "hinf"}));
  add_physical(sweep_cmd, sweep_flags.physical, false);
  add_norm_flags(sweep_cmd, sweep_flags.norm);
  sweep_cmd->add_option("--backend", sweep_flags.backend, "analytic|discrete:N");
  sweep_cmd->add_option("--p-min", sweep_flags.p_min, "first position");
  sweep_cmd->add_option("--p-max", sweep_flags.p_max, "last position");
  sweep_cmd->add_option("--p-count", sweep_flags.p_count, "positions (linear)");
  sweep_cmd->add_option("--g-min", sweep_flags.g_min, "first gain");
  sweep_cmd->add_option("--g-max", sweep_flags.g_max, "last gain");
  sweep_cmd->add_option("--g-count", sweep_flags.g_count, "gains (logarithmic)");
  sweep_cmd->add_option("--out", sweep_flags.out, "output CSV; FILE.json gets min/max cells");

  OptimizeFlags opt;
  CLI::App* opt_cmd = app.add_subcommand("optimize", "Nelder-Mead search over (p, g)");
  opt_cmd->add_option("--criterion", opt.criterion, "h2|hinf")
      ->check(CLI::IsMember({"h2", "hinf"}));
  add_physical(opt_cmd, opt.physical, false);
  add_norm_flags(opt_cmd, opt.norm);
  opt_cmd->add_option("--p-min", opt.p_min, "position lower bound");
  opt_cmd->add_option("--p-max", opt.p_max, "position upper bound");
  opt_cmd->add_option("--g-min", opt.g_min, "gain lower bound");
  opt_cmd->add_option("--g-max", opt.g_max, "gain upper bound");
  opt_cmd->add_option("--starts-per-axis", opt.starts_per_axis, "seed grid size per axis");
  opt_cmd->add_option("--start", opt.starts, "explicit start P,G (repeatable)");
  opt_cmd->add_option("--max-iter", opt.max_iter, "iterations per start");
  opt_cmd->add_option("--out", opt.out, "output JSON (default stdout)");

  CompareFlags cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "discrete vs analytic H at s = i omega");
  add_physical(cmp_cmd, cmp.physical);
  cmp_cmd->add_option("--omega", cmp.omega, "evaluation frequency");
  cmp_cmd->add_option("--n", cmp.n_list, "grid sizes, comma separated")->delimiter(',');
  cmp_cmd->add_option("--out", cmp.out, "output CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (bode_cmd->parsed()) return cmd_bode(bode, bode_cmd, out, err);
    if (norm_cmd->parsed()) return cmd_norm(norm, norm_cmd, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_cmd, out, err);
    if (opt_cmd->parsed()) return cmd_optimize(opt, opt_cmd, out, err);
    if (cmp_cmd->parsed()) return cmd_compare(cmp, cmp_cmd, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidGrid& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const PoleEncountered& e) {
    err << "error: " << e.what() << '\n';
    return kPole;
  } catch (const NormDiverged& e) {
    err << "error: " << e.what() << '\n';
    return kNormDiverged;
  } catch (const NoConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace wavedamp::cli
