#pragma once

// Command-line front end: subcommand setup, key=value config files, and
// CSV/JSON emission with a fixed exit-code contract.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpp/lpp.hpp"

namespace lpp::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitIo = 4;

/** Relative imaginary residue above which a run reports a numerical diagnostic. */
inline constexpr double kImagThreshold = 1e-4;

/** True when the imaginary part of a scalar result is too large to report it as real. */
inline bool imag_residue(cplx value) { return std::abs(value.imag()) > kImagThreshold * std::abs(value); }

/** Columns of value records. Summary rows carry k1 = k2 = -1. */
inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols{"quantity", "value_re", "value_im", "stderr", "k1",
                                             "k2",       "term_abs", "runtime_ms", "seed"};
  return cols;
}

/** Columns of identity trial records. */
inline const std::vector<std::string>& trial_columns() {
  static const std::vector<std::string> cols{"identity", "size",   "seed",   "lhs_re",
                                             "lhs_im",   "rhs_re", "rhs_im", "rel_diff"};
  return cols;
}

/** Everything a run writes: the header (version, config) and the body (rows, diagnostic). */
struct Output {
  std::string version = "1.0.0";
  Json config = Json::object();
  std::vector<std::string> columns = report_columns();
  Json rows = Json::array();
  std::string diagnostic;

  bool operator==(const Output&) const = default;
};

/** Raised when the output cannot be written. */
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const Json& v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

}  // namespace detail

/** CSV text: '#' header lines, then a column line and one line per row. */
inline std::string to_csv(const Output& out) {
  std::ostringstream os;
  os << "# lpp " << out.version << "\n";
  for (const auto& [k, v] : out.config.items()) os << "# " << k << "=" << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
  if (!out.diagnostic.empty()) os << "# diagnostic=" << out.diagnostic << "\n";
  for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << out.columns[i];
  os << "\n";
  for (const auto& row : out.rows) {
    for (std::size_t i = 0; i < out.columns.size(); ++i) os << (i ? "," : "") << detail::csv_cell(row.at(out.columns[i]));
    os << "\n";
  }
  return os.str();
}

/** JSON text with keys version, config, columns, rows and (when set) diagnostic. */
inline std::string to_json(const Output& out) {
  Json j;
  j["version"] = out.version;
  j["config"] = out.config;
  j["columns"] = out.columns;
  j["rows"] = out.rows;
  if (!out.diagnostic.empty()) j["diagnostic"] = out.diagnostic;
  return j.dump(2) + "\n";
}

/** Inverse of to_json. */
inline Output parse_json(const std::string& text) {
  const Json j = Json::parse(text);
  Output out;
  out.version = j.at("version").get<std::string>();
  out.config = j.at("config");
  out.columns = j.at("columns").get<std::vector<std::string>>();
  out.rows = j.at("rows");
  if (j.contains("diagnostic")) out.diagnostic = j.at("diagnostic").get<std::string>();
  return out;
}

/** Writes `out` in the given format to `path`, or to `fallback` when path is "-". */
inline void emit(const Output& out, const std::string& format, const std::string& path, std::ostream& fallback) {
  const std::string text = format == "json" ? to_json(out) : to_csv(out);
  if (path == "-") {
    fallback << text;
    fallback.flush();
    if (!fallback) throw IoError("cannot write to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file: " + path);
  f << text;
  f.close();
  if (!f) throw IoError("cannot write output file: " + path);
}

/** Reads plain key=value lines; blank lines and lines starting with '#' are skipped. */
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot read config file: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + " is not key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

namespace detail {

/** Collects every option named `key` in `app` and its nested subcommands. */
inline void find_options(CLI::App* app, const std::string& key, std::vector<CLI::Option*>& found) {
  for (CLI::Option* opt : app->get_options())
    for (const auto& name : opt->get_lnames())
      if (name == key) found.push_back(opt);
  for (CLI::App* sub : app->get_subcommands({})) find_options(sub, key, found);
}

/** Records every named option of `app` (value given or default) into `config`. */
inline void echo_options(const CLI::App* app, Json& config) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string value = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
    if (opt->get_type_size() == 0 && value.empty()) value = opt->count() > 0 ? "true" : "false";
    config[name] = value;
  }
}

/** Locates a --config value among the raw arguments. */
inline std::string config_path_from_args(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

inline Json report_row(const std::string& quantity, cplx value, double stderr_value, int k1, int k2,
                       double term_abs, double runtime_ms, std::uint64_t seed) {
  Json r;
  r["quantity"] = quantity;
  r["value_re"] = value.real();
  r["value_im"] = value.imag();
  r["stderr"] = stderr_value;
  r["k1"] = k1;
  r["k2"] = k2;
  r["term_abs"] = term_abs;
  r["runtime_ms"] = runtime_ms;
  r["seed"] = seed;
  return r;
}

}  // namespace detail

/** Settings shared by every subcommand. */
struct GlobalOptions {
  std::string format = "auto";
  std::string out = "-";
  unsigned threads = 0;
  std::uint64_t seed = 1;
  bool timing = false;
  bool terms = true;
  std::string config_path;
};

/**
 * Parses argv, runs exactly one subcommand and writes its output. Returns
 * 0 on success, 2 on validation errors, 3 on numerical diagnostics and 4 on
 * I/O failures.
 */
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  GlobalOptions g;
  CLI::App app{"Directed last passage percolation: simulation, exact densities and identity checks", "lpp"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "1.0.0");

  app.add_option("--format", g.format, "Output format; auto selects csv for verify and json otherwise")
      ->check(CLI::IsMember({"auto", "csv", "json"}));
  app.add_option("--out", g.out, "Output path, '-' for standard output");
  app.add_option("--threads", g.threads, "Worker cap; 0 uses LPP_THREADS or the hardware count")->check(CLI::Range(0u, 1024u));
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--config", g.config_path, "Plain key=value file with option defaults");
  app.add_flag("--timing,!--no-timing", g.timing, "Fill runtime_ms; off keeps output bodies reproducible");
  app.add_flag("--terms,!--no-terms", g.terms, "Emit one row per series term");

  // simulate
  struct {
    int rows = 2, cols = 2, m = 1, n = 1, x = 0, y = 0;
    std::string dist = "exp", event = "tail", direction = "right";
    double q = 0.5, t1 = 0.0, t2 = 0.0, eps1 = 0.1, eps2 = 0.1;
    long long samples = 100000;
  } sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a geodesic event");
  simulate->add_option("--rows", sim.rows, "Grid rows N")->check(CLI::Range(1, 5000));
  simulate->add_option("--cols", sim.cols, "Grid columns M")->check(CLI::Range(1, 5000));
  simulate->add_option("--dist", sim.dist, "Weight law")->check(CLI::IsMember({"exp", "geo"}));
  simulate->add_option("--q", sim.q, "Geometric parameter")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  simulate->add_option("--samples", sim.samples, "Sample count")->check(CLI::Range(1LL, 10000000000LL));
  simulate->add_option("--event", sim.event, "tail, interval, or A (exact values x, y; geometric weights)")
      ->check(CLI::IsMember({"tail", "interval", "A"}));
  simulate->add_option("--m", sim.m, "Column of r")->check(CLI::Range(1, 5000));
  simulate->add_option("--n", sim.n, "Row of r")->check(CLI::Range(1, 5000));
  simulate->add_option("--direction", sim.direction, "Step from r")->check(CLI::IsMember({"right", "up"}));
  simulate->add_option("--t1", sim.t1, "Threshold or window start for the first passage time")->check(CLI::Range(-1e6, 1e6));
  simulate->add_option("--t2", sim.t2, "Threshold or window start for the second passage time")->check(CLI::Range(-1e6, 1e6));
  simulate->add_option("--eps1", sim.eps1, "First window width")->check(CLI::Range(1e-12, 1e6));
  simulate->add_option("--eps2", sim.eps2, "Second window width")->check(CLI::Range(1e-12, 1e6));
  simulate->add_option("--x", sim.x, "Event A: value of the first passage time")->check(CLI::Range(0, 1000000));
  simulate->add_option("--y", sim.y, "Event A: value of the second passage time")->check(CLI::Range(0, 1000000));

  // exact
  struct {
    int m = 1, n = 1, M = 2, N = 1, kmax = 0, nodes = 64;
    std::string direction = "right";
    double s1 = 1.0, s2 = 1.0, t1 = 0.0, t2 = 0.0;
  } ex;
  CLI::App* exact = app.add_subcommand("exact", "Exact finite-grid quantities by contour quadrature");
  exact->require_subcommand(1);
  const std::vector<std::string> exact_kinds{"finite-density", "tail", "geodesic-prob", "formula01", "formula02"};
  for (const auto& kind : exact_kinds) {
    CLI::App* sub = exact->add_subcommand(kind, "exact " + kind);
    sub->add_option("--m", ex.m, "Column of r")->check(CLI::Range(1, 64));
    sub->add_option("--n", ex.n, "Row of r")->check(CLI::Range(1, 64));
    sub->add_option("--M", ex.M, "Grid columns")->check(CLI::Range(1, 64));
    sub->add_option("--N", ex.N, "Grid rows")->check(CLI::Range(1, 8));
    sub->add_option("--direction", ex.direction, "Step from r")->check(CLI::IsMember({"right", "up"}));
    if (kind == "tail") {
      sub->add_option("--t1", ex.t1, "First threshold")->check(CLI::Range(-1e3, 1e3));
      sub->add_option("--t2", ex.t2, "Second threshold")->check(CLI::Range(-1e3, 1e3));
    } else if (kind != "geodesic-prob") {
      sub->add_option("--s1", ex.s1, "First passage time")->check(CLI::Range(-1e3, 1e3));
      sub->add_option("--s2", ex.s2, "Second passage time")->check(CLI::Range(-1e3, 1e3));
    }
    if (kind == "formula01" || kind == "formula02") sub->add_option("--nodes", ex.nodes, "Nodes per circle")->check(CLI::Range(8, 512));
    else sub->add_option("--kmax", ex.kmax, "Series truncation, 0 selects N")->check(CLI::Range(0, 8));
  }

  // limit-density, limit-tail
  struct {
    double s1 = 0.0, s2 = 0.0, t1 = 0.0, t2 = 0.0, x = 0.0, gamma = 0.5;
    int kmax = 2;
    std::string quad = "default";
  } lim;
  CLI::App* limit_density_cmd = app.add_subcommand("limit-density", "Limiting joint density p(s1, s2, x)");
  CLI::App* limit_tail_cmd = app.add_subcommand("limit-tail", "Limiting joint tail over [t1, inf) x [t2, inf)");
  for (CLI::App* sub : {limit_density_cmd, limit_tail_cmd}) {
    if (sub == limit_density_cmd) {
      sub->add_option("--s1", lim.s1, "First scaled passage time")->check(CLI::Range(-8.0, 8.0));
      sub->add_option("--s2", lim.s2, "Second scaled passage time")->check(CLI::Range(-8.0, 8.0));
    } else {
      sub->add_option("--t1", lim.t1, "First threshold")->check(CLI::Range(-8.0, 8.0));
      sub->add_option("--t2", lim.t2, "Second threshold")->check(CLI::Range(-8.0, 8.0));
    }
    sub->add_option("--x", lim.x, "Scaled location")->check(CLI::Range(-4.0, 4.0));
    sub->add_option("--gamma", lim.gamma, "Cut fraction")->check(CLI::Range(0.05, 0.95));
    sub->add_option("--kmax", lim.kmax, "Series truncation")->check(CLI::Range(1, 4));
    sub->add_option("--quad", lim.quad, "Quadrature tier")->check(CLI::IsMember({"default", "coarse"}));
  }

  // fgue-check
  struct {
    double s = 0.0, gamma = 0.5;
    int kmax = 2;
    std::string quad = "coarse";
    OuterGrid grid;
  } fc;
  CLI::App* fgue_check = app.add_subcommand("fgue-check", "Integrated limiting density against F_GUE (hours)");
  fgue_check->add_option("--s", fc.s, "Argument of F_GUE")->check(CLI::Range(-6.0, 6.0));
  fgue_check->add_option("--gamma", fc.gamma, "Cut fraction")->check(CLI::Range(0.05, 0.95));
  fgue_check->add_option("--kmax", fc.kmax, "Series truncation")->check(CLI::Range(1, 4));
  fgue_check->add_option("--quad", fc.quad, "Quadrature tier")->check(CLI::IsMember({"default", "coarse"}));
  fgue_check->add_option("--spacing", fc.grid.spacing, "Outer grid spacing")->check(CLI::Range(0.01, 2.0));
  fgue_check->add_option("--s-lo", fc.grid.s_lo, "Lower s cut standing in for -infinity")->check(CLI::Range(-20.0, 0.0));
  fgue_check->add_option("--s-hi", fc.grid.s_hi, "Upper s cut")->check(CLI::Range(0.0, 20.0));
  fgue_check->add_option("--x-lo", fc.grid.x_lo, "Lower x cut")->check(CLI::Range(-10.0, 0.0));
  fgue_check->add_option("--x-hi", fc.grid.x_hi, "Upper x cut")->check(CLI::Range(0.0, 10.0));

  // verify
  struct {
    std::string which = "cauchy-gen";
    int trials = 20, size = 3;
    double tol = 1e-8;
  } ver;
  std::vector<std::string> verify_names = identity_names();
  verify_names.push_back("all");
  CLI::App* verify = app.add_subcommand("verify", "Randomized identity trials");
  verify->add_option("--which", ver.which, "Identity to test")->check(CLI::IsMember(verify_names));
  verify->add_option("--trials", ver.trials, "Number of trials")->check(CLI::Range(1, 100000));
  verify->add_option("--size", ver.size, "Number of points per set")->check(CLI::Range(1, 8));
  verify->add_option("--tol", ver.tol, "Relative difference above which the run fails")->check(CLI::Range(1e-16, 1.0));

  // tw
  struct {
    double s = 0.0;
    int order = 40;
  } tw;
  CLI::App* tw_cmd = app.add_subcommand("tw", "GUE Tracy-Widom distribution F_GUE(s)");
  tw_cmd->add_option("--s", tw.s, "Argument")->check(CLI::Range(-10.0, 1e6));
  tw_cmd->add_option("--order", tw.order, "Nystrom order")->check(CLI::Range(8, 400));

  // corollary-mc
  struct {
    int N = 200;
    double alpha = 1.0, gamma = 0.5, bin_width = 0.5, x_range = 2.0;
    long long samples = 10000;
  } cor;
  CLI::App* corollary = app.add_subcommand("corollary-mc", "Monte Carlo of the scaled geodesic crossing location");
  corollary->add_option("--N", cor.N, "Grid rows")->check(CLI::Range(10, 2000));
  corollary->add_option("--alpha", cor.alpha, "Aspect ratio M/N")->check(CLI::Range(0.1, 10.0));
  corollary->add_option("--gamma", cor.gamma, "Cut fraction")->check(CLI::Range(0.05, 0.95));
  corollary->add_option("--samples", cor.samples, "Sample count")->check(CLI::Range(1LL, 100000000LL));
  corollary->add_option("--bin-width", cor.bin_width, "Histogram bin width")->check(CLI::Range(0.01, 10.0));
  corollary->add_option("--x-range", cor.x_range, "Histogram covers [-x_range, x_range)")->check(CLI::Range(0.01, 20.0));

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (CLI::App* nested : sub->get_subcommands({})) nested->fallthrough();
  }

  try {
    // Config file values become defaults, so command-line flags still win.
    const std::string cfg_path = detail::config_path_from_args(argc, argv);
    if (!cfg_path.empty()) {
      for (const auto& [key, value] : read_config_file(cfg_path)) {
        std::vector<CLI::Option*> found;
        detail::find_options(&app, key, found);
        if (found.empty()) throw std::invalid_argument("config file: unknown key '" + key + "'");
        for (CLI::Option* opt : found) opt->default_val(value);
      }
    }
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  set_thread_count(g.threads);

  Output result;
  CLI::App* chosen = app.get_subcommands().front();
  std::string name = chosen->get_name();
  result.config["subcommand"] = name;
  detail::echo_options(&app, result.config);
  detail::echo_options(chosen, result.config);
  if (name == "exact") {
    CLI::App* nested = chosen->get_subcommands().front();
    result.config["subcommand"] = name + " " + nested->get_name();
    detail::echo_options(nested, result.config);
    name += " " + nested->get_name();
  }
  const std::string format = g.format != "auto" ? g.format : (name == "verify" ? "csv" : "json");
  const bool timing = g.timing;
  bool residue = false;

  auto add_report = [&](const EstimateReport& rep, std::uint64_t seed) {
    result.rows.push_back(detail::report_row(rep.quantity, rep.value, rep.stderr_value, -1, -1, rep.error_estimate,
                                             timing ? rep.runtime_ms : 0.0, seed));
    if (g.terms)
      for (const TermRecord& t : rep.terms)
        result.rows.push_back(detail::report_row(rep.quantity, t.value, 0.0, t.k1, t.k2, t.max_abs,
                                                 timing ? t.runtime_ms : 0.0, seed));
    if (rep.imag_residue_exceeds(kImagThreshold)) residue = true;
  };
  auto add_value = [&](const std::string& quantity, cplx value, double stderr_value, double ms, std::uint64_t seed) {
    result.rows.push_back(detail::report_row(quantity, value, stderr_value, -1, -1, 0.0, timing ? ms : 0.0, seed));
    if (imag_residue(value)) residue = true;
  };

  try {
    if (name == "simulate") {
      const Distribution dist = sim.dist == "geo" ? Distribution::geometric(sim.q) : Distribution::exponential();
      const StepDirection dir = sim.direction == "up" ? StepDirection::Up : StepDirection::Right;
      Stopwatch clock;
      MonteCarloEstimate est;
      if (sim.event == "A") {
        if (sim.dist != "geo") throw std::invalid_argument("simulate: event A needs --dist geo");
        if (dir != StepDirection::Right) throw std::invalid_argument("simulate: event A uses a right step");
        est = mc_event_A(sim.m, sim.n, sim.cols, sim.rows, sim.q, sim.x, sim.y, sim.samples, g.seed);
      } else {
        const EventWindow window = sim.event == "tail" ? EventWindow::tail(sim.t1, sim.t2)
                                                       : EventWindow::interval(sim.t1, sim.eps1, sim.t2, sim.eps2);
        est = mc_joint_probability(sim.m, sim.n, sim.cols, sim.rows, dir, window, sim.samples, g.seed, dist);
      }
      add_value("mc_" + sim.event, est.value, est.stderr_value, clock.ms(), g.seed);
    } else if (name.rfind("exact ", 0) == 0) {
      const std::string kind = name.substr(6);
      FiniteParams p{ex.m, ex.n, ex.M, ex.N, ex.direction == "up" ? Direction::Up : Direction::Right};
      p.validate();
      SeriesConfig sc;
      sc.kmax = ex.kmax;
      if (kind == "finite-density") add_report(density(ex.s1, ex.s2, p, sc), 0);
      else if (kind == "tail") add_report(tail_joint(ex.t1, ex.t2, p, sc), 0);
      else if (kind == "geodesic-prob") add_report(geodesic_prob(p, sc), 0);
      else if (kind == "formula01") {
        Formula01Config c;
        c.nodes = ex.nodes;
        Stopwatch clock;
        const cplx v = formula01(ex.s1, ex.s2, p, c);
        add_value("formula01", v, 0.0, clock.ms(), 0);
      } else {
        Formula02Config c;
        c.nodes = ex.nodes;
        Stopwatch clock;
        const cplx v = formula02(ex.s1, ex.s2, p, c);
        add_value("formula02", v, 0.0, clock.ms(), 0);
      }
    } else if (name == "limit-density" || name == "limit-tail") {
      LimitConfig lc;
      lc.kmax = lim.kmax;
      if (lim.quad == "coarse") lc.quad = LimitQuadrature::coarse();
      if (name == "limit-density") add_report(limit_density(lim.s1, lim.s2, lim.x, lim.gamma, lc), 0);
      else add_report(limit_tail(lim.t1, lim.t2, lim.x, lim.gamma, lc), 0);
    } else if (name == "fgue-check") {
      LimitConfig lc;
      lc.kmax = fc.kmax;
      if (fc.quad == "coarse") lc.quad = LimitQuadrature::coarse();
      const FgueComparison cmp = fgue_consistency(fc.s, fc.gamma, lc, fc.grid);
      add_value("fgue_consistency", cmp.value, 0.0, cmp.runtime_ms, 0);
      add_value("fgue", cmp.oracle, 0.0, 0.0, 0);
      add_value("abs_diff", std::abs(cmp.value - cmp.oracle), 0.0, 0.0, 0);
    } else if (name == "verify") {
      result.columns = trial_columns();
      std::vector<std::string> which{ver.which};
      if (ver.which == "all") which = identity_names();
      bool failed = false;
      for (const auto& id : which) {
        const int size = (id == "sab" || id == "sw" || id == "sum-y") ? std::min(ver.size, 3) : ver.size;
        for (const TrialRow& t : run_identity_trials(id, ver.trials, size, g.seed)) {
          Json r;
          r["identity"] = t.identity;
          r["size"] = t.size;
          r["seed"] = t.seed;
          r["lhs_re"] = t.lhs.real();
          r["lhs_im"] = t.lhs.imag();
          r["rhs_re"] = t.rhs.real();
          r["rhs_im"] = t.rhs.imag();
          r["rel_diff"] = t.rel;
          result.rows.push_back(r);
          if (!(t.rel < ver.tol)) failed = true;
        }
      }
      if (failed) result.diagnostic = "identity_mismatch";
    } else if (name == "tw") {
      FredholmConfig fcfg;
      fcfg.order = tw.order;
      Stopwatch clock;
      const double v = fgue(tw.s, fcfg);
      add_value("fgue", v, 0.0, clock.ms(), 0);
    } else if (name == "corollary-mc") {
      Stopwatch clock;
      const auto samples = mc_corollary_crossing(cor.N, cor.alpha, cor.gamma, cor.samples, g.seed);
      const double ms = clock.ms();
      const double n = static_cast<double>(samples.size());
      auto mean_se = [&](auto get) {
        double s = 0.0, s2 = 0.0;
        for (const auto& c : samples) {
          s += get(c);
          s2 += get(c) * get(c);
        }
        const double mean = s / n;
        const double var = n > 1 ? (s2 - n * mean * mean) / (n - 1.0) : 0.0;
        return std::pair<double, double>{mean, std::sqrt(std::max(var, 0.0) / n)};
      };
      const auto mx = mean_se([](const CrossingSample& c) { return c.x; });
      const auto m1 = mean_se([](const CrossingSample& c) { return c.s1; });
      const auto m2 = mean_se([](const CrossingSample& c) { return c.s2; });
      add_value("mean_x", mx.first, mx.second, ms, g.seed);
      add_value("mean_s1", m1.first, m1.second, 0.0, g.seed);
      add_value("mean_s2", m2.first, m2.second, 0.0, g.seed);
      const int bins = static_cast<int>(std::ceil(2.0 * cor.x_range / cor.bin_width - 1e-12));
      for (int b = 0; b < bins; ++b) {
        const double lo = -cor.x_range + b * cor.bin_width;
        const double hi = std::min(lo + cor.bin_width, cor.x_range);
        double hits = 0.0;
        for (const auto& c : samples) hits += (c.x >= lo && c.x < hi) ? 1.0 : 0.0;
        const double pr = hits / n;
        add_value("bin[" + detail::format_double(lo) + "," + detail::format_double(hi) + ")", pr,
                  std::sqrt(pr * (1.0 - pr) / n), 0.0, g.seed);
      }
    }
  } catch (const QuadratureError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }

  if (residue) result.diagnostic = "imag_residue";
  try {
    emit(result, format, g.out, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  if (!result.diagnostic.empty()) {
    err << "diagnostic: " << result.diagnostic << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace lpp::cli
