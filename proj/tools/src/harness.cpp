#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "boundstate/dirac_solver.hpp"
#include "boundstate/field_io.hpp"
#include "boundstate/kernel_expansion.hpp"
#include "boundstate/schrodinger_solver.hpp"
#include "boundstate/spectral_analysis.hpp"

namespace boundstate::harness {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& file, int line, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct LineParser {
  const std::string& source;
  int line;

  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source, line, msg); }

  double real(const std::string& v) const {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0' || !std::isfinite(x)) fail("expected a number, got '" + v + "'");
    return x;
  }

  long long integer(const std::string& v) const {
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || *end != '\0') fail("expected an integer, got '" + v + "'");
    return x;
  }

  bool boolean(const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail("expected true or false, got '" + v + "'");
  }
};

// "random(42)" -> ("random", "42"); "standard" -> ("standard", "").
std::pair<std::string, std::string> split_call(const std::string& v) {
  const auto open = v.find('(');
  if (open == std::string::npos || v.back() != ')') return {v, ""};
  return {trim(v.substr(0, open)), trim(v.substr(open + 1, v.size() - open - 2))};
}

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path resolve(const fs::path& out_dir, const fs::path& p) { return p.is_absolute() ? p : out_dir / p; }

std::string mode_name(Mode m) { return m == Mode::Dirac ? "dirac" : "schrodinger"; }

std::string csv_log(const std::vector<IterationRecord>& history) {
  std::ostringstream os;
  os << "iter,lambda_re,lambda_im,energy_shifted,residual,projection\n";
  for (const auto& r : history) {
    os << r.iter << ',' << format_real(r.lambda) << ',' << format_real(r.lambda_im) << ','
       << format_real(r.energy) << ',' << format_real(r.residual) << ',' << format_real(r.projection) << '\n';
  }
  return os.str();
}

std::string summary_text(const RunConfig& c, const RunReport& r) {
  std::ostringstream os;
  os << "name = " << r.name << '\n'
     << "mode = " << mode_name(r.mode) << '\n'
     << "exit_status = " << r.exit_status << '\n'
     << "converged = " << (r.exit_status == kConverged ? "true" : "false") << '\n'
     << "iterations = " << r.iterations << '\n'
     << "newton_steps = " << r.newton_steps << '\n'
     << "lambda = " << format_real(r.lambda) << '\n'
     << "lambda_im = " << format_real(r.lambda_im) << '\n'
     << "energy = " << format_real(r.energy) << '\n'
     << (c.mode == Mode::Dirac ? "kappa = " : "mu = ") << format_real(r.parameter) << '\n'
     << "residual = " << format_real(r.residual) << '\n'
     << "n = " << c.n << '\n'
     << "box = " << format_real(c.box) << '\n'
     << "wall_seconds = " << format_real(r.wall_seconds) << '\n';
  return os.str();
}

template <class Field>
std::string dump_bytes(const Field& f) {
  std::ostringstream os(std::ios::binary);
  write_field_dump(os, f);
  return os.str();
}

FieldDump read_dump(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open reference dump " + p.string());
  return read_field_dump(in);
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::map<std::string, int> seen;
  int guess_line = 0;
  int mode_line = 0;
  int newton_line = 0;
  bool fix_given = false;
  std::vector<int> nucleus_lines;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const LineParser lp{source, line};
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) lp.fail("expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (value.empty()) lp.fail("missing value for '" + key + "'");
    if (key != "nucleus" && !seen.emplace(key, line).second) {
      lp.fail("duplicate key '" + key + "' (first set on line " + std::to_string(seen[key]) + ")");
    }

    if (key == "name") {
      c.name = value;
    } else if (key == "mode") {
      mode_line = line;
      if (value == "schrodinger") {
        c.mode = Mode::Schrodinger;
      } else if (value == "dirac") {
        c.mode = Mode::Dirac;
      } else {
        lp.fail("mode must be schrodinger or dirac, got '" + value + "'");
      }
    } else if (key == "nucleus") {
      std::istringstream fields(value);
      std::vector<std::string> parts;
      for (std::string p; fields >> p;) parts.push_back(p);
      if (parts.size() != 4) lp.fail("nucleus needs 'Z x y z'");
      c.nuclei.push_back({lp.real(parts[0]), {lp.real(parts[1]), lp.real(parts[2]), lp.real(parts[3])}});
      nucleus_lines.push_back(line);
    } else if (key == "box") {
      c.box = lp.real(value);
      if (!(c.box > 0.0)) lp.fail("box must be positive");
    } else if (key == "n") {
      const long long n = lp.integer(value);
      if (n < 16) lp.fail("n must be at least 16");
      c.n = static_cast<std::size_t>(n);
    } else if (key == "epsilon_kernel") {
      c.epsilon_kernel = lp.real(value);
      if (!(c.epsilon_kernel > 0.0 && c.epsilon_kernel <= 1e-2)) lp.fail("epsilon_kernel must lie in (0, 1e-2]");
    } else if (key == "parameter0") {
      c.parameter0 = lp.real(value);
    } else if (key == "fix_parameter") {
      c.fix_parameter = lp.boolean(value);
      fix_given = true;
    } else if (key == "newton") {
      c.newton = lp.boolean(value);
      newton_line = line;
    } else if (key == "max_iters") {
      const long long m = lp.integer(value);
      if (m <= 0) lp.fail("max_iters must be positive");
      c.max_iters = static_cast<int>(m);
    } else if (key == "tol") {
      c.tol = lp.real(value);
      if (!(c.tol > 0.0)) lp.fail("tol must be positive");
    } else if (key == "shift_tau") {
      if (value == "auto") {
        c.shift_tau.reset();
      } else {
        c.shift_tau = lp.real(value);
      }
    } else if (key == "initial_guess") {
      guess_line = line;
      const auto [kind, arg] = split_call(value);
      if (kind == "standard" && arg.empty()) {
        c.guess = GuessKind::Standard;
      } else if (kind == "swapped" && arg.empty()) {
        c.guess = GuessKind::Swapped;
      } else if (kind == "random") {
        c.guess = GuessKind::Random;
        if (!arg.empty()) {
          const long long s = lp.integer(arg);
          if (s < 0) lp.fail("seed must be non-negative");
          c.seed = static_cast<std::uint64_t>(s);
        }
      } else if (kind == "gaussian") {
        c.guess = GuessKind::Gaussian;
        if (!arg.empty()) c.gaussian_exponent = lp.real(arg);
        if (!(c.gaussian_exponent > 0.0)) lp.fail("gaussian exponent must be positive");
      } else {
        lp.fail("unknown initial_guess '" + value + "'");
      }
    } else if (key == "reference") {
      c.reference = value;
    } else if (key == "csv") {
      c.csv = value;
    } else if (key == "summary") {
      c.summary = value;
    } else if (key == "dump") {
      c.dump = fs::path(value);
    } else {
      lp.fail("unknown key '" + key + "'");
    }
  }

  const int last = std::max(line, 1);
  if (mode_line == 0) throw ConfigError(source, last, "missing required key 'mode'");
  if (c.nuclei.empty()) throw ConfigError(source, last, "at least one 'nucleus' line is required");
  if (c.mode == Mode::Schrodinger && (c.guess == GuessKind::Swapped || c.guess == GuessKind::Gaussian)) {
    throw ConfigError(source, guess_line, "swapped and gaussian guesses need mode = dirac");
  }
  if (!fix_given) c.fix_parameter = !c.newton;
  if (c.newton == c.fix_parameter) {
    throw ConfigError(source, newton_line ? newton_line : seen["fix_parameter"],
                      "exactly one of fix_parameter and newton must be true");
  }
  try {
    const Grid grid(c.n, c.box);
    try {
      validate(PotentialSpec{c.nuclei, c.epsilon_kernel, c.shift_tau.value_or(0.0)}, grid);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(source, nucleus_lines.front(), e.what());
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source, seen.count("n") ? seen["n"] : last, e.what());
  }
  if (c.parameter0) {
    const double p = *c.parameter0;
    if (c.mode == Mode::Schrodinger && !(p > 0.0)) {
      throw ConfigError(source, seen["parameter0"], "Schrodinger parameter0 is mu and must be positive");
    }
    if (c.mode == Mode::Dirac && !(p < 0.0)) {
      throw ConfigError(source, seen["parameter0"], "Dirac parameter0 is E - m c^2 and must be negative");
    }
  }
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config");
  RunConfig c = parse_config(in, path.string());
  if (c.name.empty()) c.name = path.stem().string();
  return c;
}

void apply_overrides(RunConfig& config, const Overrides& overrides) {
  if (overrides.seed) config.seed = *overrides.seed;
  if (overrides.paper_box) config.box = 100.0;
  if (config.name.empty()) config.name = "run";
  if (config.csv.empty()) config.csv = config.name + ".csv";
  if (config.summary.empty()) config.summary = config.name + ".summary.txt";
}

void write_atomic(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) {
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

RunReport run(const RunConfig& input, const fs::path& out_dir) {
  RunConfig c = input;
  apply_overrides(c, {});
  RunReport rep;
  rep.name = c.name;
  rep.mode = c.mode;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Grid grid(c.n, c.box);
    PotentialSpec spec{c.nuclei, c.epsilon_kernel, c.shift_tau.value_or(0.0)};
    if (!c.shift_tau) spec = make_negative_definite(spec, grid);
    const ScalarField V = assemble(spec, grid);

    std::vector<IterationRecord> history;
    bool converged = false;
    std::string dump;
    if (c.mode == Mode::Schrodinger) {
      PowerOptions opts;
      opts.max_iters = c.max_iters;
      opts.tol = c.tol;
      if (c.reference) {
        auto ref = read_dump(resolve(out_dir, *c.reference));
        if (ref.components.size() != 1) throw std::runtime_error("Schrodinger reference must be a scalar dump");
        opts.reference = std::move(ref.components.front());
      }
      ScalarField psi = c.guess == GuessKind::Random ? random_dirac_guess(grid, c.seed)[0]
                                                     : hydrogenic_guess(grid, c.nuclei.front());
      SchrodingerState s(std::move(psi), c.parameter0.value_or(1.0), spec.shift_tau);
      s = c.newton ? newton_mu(std::move(s), V, c.tol, opts) : power_iterate(std::move(s), V, opts);
      converged = s.converged;
      history = s.history;
      rep.iterations = s.iterations;
      rep.lambda = s.lambda;
      rep.lambda_im = s.lambda_im;
      rep.energy = s.energy;
      rep.parameter = s.mu;
      rep.residual = s.residual;
      rep.newton_steps = static_cast<int>(s.newton.size());
      if (c.dump) dump = dump_bytes(s.psi);
    } else {
      DiracPowerOptions opts;
      opts.max_iters = c.max_iters;
      opts.tol = c.tol;
      if (c.reference) {
        auto ref = read_dump(resolve(out_dir, *c.reference));
        if (ref.components.size() != 4) throw std::runtime_error("Dirac reference must be a spinor dump");
        opts.reference = SpinorField(ref.components[0], ref.components[1], ref.components[2], ref.components[3]);
      }
      const Nucleus& nuc = c.nuclei.front();
      SpinorField psi = [&] {
        switch (c.guess) {
          case GuessKind::Swapped: return swap_large_small(standard_dirac_guess(grid, nuc));
          case GuessKind::Random: return random_dirac_guess(grid, c.seed);
          case GuessKind::Gaussian: return gaussian_dirac_guess(grid, nuc, c.gaussian_exponent);
          case GuessKind::Standard: break;
        }
        return standard_dirac_guess(grid, nuc);
      }();
      const double kappa0 = kappa_from_binding(c.parameter0.value_or(-0.5), spec.shift_tau);
      DiracState s(std::move(psi), kappa0, spec.shift_tau);
      s = c.newton ? newton_kappa(std::move(s), V, c.tol, opts) : power_iterate_dirac(std::move(s), V, opts);
      converged = s.converged;
      history = s.history;
      rep.iterations = s.iterations;
      rep.lambda = s.lambda;
      rep.lambda_im = s.lambda_im;
      rep.energy = c.newton ? s.binding() : s.energy;
      rep.parameter = s.kappa;
      rep.residual = s.residual;
      rep.newton_steps = static_cast<int>(s.newton.size());
      if (c.dump) dump = dump_bytes(s.psi);
    }
    rep.exit_status = converged ? kConverged : kMaxIters;
    rep.message = converged ? "converged" : "iteration limit reached";
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_atomic(resolve(out_dir, c.csv), csv_log(history));
    if (c.dump) write_atomic(resolve(out_dir, *c.dump), dump);
    write_atomic(resolve(out_dir, c.summary), summary_text(c, rep));
  } catch (const std::exception& e) {
    rep.exit_status = kError;
    rep.message = e.what();
  }
  if (rep.wall_seconds == 0.0) {
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rep;
}

std::vector<fs::path> suite_configs(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".cfg") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SuiteReport run_suite(const std::vector<fs::path>& configs, const fs::path& out_dir, const Overrides& overrides,
                      unsigned max_parallel) {
  SuiteReport rep;
  rep.runs.resize(configs.size());
  std::vector<std::optional<RunConfig>> parsed(configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) {
    try {
      RunConfig c = load_config(configs[i]);
      apply_overrides(c, overrides);
      parsed[i] = std::move(c);
    } catch (const std::exception& e) {
      rep.runs[i].name = configs[i].stem().string();
      rep.runs[i].exit_status = kError;
      rep.runs[i].message = e.what();
    }
  }

  if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());
  std::size_t next = 0;
  std::vector<std::pair<std::size_t, std::future<RunReport>>> active;
  const auto drain_one = [&] {
    auto& [idx, fut] = active.front();
    rep.runs[idx] = fut.get();
    active.erase(active.begin());
  };
  for (; next < configs.size(); ++next) {
    if (!parsed[next]) continue;
    if (active.size() >= max_parallel) drain_one();
    active.emplace_back(next, std::async(std::launch::async, [&, next] { return run(*parsed[next], out_dir); }));
  }
  while (!active.empty()) drain_one();

  // Cross-run check: converged Dirac runs of the same physical setup.
  std::map<std::string, std::vector<double>> groups;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    if (!parsed[i] || parsed[i]->mode != Mode::Dirac || rep.runs[i].exit_status != kConverged) continue;
    const RunConfig& c = *parsed[i];
    std::ostringstream key;
    key << c.n << ' ' << format_real(c.box) << ' ' << format_real(c.parameter0.value_or(-0.5)) << ' ' << c.newton;
    for (const auto& nuc : c.nuclei) {
      key << ' ' << format_real(nuc.Z) << ' ' << format_real(nuc.position[0]) << ' '
          << format_real(nuc.position[1]) << ' ' << format_real(nuc.position[2]);
    }
    groups[key.str()].push_back(rep.runs[i].energy);
  }
  for (const auto& [key, energies] : groups) {
    for (double a : energies) {
      for (double b : energies) {
        rep.dirac_energy_spread = std::max(rep.dirac_energy_spread, std::abs(a - b) / std::abs(a));
      }
    }
  }

  const bool any_failed =
      std::any_of(rep.runs.begin(), rep.runs.end(), [](const RunReport& r) { return r.exit_status != kConverged; });
  rep.exit_status = (any_failed || rep.dirac_energy_spread > 1e-6) ? kMaxIters : kConverged;
  return rep;
}

void write_suite_summary(std::ostream& os, const SuiteReport& report) {
  os << "name,mode,exit_status,iterations,newton_steps,lambda,energy,parameter,residual,wall_seconds,message\n";
  for (const auto& r : report.runs) {
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    os << r.name << ',' << mode_name(r.mode) << ',' << r.exit_status << ',' << r.iterations << ','
       << r.newton_steps << ',' << format_real(r.lambda) << ',' << format_real(r.energy) << ','
       << format_real(r.parameter) << ',' << format_real(r.residual) << ',' << format_real(r.wall_seconds) << ','
       << msg << '\n';
  }
  os << "# dirac_energy_spread = " << format_real(report.dirac_energy_spread) << '\n';
  os << "# exit_status = " << report.exit_status << '\n';
}

bool verify_properties(std::ostream& os) {
  bool all = true;
  const auto check = [&](const std::string& name, bool ok, const std::string& detail) {
    os << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    all = all && ok;
  };
  const auto fmt = [](const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return std::string(buf);
  };

  const double g = gamma_Z(118.0);
  check("gamma_Z(118)", std::abs(g - 0.508457) <= 5e-7, fmt("%.9f", g));

  try {
    const auto sum = build_power_sum(1.0, 1e-6, 1e-6, 1e6);
    const double err = max_relative_error(sum, 10000);
    check("power sum certification", err <= 1e-6, fmt("max rel error %.3e with %.0f terms", err, sum.terms.size()));
    const auto hs = build_helmholtz_sum(1.0, 1e-6, 1e-6, 200.0);
    const double herr = max_relative_error(hs, 10000);
    check("helmholtz sum certification", herr <= 1e-6,
          fmt("max rel error %.3e with %.0f terms", herr, hs.terms.size()));
  } catch (const std::exception& e) {
    check("kernel certification", false, e.what());
  }

  double worst = 0.0;
  for (double d : {0.125, 0.25, 0.5}) {
    for (double k : {0.5, 1.0, 2.0}) {
      worst = std::max(worst, std::abs(hs_norm_numeric(d, k).value / hs_norm_analytic(d, k) - 1.0));
    }
  }
  check("Hilbert-Schmidt closed form", worst <= 1e-3, fmt("max rel deviation %.3e", worst));

  const auto ps = product_spectrum_examples();
  bool imag = true;
  for (const auto& z : ps.two_by_two.eigenvalues) imag = imag && std::abs(z.real()) < 1e-14 && std::abs(std::abs(z.imag()) - 1.0) < 1e-14;
  std::vector<double> re;
  for (const auto& z : ps.three_by_three.eigenvalues) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  const bool three = std::abs(re[0] + 1.0) < 1e-14 && std::abs(re[1] + 1.0) < 1e-14 && std::abs(re[2] - 1.0) < 1e-14;
  const bool forms = *std::max_element(ps.two_by_two.b_form_min.begin(), ps.two_by_two.b_form_min.end()) < 1e-14 &&
                     *std::min_element(ps.three_by_three.b_form_min.begin(), ps.three_by_three.b_form_min.end()) > 0.5;
  check("product spectra", imag && three && forms, "{i, -i} and {-1, -1, 1}");

  const PhysicalConstants pc;
  const double kappa = kappa_from_binding(-0.5);
  const auto bounds = operator_bounds_check(kappa, pc.rest_energy() - 0.5, random_momentum_spinors(1000, 8, kappa, 1));
  check("operator bounds", bounds.ok(),
        fmt("off-diagonal max ratio %.6g of bound %.6g", bounds.off_diagonal_max_ratio, bounds.off_diagonal_bound));

  const auto below = integrability_trend(1.0, 0.25, 1.0);
  const auto above = integrability_trend(1.0, 0.75, 1.0);
  check("integrability threshold", below.converges && !above.converges,
        fmt("final increment ratios %.3g (delta 0.25) and %.3g (delta 0.75)", below.final_ratio, above.final_ratio));
  return all;
}

}  // namespace boundstate::harness
