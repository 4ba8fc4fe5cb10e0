#include "fkdv/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "fkdv/error.hpp"
#include "fkdv/io.hpp"

namespace fkdv::cli {
namespace fs = std::filesystem;

namespace {

constexpr double kLimitExponentLo = 0.9;
constexpr double kLimitExponentHi = 1.3;
constexpr double kMinAsymptoticOrder = 2.7;

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << content;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_file(path, j.dump(2) + "\n"); }

void ensure_writable(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  const fs::path probe = dir / ".fkdv_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw Error(ErrorKind::Io, "output directory not writable: " + dir.string());
  }
  fs::remove(probe, ec);
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Log-log order of `values` against `eps`, skipping non-positive entries.
std::optional<double> fitted_order(const std::vector<double>& eps, const std::vector<double>& values) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < eps.size(); ++i)
    if (eps[i] > 0.0 && values[i] > 0.0) {
      lx.push_back(std::log(eps[i]));
      ly.push_back(std::log(values[i]));
    }
  if (lx.size() < 2) return std::nullopt;
  return slope(lx, ly);
}

std::string sci(double v, int digits = 6) {
  std::ostringstream s;
  s << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

ContinuationConfig RunConfig::continuation(double alpha, int k) const {
  ContinuationConfig c;
  c.alpha = alpha;
  c.k = k;
  c.modes = modes.value_or(256);
  c.max_modes = std::max(max_modes, c.modes);
  c.newton_tol = newton_tol;
  c.s_start = s_start;
  c.s_step = s_step;
  c.stop_crest_gap = stop_gap;
  c.escalate_crest_gap = std::max(escalate_gap, stop_gap);
  c.direction = direction;
  c.max_points = max_points;
  return c;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); };
  if (alphas.empty() || ks.empty()) fail("alpha and k lists must be non-empty");
  for (double a : alphas)
    if (!(a > 1.0)) fail("alpha must exceed 1");
  for (int k : ks)
    if (k < 1) fail("k must be >= 1");
  if (modes && *modes < 1) fail("modes must be >= 1");
  if (grid < 8) fail("grid must be >= 8");
  if (tail < 3) fail("tail must be >= 3");
  if (command == "verify-asymptotics") {
    for (double e : eps)
      if (!(e >= 0.0)) fail("eps values must be non-negative");
  }
  if (command == "branch" || command == "verify-asymptotics" ||
      (command == "limit" && branch_csv.empty()))
    for (double a : alphas)
      for (int k : ks) {
        ContinuationConfig c = continuation(a, k);
        if (command == "verify-asymptotics") c.modes = std::max(modes.value_or(64), 4 * k);
        c.validate();
      }
  if (command == "limit" && !branch_csv.empty() && !fs::exists(branch_csv))
    throw Error(ErrorKind::Io, "branch CSV not found: " + branch_csv);
}

int cmd_kernel(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log) {
  const MultiplierSymbol symbol = MultiplierSymbol(alpha).rescaled(k);
  const int modes = config.modes.value_or(default_kernel_modes(symbol));
  const KernelTable table = make_kernel_table(symbol, config.grid, modes);
  {
    std::ostringstream csv;
    write_kernel_csv(csv, table);
    write_file(fs::path(dir) / "kernel.csv", csv.str());
  }
  KernelPropertyReport report = certify_kernel_properties(symbol, config.grid, modes);
  PropertyCheck lambda_check{"lambda_positive", false, 0.0};
  try {
    lambda_check.margin = lambda_constant(symbol, 65, modes);
    lambda_check.pass = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonpositiveLambda) throw;
  }
  report.checks.push_back(lambda_check);
  write_json(fs::path(dir) / "kernel_report.json", to_json(report));

  log << "kernel alpha=" << alpha << " k=" << k << " modes=" << modes << " grid=" << config.grid
      << " tail_bound=" << sci(table.tail_bound) << "\n";
  log << "  " << std::left << std::setw(24) << "check" << std::setw(6) << "pass" << "margin\n";
  for (const auto& c : report.checks)
    log << "  " << std::setw(24) << c.check << std::setw(6) << (c.pass ? "yes" : "NO") << sci(c.margin)
        << "\n";
  if (report.holder_exponent) log << "  holder exponent (reported only): " << sci(*report.holder_exponent, 4) << "\n";
  log << std::right;
  return report.all_pass() ? kSuccess : kScientificFailure;
}

int cmd_branch(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log) {
  const ContinuationConfig cc = config.continuation(alpha, k);
  const BranchRun run = continue_branch(MultiplierSymbol(alpha), cc);
  {
    std::ostringstream csv;
    write_branch_csv(csv, run.points);
    write_file(fs::path(dir) / "branch.csv", csv.str());
  }
  write_json(fs::path(dir) / "branch_meta.json", run_metadata(cc, run));
  write_json(fs::path(dir) / "diagnostics.json", diagnostics_json(run.points));

  const bool any_flagged =
      std::any_of(run.points.begin(), run.points.end(), [](const BranchPoint& p) { return p.flagged; });
  log << "branch alpha=" << alpha << " k=" << k << " mu*=" << sci(bifurcation_point(MultiplierSymbol(alpha), k))
      << " lambda=" << sci(run.lambda) << " points=" << run.points.size()
      << " stopped=" << to_string(run.stopped_reason) << "\n";
  log << "  " << std::setw(13) << "s" << std::setw(13) << "mu" << std::setw(13) << "crest_gap"
      << std::setw(6) << "N" << std::setw(11) << "chart" << std::setw(8) << "checks\n";
  for (const auto& p : run.points)
    log << "  " << std::setw(13) << sci(p.s) << std::setw(13) << sci(p.state.mu, 8) << std::setw(13)
        << sci(p.crest_gap, 4) << std::setw(6) << p.state.phi.modes() << std::setw(11)
        << (p.chart == Chart::Amplitude ? "amplitude" : "crest_gap") << std::setw(7)
        << (p.flagged ? "FLAG" : "ok") << "\n";
  if (!run.speed_window.pass) log << "  speed window check failed: " << run.speed_window.detail << "\n";
  const bool ok = run.stopped_reason == StopReason::CrestGap && !any_flagged && run.speed_window.pass;
  return ok ? kSuccess : kScientificFailure;
}

int cmd_verify_asymptotics(const RunConfig& config, double alpha, int k, const std::string& dir,
                           std::ostream& log) {
  const MultiplierSymbol symbol(alpha);
  ContinuationConfig cc = config.continuation(alpha, k);
  cc.modes = std::max(config.modes.value_or(64), 4 * k);
  std::vector<double> residuals, mu_diffs;
  auto rows = nlohmann::json::array();
  log << "verify-asymptotics alpha=" << alpha << " k=" << k << " modes=" << cc.modes << "\n";
  log << "  " << std::setw(10) << "eps" << std::setw(15) << "residual" << std::setw(15) << "|dmu|" << "\n";
  for (double e : config.eps) {
    const SteadyState asym = asymptotic_branch(symbol, k, e, cc.modes);
    const double res = residual(asym, symbol).max_abs_coeff();
    double dmu = 0.0;
    if (e > 0.0) dmu = std::abs(newton_correct(asym, e, symbol, cc).state.mu - asym.mu);
    residuals.push_back(res);
    mu_diffs.push_back(dmu);
    rows.push_back({{"eps", e}, {"residual", res}, {"mu_difference", dmu}});
    log << "  " << std::setw(10) << sci(e) << std::setw(15) << sci(res) << std::setw(15) << sci(dmu) << "\n";
  }
  const auto res_order = fitted_order(config.eps, residuals);
  const auto mu_order = fitted_order(config.eps, mu_diffs);

  nlohmann::json report{{"alpha", alpha}, {"k", k}, {"modes", cc.modes}, {"rows", rows}};
  report["residual_order"] = res_order ? nlohmann::json(*res_order) : nlohmann::json(nullptr);
  report["mu_order"] = mu_order ? nlohmann::json(*mu_order) : nlohmann::json(nullptr);

  const double s0 = *std::max_element(config.eps.begin(), config.eps.end());
  if (s0 > 0.0) {
    const Mu2Estimate m2 = richardson_mu2(symbol, k, s0, cc);
    report["mu2"] = {{"formula", m2.formula},
                     {"richardson", m2.richardson},
                     {"relative_error", m2.relative_error},
                     {"sign", m2.richardson < 0.0 ? "negative" : "positive"}};
    log << "  mu2 formula=" << sci(m2.formula) << " richardson=" << sci(m2.richardson)
        << " rel.err=" << sci(m2.relative_error, 3) << " sign=" << (m2.richardson < 0.0 ? "negative" : "positive")
        << "\n";
  }
  const bool ok = res_order && mu_order && *res_order >= kMinAsymptoticOrder && *mu_order >= kMinAsymptoticOrder;
  report["pass"] = ok;
  write_json(fs::path(dir) / "asymptotics.json", report);
  log << "  residual order=" << (res_order ? sci(*res_order, 4) : "n/a")
      << " mu order=" << (mu_order ? sci(*mu_order, 4) : "n/a") << " (need >= " << kMinAsymptoticOrder << ")\n";
  return ok ? kSuccess : kScientificFailure;
}

int cmd_limit(const RunConfig& config, double alpha, int k, const std::string& dir, std::ostream& log) {
  std::vector<BranchPoint> points;
  std::string source;
  if (!config.branch_csv.empty()) {
    std::ifstream in(config.branch_csv);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + config.branch_csv);
    points = read_branch_csv(in, k);
    source = config.branch_csv;
  } else {
    points = continue_branch(MultiplierSymbol(alpha), config.continuation(alpha, k)).points;
    source = "inline continuation";
  }
  if (points.empty()) throw Error(ErrorKind::InsufficientTail, "branch has no points");

  SteadyState state;
  nlohmann::json report{{"alpha", alpha}, {"k", k}, {"source", source}};
  if (config.point) {
    const int n = static_cast<int>(points.size());
    const int idx = *config.point < 0 ? n + *config.point : *config.point;
    if (idx < 0 || idx >= n) throw Error(ErrorKind::InvalidArgument, "point index out of range");
    state = points[static_cast<std::size_t>(idx)].state;
    report["point"] = idx;
    report["crest_gap"] = points[static_cast<std::size_t>(idx)].crest_gap;
  } else {
    const std::size_t t = std::min(points.size(), static_cast<std::size_t>(config.tail));
    state = extrapolate_highest(std::span<const BranchPoint>(points).last(t));
    report["tail"] = t;
  }
  const double exponent = crest_exponent(state);
  const bool ok = exponent >= kLimitExponentLo && exponent <= kLimitExponentHi;
  const int n = state.phi.modes();
  report["mu"] = state.mu;
  report["modes"] = n;
  report["crest_exponent"] = exponent;
  report["window"] = {4.0 * M_PI / (k * n), M_PI / (8.0 * k)};
  report["accepted_range"] = {kLimitExponentLo, kLimitExponentHi};
  report["pass"] = ok;
  write_json(fs::path(dir) / "limit_wave.json", to_json(state, alpha));
  write_json(fs::path(dir) / "exponent_report.json", report);
  log << "limit alpha=" << alpha << " k=" << k << " modes=" << n << " mu=" << sci(state.mu, 10)
      << " crest exponent=" << sci(exponent, 4) << (ok ? " (Lipschitz crest)" : " (outside [0.9, 1.3])")
      << "\n";
  return ok ? kSuccess : kScientificFailure;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  int modes = 0;
  int point = 0;

  CLI::App app{"Spectral continuation of periodic traveling waves for fractional KdV"};
  app.set_config("--config", "", "Flat INI file; command-line flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--alpha", config.alphas, "Symbol order(s), comma separated for a sweep")->delimiter(',');
  app.add_option("--k", config.ks, "Wavenumber(s), comma separated for a sweep")->delimiter(',');
  auto* modes_opt = app.add_option("--modes", modes, "Cosine modes (kernel: series terms)");
  app.add_option("--max-modes", config.max_modes, "Mode cap for escalation near the crest");
  app.add_option("--grid", config.grid, "Kernel table resolution");
  app.add_option("--out", config.out, "Output directory");
  app.add_option("--stop-gap", config.stop_gap, "Stop once crest gap < stop-gap * mu");
  app.add_option("--escalate-gap", config.escalate_gap, "Escalate modes below this relative crest gap");
  app.add_option("--newton-tol", config.newton_tol, "Newton residual tolerance");
  app.add_option("--s-start", config.s_start, "First amplitude, in units of m(k)");
  app.add_option("--s-step", config.s_step, "Initial amplitude step, in units of m(k)");
  app.add_option("--direction", config.direction, "+1 or -1 (sign of the amplitude)");
  app.add_option("--max-points", config.max_points, "Maximum branch points");
  app.add_option("--eps", config.eps, "Amplitudes for the asymptotic study")->delimiter(',');
  app.add_option("--branch-csv", config.branch_csv, "Existing branch CSV for the limit command");
  auto* point_opt = app.add_option("--point", point, "Evaluate one branch point instead of extrapolating");
  app.add_option("--tail", config.tail, "Tail length for the limit extrapolation");
  app.add_option("--jobs", config.jobs, "Concurrent sweep runs (0: all cores)");
  for (const char* name : {"kernel", "branch", "verify-asymptotics", "limit"}) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }
  config.command = app.get_subcommands().front()->get_name();
  if (*modes_opt) config.modes = modes;
  if (*point_opt) config.point = point;

  struct Task {
    double alpha;
    int k;
    fs::path dir;
  };
  std::vector<Task> tasks;
  try {
    config.validate();
    const bool sweep = config.alphas.size() * config.ks.size() > 1;
    for (double a : config.alphas)
      for (int k : config.ks) {
        fs::path dir(config.out);
        if (sweep) dir /= "alpha" + format_double(a) + "_k" + std::to_string(k);
        ensure_writable(dir);
        tasks.push_back({a, k, dir});
      }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  std::vector<int> codes(tasks.size(), kSuccess);
  std::vector<std::string> logs(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      std::ostringstream log;
      const Task& t = tasks[i];
      try {
        if (config.command == "kernel") codes[i] = cmd_kernel(config, t.alpha, t.k, t.dir.string(), log);
        else if (config.command == "branch") codes[i] = cmd_branch(config, t.alpha, t.k, t.dir.string(), log);
        else if (config.command == "verify-asymptotics")
          codes[i] = cmd_verify_asymptotics(config, t.alpha, t.k, t.dir.string(), log);
        else codes[i] = cmd_limit(config, t.alpha, t.k, t.dir.string(), log);
      } catch (const Error& e) {
        const bool usage = e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::Io;
        log << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
        codes[i] = usage ? kUsageError : kScientificFailure;
      }
      logs[i] = log.str();
    }
  };
  unsigned jobs = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size()));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < tasks.size(); ++i) out << logs[i];
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace fkdv::cli
