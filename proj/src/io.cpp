#include "fkdv/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fkdv/error.hpp"

namespace fkdv {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::NearSingularity: return "near_singularity";
    case ErrorKind::NonpositiveLambda: return "nonpositive_lambda";
    case ErrorKind::GridMismatch: return "grid_mismatch";
    case ErrorKind::BaseMismatch: return "base_mismatch";
    case ErrorKind::NoConvergence: return "no_convergence";
    case ErrorKind::Inadmissible: return "inadmissible";
    case ErrorKind::LeftAdmissibleSet: return "left_admissible_set";
    case ErrorKind::InsufficientTail: return "insufficient_tail";
    case ErrorKind::InsufficientModes: return "insufficient_modes";
    case ErrorKind::WindowTooNarrow: return "window_too_narrow";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

// JSON has no NaN or infinity; those become null.
nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw Error(ErrorKind::Io, "malformed number '" + field + "'");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void write_kernel_csv(std::ostream& out, const KernelTable& table) {
  out << "x,kp,kp_prime\n";
  for (int i = 0; i < table.resolution(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    out << format_double(table.grid[u]) << ',' << format_double(table.values[u]) << ','
        << format_double(table.derivative_values[u]) << '\n';
  }
}

nlohmann::json to_json(const KernelPropertyReport& report) {
  auto arr = nlohmann::json::array();
  for (const auto& c : report.checks)
    arr.push_back({{"check", c.check}, {"pass", c.pass}, {"margin", number(c.margin)}});
  return arr;
}

nlohmann::json to_json(const SteadyState& state, double alpha) {
  auto coeffs = nlohmann::json::array();
  for (double a : state.phi.coeffs()) coeffs.push_back(a);
  return {{"alpha", alpha}, {"k", state.phi.base_wavenumber()}, {"mu", state.mu}, {"coeffs", coeffs}};
}

SteadyState steady_state_from_json(const nlohmann::json& j, double* alpha) {
  try {
    if (alpha) *alpha = j.at("alpha").get<double>();
    CosineSeries phi(j.at("k").get<int>(), j.at("coeffs").get<std::vector<double>>());
    return {std::move(phi), j.at("mu").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Io, std::string("bad series JSON: ") + e.what());
  }
}

void write_grid_csv(std::ostream& out, const SteadyState& state, int intervals) {
  if (intervals < 1) throw Error(ErrorKind::InvalidArgument, "grid needs >= 1 interval");
  const std::vector<double> half = sample_half_period(state.phi, intervals);
  const double h = M_PI / (state.phi.base_wavenumber() * intervals);
  out << "x,phi\n";
  for (int i = 0; i <= 2 * intervals; ++i) {
    const int mirror = i <= intervals ? i : 2 * intervals - i;
    out << format_double(i * h) << ',' << format_double(half[static_cast<std::size_t>(mirror)]) << '\n';
  }
}

void write_branch_csv(std::ostream& out, std::span<const BranchPoint> points) {
  int n = 0;
  for (const auto& p : points) n = std::max(n, p.state.phi.modes());
  out << "s,mu,crest_gap";
  for (int j = 0; j <= n; ++j) out << ",a" << j;
  out << '\n';
  for (const auto& p : points) {
    out << format_double(p.s) << ',' << format_double(p.state.mu) << ',' << format_double(p.crest_gap);
    for (int j = 0; j <= n; ++j) out << ',' << format_double(j <= p.state.phi.modes() ? p.state.phi[j] : 0.0);
    out << '\n';
  }
}

std::vector<BranchPoint> read_branch_csv(std::istream& in, int k) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty branch CSV");
  const auto header = split(line);
  if (header.size() < 4 || header[0] != "s" || header[1] != "mu" || header[2] != "crest_gap" ||
      header[3] != "a0")
    throw Error(ErrorKind::Io, "branch CSV header must start with s,mu,crest_gap,a0");
  const std::size_t width = header.size();
  std::vector<BranchPoint> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width)
      throw Error(ErrorKind::Io, "branch CSV row " + std::to_string(points.size() + 1) +
                                     " has " + std::to_string(fields.size()) + " fields");
    std::vector<double> coeffs;
    coeffs.reserve(width - 3);
    for (std::size_t i = 3; i < width; ++i) coeffs.push_back(parse_double(fields[i]));
    BranchPoint p;
    p.state = {CosineSeries(k, std::move(coeffs)), parse_double(fields[1])};
    p.s = parse_double(fields[0]);
    p.crest_gap = parse_double(fields[2]);
    points.push_back(std::move(p));
  }
  return points;
}

nlohmann::json run_metadata(const ContinuationConfig& config, const BranchRun& run) {
  return {{"alpha", config.alpha},
          {"k", config.k},
          {"modes", config.modes},
          {"newton_tol", config.newton_tol},
          {"stop_crest_gap", config.stop_crest_gap},
          {"points", run.points.size()},
          {"stopped_reason", to_string(run.stopped_reason)}};
}

nlohmann::json to_json(const Check& check) {
  return {{"name", check.name},
          {"pass", check.pass},
          {"margin", number(check.margin)},
          {"applicable", check.applicable},
          {"detail", check.detail}};
}

nlohmann::json to_json(const DiagnosticsReport& report) {
  auto checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back(to_json(c));
  nlohmann::json j{{"checks", checks}, {"all_pass", report.all_pass()}};
  j["crest_exponent"] = report.crest_exponent ? number(*report.crest_exponent) : nullptr;
  j["second_derivative_at_crest"] =
      report.second_derivative_at_crest ? number(*report.second_derivative_at_crest) : nullptr;
  return j;
}

nlohmann::json diagnostics_json(std::span<const BranchPoint> points) {
  auto arr = nlohmann::json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    nlohmann::json j = to_json(points[i].diagnostics);
    j["index"] = i;
    j["s"] = points[i].s;
    j["mu"] = points[i].state.mu;
    j["crest_gap"] = points[i].crest_gap;
    j["chart"] = points[i].chart == Chart::Amplitude ? "amplitude" : "crest_gap";
    j["flagged"] = points[i].flagged;
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace fkdv
