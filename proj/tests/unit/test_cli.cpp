#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fkdv/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fkdv");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = fkdv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fkdv_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int count_lines(const fs::path& p) {
  std::ifstream f(p);
  int n = 0;
  for (std::string line; std::getline(f, line);) ++n;
  return n;
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("kernel certification run") {
    const fs::path dir = scratch("kernel");
    const Result r = run({"kernel", "--alpha", "2", "--modes", "4096", "--grid", "257", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(count_lines(dir / "kernel.csv") == 258);
    const auto report = load(dir / "kernel_report.json");
    for (const auto& c : report) CHECK(c.at("pass") == true);
    CHECK(r.out.find("positivity") != std::string::npos);
  }

  TEST_CASE("usage errors exit with 2") {
    const Result r = run({"kernel", "--alpha", "0.9", "--out", scratch("bad").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("alpha must exceed 1") != std::string::npos);
    CHECK(run({"kernel", "--no-such-flag"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"branch", "--modes", "3", "--out", scratch("bad2").string()}).code == 2);
    CHECK(run({"limit", "--branch-csv", "/nonexistent/branch.csv"}).code == 2);
  }

  TEST_CASE("branch run, determinism and limit pipeline") {
    const fs::path a = scratch("branch_a"), b = scratch("branch_b");
    const std::vector<std::string> args{"branch", "--alpha", "2", "--k", "1", "--modes", "128", "--max-modes", "512"};
    auto with_out = [&](const fs::path& p) {
      auto v = args;
      v.push_back("--out");
      v.push_back(p.string());
      return v;
    };
    const Result ra = run(with_out(a));
    CHECK(ra.code == 0);
    CHECK(run(with_out(b)).code == 0);
    CHECK(slurp(a / "branch.csv") == slurp(b / "branch.csv"));
    const auto meta = load(a / "branch_meta.json");
    CHECK(meta.at("stopped_reason") == "crest_gap");
    const auto diag = load(a / "diagnostics.json");
    CHECK(diag.size() == meta.at("points").get<std::size_t>());

    const fs::path lim = scratch("limit");
    const Result rl = run({"limit", "--branch-csv", (a / "branch.csv").string(), "--out", lim.string()});
    CHECK(rl.code == 0);
    const auto rep = load(lim / "exponent_report.json");
    CHECK(rep.at("crest_exponent").get<double>() >= 0.9);
    CHECK(rep.at("crest_exponent").get<double>() <= 1.3);
    CHECK(fs::exists(lim / "limit_wave.json"));

    // A mid-branch smooth wave is rejected.
    const Result mid = run({"limit", "--branch-csv", (a / "branch.csv").string(), "--point", "3", "--out",
                            scratch("limit_mid").string()});
    CHECK(mid.code == 1);
  }

  TEST_CASE("branch at k = 2 bifurcates from 0.2") {
    const fs::path dir = scratch("branch_k2");
    CHECK(run({"branch", "--alpha", "2", "--k", "2", "--modes", "128", "--max-modes", "512", "--out", dir.string()})
              .code == 0);
    std::ifstream f(dir / "branch.csv");
    std::string header, first;
    std::getline(f, header);
    std::getline(f, first);
    const double mu = std::stod(first.substr(first.find(',') + 1));
    CHECK(mu == doctest::Approx(0.2).epsilon(1e-3));

    const Result lim = run({"limit", "--alpha", "2", "--k", "2", "--modes", "128", "--max-modes", "512", "--out",
                            scratch("limit_k2").string()});
    CHECK(lim.code == 0);
  }

  TEST_CASE("stalls and caps exit with 1 and keep partial output") {
    const fs::path dir = scratch("branch_cap");
    const Result r = run({"branch", "--modes", "64", "--max-points", "3", "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(count_lines(dir / "branch.csv") == 4);
    CHECK(load(dir / "branch_meta.json").at("stopped_reason") == "max_points");
  }

  TEST_CASE("asymptotic order study") {
    const fs::path dir = scratch("asym");
    const Result r = run({"verify-asymptotics", "--eps", "0.08,0.04,0.02,0.01,0", "--out", dir.string()});
    CHECK(r.code == 0);
    const auto rep = load(dir / "asymptotics.json");
    CHECK(rep.at("residual_order").get<double>() >= 2.7);
    CHECK(rep.at("mu_order").get<double>() >= 2.7);
    CHECK(rep.at("mu2").at("sign") == "negative");
    CHECK(rep.at("rows").back().at("residual") == 0.0);
  }

  TEST_CASE("flat config file with command-line override") {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    {
      std::ofstream ini(dir / "run.ini");
      ini << "alpha=3\nmodes=2048\ngrid=65\n";
    }
    const Result r = run({"kernel", "--config", (dir / "run.ini").string(), "--grid", "33", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("alpha=3") != std::string::npos);
    CHECK(count_lines(dir / "kernel.csv") == 34);
  }

  TEST_CASE("sweeps write one directory per run") {
    const fs::path dir = scratch("sweep");
    const Result r = run({"kernel", "--alpha", "1.5,3", "--k", "1,2", "--modes", "2048", "--grid", "33", "--jobs", "2",
                          "--out", dir.string()});
    CHECK(r.code == 0);
    for (const char* sub : {"alpha1.5_k1", "alpha1.5_k2", "alpha3_k1", "alpha3_k2"})
      CHECK(fs::exists(dir / sub / "kernel.csv"));
  }
}
