#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "fkdv/branch.hpp"
#include "fkdv/error.hpp"

using namespace fkdv;
using std::numbers::pi;

namespace {

ContinuationConfig small_config(double alpha, int k) {
  ContinuationConfig c;
  c.alpha = alpha;
  c.k = k;
  c.modes = 128;
  c.max_modes = 512;
  return c;
}

// One shared run per configuration keeps the suite fast.
const BranchRun& cached_run(double alpha, int k, int direction = 1) {
  static std::map<std::tuple<double, int, int>, BranchRun> runs;
  auto key = std::make_tuple(alpha, k, direction);
  auto it = runs.find(key);
  if (it == runs.end()) {
    ContinuationConfig c = small_config(alpha, k);
    c.direction = direction;
    it = runs.emplace(key, continue_branch(MultiplierSymbol(alpha), c)).first;
  }
  return it->second;
}

}  // namespace

TEST_SUITE("branch") {
  TEST_CASE("bifurcation points") {
    const MultiplierSymbol m(2.0);
    CHECK(bifurcation_point(m, 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bifurcation_point(m, 2) == doctest::Approx(0.2).epsilon(1e-15));
    for (int k = 1; k < 10; ++k) CHECK(bifurcation_point(m, k + 1) < bifurcation_point(m, k));
    CHECK_THROWS_AS(bifurcation_point(m, 0), Error);
  }

  TEST_CASE("second-order speed coefficient") {
    CHECK(mu2_coefficient(MultiplierSymbol(2.0), 1) == doctest::Approx(-0.0833333).epsilon(1e-6));
    CHECK(mu2_coefficient(MultiplierSymbol(4.0), 1) == doctest::Approx(0.2619048).epsilon(1e-6));
    CHECK(mu2_coefficient(MultiplierSymbol(2.0), 12) > 0.0);
    CHECK(mu2_coefficient(MultiplierSymbol(1.5), 30) > 0.0);
  }

  TEST_CASE("local data and asymptotic branch") {
    const MultiplierSymbol m(2.0);
    const LocalBifurcationData d = local_bifurcation_data(m, 3);
    CHECK(d.mu_star == m(3.0));
    CHECK(d.phi2[1] == 0.0);
    CHECK(d.phi2[0] != 0.0);
    CHECK(d.phi2[2] != 0.0);
    CHECK(d.phi2.base_wavenumber() == 3);

    const SteadyState a = asymptotic_branch(m, 1, 0.1);
    CHECK(0.5 * a.phi[0] == doctest::Approx(-0.005).epsilon(1e-12));
    CHECK(a.phi[1] == 0.1);
    CHECK(a.phi[2] == doctest::Approx(0.0083333).epsilon(1e-5));
    CHECK(a.mu == doctest::Approx(0.4991667).epsilon(1e-7));
    for (int j = 3; j <= a.phi.modes(); ++j) CHECK(a.phi[j] == 0.0);

    const SteadyState z = asymptotic_branch(m, 2, 0.0);
    CHECK(z.phi.is_zero());
    CHECK(z.mu == m(2.0));
  }

  TEST_CASE("asymptotic residual is third order") {
    for (double alpha : {1.5, 2.0, 4.0}) {
      const MultiplierSymbol m(alpha);
      const double mk = m(1.0);
      const double eps = 0.04 * mk;
      const double r1 = residual(asymptotic_branch(m, 1, eps, 16), m).max_abs_coeff();
      const double r2 = residual(asymptotic_branch(m, 1, eps / 2, 16), m).max_abs_coeff();
      CHECK(r1 / r2 == doctest::Approx(8.0).epsilon(0.2));
    }
  }

  TEST_CASE("newton correction from the asymptotic guess") {
    const MultiplierSymbol m(2.0);
    ContinuationConfig c = small_config(2.0, 1);
    c.modes = 32;
    const double eps = 0.02;
    const SteadyState guess = asymptotic_branch(m, 1, eps, 32);
    const BranchPoint p = newton_correct(guess, eps, m, c);
    CHECK(p.iterations <= 5);
    CHECK(p.newton_residual <= c.newton_tol);
    CHECK(p.state.phi[1] == eps);
    CHECK(p.s == eps);
    CHECK(p.crest_gap > 0.0);
    CHECK(std::abs(p.state.mu - guess.mu) <= 10.0 * eps * eps * eps);

    // The square-root form of the steady equation holds on the grid.
    const auto v = sample_half_period(p.state.phi, 128);
    const auto lv = sample_half_period(apply_L(p.state.phi, m), 128);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double lhs = 0.5 * (p.state.mu - v[i]) * (p.state.mu - v[i]);
      CHECK(lhs == doctest::Approx(0.5 * p.state.mu * p.state.mu - lv[i]).epsilon(1e-10));
    }

    // D_phi F is invertible away from the trivial line.
    const Eigen::MatrixXd j = jacobian_matrix(p.state, m);
    CHECK(std::abs(j.fullPivLu().determinant()) > 0.0);
    CHECK(j.fullPivLu().rank() == j.rows());
  }

  TEST_CASE("newton failure modes") {
    const MultiplierSymbol m(2.0);
    ContinuationConfig c = small_config(2.0, 1);
    c.modes = 32;
    CHECK_THROWS_AS(newton_correct(asymptotic_branch(m, 1, 0.01, 32), 0.0, m, c), Error);

    c.newton_max_iter = 1;
    try {
      newton_correct(asymptotic_branch(m, 1, 0.01, 32), 0.2, m, c);
      FAIL("expected no convergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoConvergence);
    }

    // Far beyond the highest wave no admissible even solution exists.
    c.newton_max_iter = 30;
    try {
      newton_correct(asymptotic_branch(m, 1, 0.6, 32), 0.6, m, c);
      FAIL("expected a failure past the highest wave");
    } catch (const Error& e) {
      const auto k = e.kind();
      CHECK((k == ErrorKind::NoConvergence || k == ErrorKind::Inadmissible ||
             k == ErrorKind::LeftAdmissibleSet));
    }
  }

  TEST_CASE("config validation") {
    ContinuationConfig c;
    c.validate();
    auto expect_invalid = [](ContinuationConfig bad) {
      try {
        bad.validate();
        FAIL("accepted invalid config");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidArgument);
      }
    };
    ContinuationConfig bad = c;
    bad.modes = 7;
    bad.k = 2;
    expect_invalid(bad);
    bad = c;
    bad.newton_tol = 0.0;
    expect_invalid(bad);
    bad = c;
    bad.alpha = 1.0;
    expect_invalid(bad);
    bad = c;
    bad.direction = 0;
    expect_invalid(bad);
    bad = c;
    bad.max_modes = 100;
    expect_invalid(bad);
  }

  TEST_CASE("continuation to the highest wave, alpha = 2, k = 1") {
    const BranchRun& run = cached_run(2.0, 1);
    REQUIRE(run.stopped_reason == StopReason::CrestGap);
    REQUIRE(run.points.size() >= 5);
    const ContinuationConfig c = small_config(2.0, 1);
    double min_mu = 1.0;
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      const BranchPoint& p = run.points[i];
      CHECK(p.newton_residual <= c.newton_tol);
      CHECK(p.state.mu > 0.0);
      CHECK(p.state.mu < 1.0);
      CHECK(p.crest_gap >= 0.0);
      CHECK(p.s == p.state.phi[1]);
      CHECK_FALSE(p.flagged);
      min_mu = std::min(min_mu, p.state.mu);
      if (i > 0 && p.chart == Chart::Amplitude) CHECK(p.s > run.points[i - 1].s);
      if (i > 0 && p.chart == Chart::CrestGap) CHECK(p.crest_gap < run.points[i - 1].crest_gap);
    }
    CHECK(min_mu > 0.05);
    const BranchPoint& last = run.points.back();
    CHECK(last.crest_gap < c.stop_crest_gap * last.state.mu);
    CHECK(last.state.phi.modes() == c.max_modes);
    CHECK(run.speed_window.pass);
    CHECK(run.lambda > 0.0);
  }

  TEST_CASE("small-amplitude branch reproduces mu2") {
    const MultiplierSymbol m(2.0);
    const BranchRun& run = cached_run(2.0, 1);
    const BranchPoint& p = run.points.front();
    const double quotient = (p.state.mu - m(1.0)) / (p.s * p.s);
    CHECK(quotient == doctest::Approx(mu2_coefficient(m, 1)).epsilon(0.05));
    CHECK(quotient < 0.0);
  }

  TEST_CASE("richardson mu2") {
    for (auto [alpha, k] : {std::pair{2.0, 1}, std::pair{4.0, 1}, std::pair{2.0, 3}}) {
      const MultiplierSymbol m(alpha);
      ContinuationConfig c = small_config(alpha, k);
      c.modes = 32;
      const Mu2Estimate e = richardson_mu2(m, k, 0.08 * m(k), c);
      CAPTURE(alpha);
      CAPTURE(k);
      CHECK(e.relative_error <= 0.05);
      CHECK(e.formula == mu2_coefficient(m, k));
    }
  }

  TEST_CASE("negated amplitude gives the same speeds") {
    const BranchRun& up = cached_run(2.0, 1, 1);
    const BranchRun& down = cached_run(2.0, 1, -1);
    REQUIRE(up.points.size() == down.points.size());
    for (std::size_t i = 0; i < up.points.size(); ++i) {
      CHECK(down.points[i].s == doctest::Approx(-up.points[i].s).epsilon(1e-9));
      CHECK(std::abs(down.points[i].state.mu - up.points[i].state.mu) <= 1e-10);
    }
    // The mirrored wave is the half-period translate.
    const CosineSeries shifted = up.points[3].state.phi.half_period_shift();
    for (int j = 0; j <= shifted.modes(); ++j)
      CHECK(std::abs(shifted[j] - down.points[3].state.phi[j]) <= 1e-9);
  }

  TEST_CASE("k = 2 branch starts at m(2) and embeds into the 2 pi problem") {
    const MultiplierSymbol m(2.0);
    const BranchRun& run = cached_run(2.0, 2);
    REQUIRE(run.stopped_reason == StopReason::CrestGap);
    CHECK(run.points.front().state.mu == doctest::Approx(0.2).epsilon(1e-3));
    const BranchPoint& p = run.points[run.points.size() / 2];
    const int n = p.state.phi.modes();
    CosineSeries embedded(1, 2 * n);
    for (int j = 0; j <= n; ++j) embedded[2 * j] = p.state.phi[j];
    const CosineSeries r = residual({embedded, p.state.mu}, m);
    CHECK(r.max_abs_coeff() <= 10.0 * small_config(2.0, 2).newton_tol);
    for (double x : {0.1, 0.7, 1.4})
      CHECK(eval_series(embedded, x) == doctest::Approx(eval_series(p.state.phi, x)).epsilon(1e-12));
  }

  TEST_CASE("extrapolation") {
    const BranchRun& run = cached_run(2.0, 1);
    const std::size_t n = run.points.size();
    const auto tail = std::span<const BranchPoint>(run.points).last(3);
    const SteadyState limit = extrapolate_highest(tail);
    CHECK(limit.mu == limit.phi.value_at_zero());
    CHECK(crest_gap(limit) == doctest::Approx(0.0).epsilon(1e-12).scale(1.0));
    // Extrapolation moves mu by no more than the spread across the tail.
    const double spread = std::abs(tail.back().state.mu - tail.front().state.mu);
    CHECK(std::abs(limit.mu - tail.back().state.mu) <= spread);
    const auto v = sample_half_period(limit.phi, 4 * limit.phi.modes());
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] < v[i - 1]);

    CHECK_THROWS_AS(extrapolate_highest(std::span<const BranchPoint>(run.points).first(2)), Error);
    std::vector<BranchPoint> reversed(run.points.end() - 3, run.points.end());
    std::reverse(reversed.begin(), reversed.end());
    try {
      extrapolate_highest(reversed);
      FAIL("accepted increasing gaps");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InsufficientTail);
    }
    (void)n;
  }

  TEST_CASE("synthetic tail with gaps 0.04, 0.02, 0.01") {
    std::vector<BranchPoint> tail;
    for (double g : {0.04, 0.02, 0.01}) {
      BranchPoint p;
      CosineSeries phi(1, 8);
      phi[1] = 0.3 - g;
      phi[2] = 0.05;
      p.state = {phi, 0.0};
      p.state.mu = phi.value_at_zero() + g;
      p.crest_gap = g;
      tail.push_back(p);
    }
    const SteadyState limit = extrapolate_highest(tail);
    CHECK(limit.mu - limit.phi.value_at_zero() == doctest::Approx(0.0));
    CHECK(limit.phi[1] == doctest::Approx(0.3).epsilon(1e-12));
  }

  TEST_CASE("continuation is deterministic") {
    ContinuationConfig c = small_config(3.0, 1);
    c.modes = 64;
    c.max_modes = 128;
    c.stop_crest_gap = 0.05;
    c.max_points = 8;
    const BranchRun a = continue_branch(MultiplierSymbol(3.0), c);
    const BranchRun b = continue_branch(MultiplierSymbol(3.0), c);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].state.mu == b.points[i].state.mu);
  }
}
