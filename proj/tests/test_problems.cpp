#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "pminres/kacanov.hpp"
#include "pminres/mesh.hpp"
#include "pminres/problems.hpp"

using namespace pminres;

namespace {

constexpr double kPi = 3.14159265358979323846;

int sign_changes(const std::vector<double>& v) {
  int changes = 0;
  double last = 0.0;
  for (double x : v) {
    if (std::abs(x) < 1e-14) continue;
    if (last != 0.0 && x * last < 0.0) ++changes;
    last = x;
  }
  return changes;
}

}  // namespace

TEST_CASE("experiment definitions") {
  SUBCASE("exp1") {
    ProblemSpec p = make_problem(ExperimentId::exp1);
    CHECK(p.dim == 1);
    CHECK(p.epsilon == 0.0);
    CHECK(p.beta[0] == 1.0);
    CHECK(p.c == 1.0);
    CHECK(p.f(0.3, 0.0) == 1.0);
    REQUIRE(p.dirichlet.size() == 2);
    CHECK(p.dirichlet[0].value(0.0, 0.0) == 0.0);
    CHECK(p.exact(0.5, 0.0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-14));
  }
  SUBCASE("exp2 constrains only the x-extremes") {
    ProblemSpec p = make_problem(ExperimentId::exp2);
    CHECK(p.dim == 2);
    CHECK(p.epsilon == 0.0);
    CHECK(p.beta[0] == 1.0);
    CHECK(p.beta[1] == 0.0);
    REQUIRE(p.dirichlet.size() == 2);
    for (const auto& bc : p.dirichlet)
      CHECK((bc.part == "left" || bc.part == "right"));
    CHECK(p.exact(0.7, 0.123) == doctest::Approx(1.0 - std::exp(-0.7)).epsilon(1e-14));

    Mesh mesh = generate_unit_square(4);
    FeSpace U = build_space(mesh, 1, p.dirichlet);
    CHECK(U.n_dofs() - U.n_free() == 2 * 5);  // both vertical sides
  }
  SUBCASE("eriksson") {
    const double eps = 1e-3;
    ProblemSpec p = make_problem(ExperimentId::eriksson, eps);
    CHECK(p.epsilon == eps);
    CHECK(p.c == 0.0);
    CHECK(p.f(0.2, 0.9) == 0.0);
    REQUIRE(p.dirichlet.size() == 4);
    for (double y : {0.0, 0.25, 0.7, 1.0}) {
      CHECK(p.exact(1.0, y) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
      CHECK(p.exact(0.0, y) == doctest::Approx(std::sin(kPi * y)).epsilon(1e-9));
    }
    // boundary data: sin(pi y) on the inflow side, zero elsewhere
    for (const auto& bc : p.dirichlet) {
      if (bc.part == "left")
        CHECK(bc.value(0.0, 0.25) == doctest::Approx(std::sin(kPi * 0.25)).epsilon(1e-14));
      else
        CHECK(bc.value(0.5, 0.5) == 0.0);
    }
  }
}

TEST_CASE("eriksson rates solve eps s^2 - s - eps pi^2 = 0") {
  for (double eps : {1e-2, 1e-3, 1e-6}) {
    auto [s1, s2] = eriksson_rates(eps);
    CHECK(s1 > 0.0);
    CHECK(s2 < 0.0);
    for (double s : {s1, s2}) {
      double res = eps * s * s - s - eps * kPi * kPi;
      CHECK(std::abs(res) <= 1e-9 * (1.0 + std::abs(eps * s * s)));
    }
  }
  auto [s1, s2] = eriksson_rates(1e-3);
  CHECK(s1 == doctest::Approx(1000.00987).epsilon(1e-7));
  CHECK(s2 == doctest::Approx(-0.0098695).epsilon(1e-4));
}

TEST_CASE("P1 Galerkin is nodally exact for -u'' = 1") {
  ProblemSpec prob;
  prob.dim = 1;
  prob.epsilon = 1.0;
  prob.f = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  prob.dirichlet = {{"left", zero}, {"right", zero}};

  Mesh mesh = generate_unit_interval(8);
  FeSpace U = build_space(mesh, 1, prob.dirichlet);
  BaselineResult r = galerkin_solve(prob, U);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.method == "galerkin");
  for (int i = 0; i <= 8; ++i) {
    double x = i / 8.0;
    CHECK(r.u.coeffs[i] == doctest::Approx(x * (1.0 - x) / 2.0).epsilon(1e-10).scale(1.0));
  }
  REQUIRE(r.indicators.size() == 8);
  for (double v : r.indicators) CHECK(v >= 0.0);
}

TEST_CASE("zero data gives the zero solution") {
  ProblemSpec prob = make_problem(ExperimentId::exp1);
  prob.f = [](double, double) { return 0.0; };
  Mesh mesh = generate_unit_interval(8);
  FeSpace U = build_space(mesh, 1, prob.dirichlet);
  BaselineResult r = galerkin_solve(prob, U);
  REQUIRE(r.status == SolveStatus::ok);
  for (double v : r.u.coeffs) CHECK(std::abs(v) < 1e-12);
  for (double v : r.indicators) CHECK(std::abs(v) < 1e-24);
}

TEST_CASE("Galerkin on exp1 produces the coarse-grid sawtooth") {
  // Advection-dominated limit: with both endpoint values pinned, the P1
  // Galerkin solution carries a (-1)^i mode on top of a positive offset.
  // On an even number of intervals the nodal values stay positive, so the
  // oscillation is visible in the first differences, not in the signs.
  const int n = 32;
  ProblemSpec prob = make_problem(ExperimentId::exp1);
  Mesh mesh = generate_unit_interval(n);
  FeSpace U = build_space(mesh, 1, prob.dirichlet);
  BaselineResult r = galerkin_solve(prob, U);
  REQUIRE(r.status == SolveStatus::ok);
  REQUIRE((int)r.u.coeffs.size() == n + 1);

  // independent oracle: interior row i of the tridiagonal system is
  //   (u_{i+1}-u_{i-1})/2 + (h/6)(u_{i-1}+4u_i+u_{i+1}) = h,
  // solved here with the Thomas algorithm.
  const double h = 1.0 / n;
  std::vector<double> lo(n + 1, -0.5 + h / 6.0), di(n + 1, 4.0 * h / 6.0),
      up(n + 1, 0.5 + h / 6.0), rhs(n + 1, h);
  std::vector<double> ref(n + 1, 0.0);
  for (int i = 2; i < n; ++i) {
    double m = lo[i] / di[i - 1];
    di[i] -= m * up[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  ref[n - 1] = rhs[n - 1] / di[n - 1];
  for (int i = n - 2; i >= 1; --i) ref[i] = (rhs[i] - up[i] * ref[i + 1]) / di[i];
  for (int i = 0; i <= n; ++i)
    CHECK(r.u.coeffs[i] == doctest::Approx(ref[i]).epsilon(1e-10).scale(1.0));

  // the 2h wave: successive differences alternate sign almost everywhere
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i) diff[i] = r.u.coeffs[i + 1] - r.u.coeffs[i];
  CHECK(sign_changes(diff) >= 25);

  // and the result is nowhere near the viscosity solution 1 - e^{-x}
  double maxdev = 0.0;
  for (int i = 0; i <= n; ++i) {
    double x = i * h;
    maxdev = std::max(maxdev, std::abs(r.u.coeffs[i] - (1.0 - std::exp(-x))));
  }
  CHECK(maxdev >= 0.5);
}

TEST_CASE("an unsolvable system is reported in the status") {
  ProblemSpec prob;  // all coefficients zero: b is identically zero
  prob.dim = 1;
  prob.f = [](double, double) { return 1.0; };
  auto zero = [](double, double) { return 0.0; };
  prob.dirichlet = {{"left", zero}, {"right", zero}};
  Mesh mesh = generate_unit_interval(4);
  FeSpace U = build_space(mesh, 1, prob.dirichlet);

  BaselineResult g = galerkin_solve(prob, U);
  CHECK(g.status == SolveStatus::solver_failure);
  CHECK(g.indicators.empty());

  FeSpace V = build_space(mesh, 2, prob.dirichlet);
  BaselineResult m = minres_l2_solve(prob, U, V);
  CHECK(m.status == SolveStatus::solver_failure);
}

TEST_CASE("residual estimator against hand-computed values") {
  SUBCASE("constant source on the square") {
    // f = 2, u_h = 0: eta_T^2 = h_T^2 * 4|T| per element
    ProblemSpec prob;
    prob.dim = 2;
    prob.epsilon = 1.0;
    prob.f = [](double, double) { return 2.0; };
    Mesh mesh = generate_unit_square(2);
    FeSpace U = build_space(mesh, 1);
    FeFunction u{&U, std::vector<double>(U.n_dofs(), 0.0)};
    auto ind = galerkin_indicators(prob, u);
    REQUIRE(ind.size() == 8);
    const double h = std::hypot(0.5, 0.5), area = 0.125;
    for (double v : ind) CHECK(v == doctest::Approx(h * h * 4.0 * area).epsilon(1e-13));
  }
  SUBCASE("gradient kink produces exactly the jump term") {
    // u_h = |2x-1| on the 2x2 square mesh: the only gradient jumps sit on the
    // two vertical edges at x = 1/2 with [grad u . n] = 4, |F| = h_F = 1/2,
    // so the indicator total is 2 * h_F * 16 * |F| = 8.
    ProblemSpec prob;
    prob.dim = 2;
    prob.epsilon = 1.0;
    prob.f = [](double, double) { return 0.0; };
    Mesh mesh = generate_unit_square(2);
    FeSpace U = build_space(mesh, 1);
    FeFunction u = interpolate([](double x, double) { return std::abs(2.0 * x - 1.0); }, U);
    auto ind = galerkin_indicators(prob, u);
    double total = 0.0;
    for (double v : ind) total += v;
    CHECK(total == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("the same kink in 1d") {
    ProblemSpec prob;
    prob.dim = 1;
    prob.epsilon = 1.0;
    prob.f = [](double, double) { return 0.0; };
    Mesh mesh = generate_unit_interval(2);
    FeSpace U = build_space(mesh, 1);
    FeFunction u = interpolate([](double x, double) { return std::abs(2.0 * x - 1.0); }, U);
    auto ind = galerkin_indicators(prob, u);
    double total = 0.0;
    for (double v : ind) total += v;
    CHECK(total == doctest::Approx(8.0).epsilon(1e-12));
  }
  SUBCASE("linear interpolant with matching data has no residual") {
    ProblemSpec prob;
    prob.dim = 2;
    prob.epsilon = 1.0;
    prob.f = [](double, double) { return 0.0; };
    Mesh mesh = generate_unit_square(2);
    FeSpace U = build_space(mesh, 1);
    FeFunction u = interpolate([](double x, double y) { return x - 3.0 * y; }, U);
    for (double v : galerkin_indicators(prob, u)) CHECK(std::abs(v) < 1e-26);
  }
}

TEST_CASE("element gradient norms of an interpolated linear") {
  Mesh mesh = generate_unit_square(2);
  FeSpace V = build_space(mesh, 2);
  FeFunction f = interpolate([](double x, double y) { return x + 2.0 * y; }, V);
  auto norms = element_gradient_norms_sq(f);
  REQUIRE(norms.size() == 8);
  for (double v : norms) CHECK(v == doctest::Approx(5.0 * 0.125).epsilon(1e-13));
}

TEST_CASE("minres_l2 matches the first weighted iterate's primal component") {
  ProblemSpec prob = make_problem(ExperimentId::exp1);
  Mesh mesh = generate_unit_interval(8);
  auto sp = make_spaces(prob, mesh);
  BaselineResult r = minres_l2_solve(prob, sp->U, sp->V);
  REQUIRE(r.status == SolveStatus::ok);
  CHECK(r.method == "minres_l2");

  KacanovState st = make_state(prob, mesh, 100.0, {1e-2, 1e2});
  kacanov_step(st);
  REQUIRE(r.u.coeffs.size() == st.u.coeffs.size());
  for (size_t i = 0; i < r.u.coeffs.size(); ++i)
    CHECK(r.u.coeffs[i] == doctest::Approx(st.u.coeffs[i]).epsilon(1e-9).scale(1.0));

  REQUIRE(r.indicators.size() == static_cast<size_t>(mesh.n_elements()));
  for (double v : r.indicators) CHECK(v >= 0.0);
}

TEST_CASE("minres_l2 on exp1 decays fast on the first interval") {
  ProblemSpec prob = make_problem(ExperimentId::exp1);
  Mesh mesh = generate_unit_interval(32);
  auto sp = make_spaces(prob, mesh);
  BaselineResult r = minres_l2_solve(prob, sp->U, sp->V);
  REQUIRE(r.status == SolveStatus::ok);
  double exact1 = prob.exact(1.0 / 32.0, 0.0);
  CHECK(r.u.coeffs[1] < 0.5 * exact1);
}

TEST_CASE("l2_error") {
  SUBCASE("representable data is reproduced") {
    Mesh mesh = generate_unit_square(2);
    FeSpace V = build_space(mesh, 2);
    auto g = [](double x, double y) { return x * x + y; };
    CHECK(l2_error(interpolate(g, V), g) < 1e-13);
  }
  SUBCASE("constant offset") {
    Mesh mesh = generate_unit_square(3);
    FeSpace U = build_space(mesh, 1);
    FeFunction zero{&U, std::vector<double>(U.n_dofs(), 0.0)};
    CHECK(l2_error(zero, [](double, double) { return 1.0; }) ==
          doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("interpolation error of the exp1 solution") {
    ProblemSpec prob = make_problem(ExperimentId::exp1);
    Mesh mesh = generate_unit_interval(32);
    FeSpace U = build_space(mesh, 1);
    double e = l2_error(interpolate(prob.exact, U), prob.exact);
    CHECK(e <= 1.5e-4);
    CHECK(e > 1e-6);
  }
  SUBCASE("interpolant converges at second order") {
    ProblemSpec prob = make_problem(ExperimentId::exp1);
    Mesh m8 = generate_unit_interval(8);
    Mesh m16 = generate_unit_interval(16);
    FeSpace U8 = build_space(m8, 1);
    FeSpace U16 = build_space(m16, 1);
    double e8 = l2_error(interpolate(prob.exact, U8), prob.exact);
    double e16 = l2_error(interpolate(prob.exact, U16), prob.exact);
    CHECK(std::log2(e8 / e16) >= 1.8);
  }
}

TEST_CASE("line profiles") {
  SUBCASE("constant field") {
    Mesh mesh = generate_unit_square(2);
    FeSpace U = build_space(mesh, 1);
    FeFunction c{&U, std::vector<double>(U.n_dofs(), 3.5)};
    auto prof = line_profile(c, 'x', 0.3, 7);
    REQUIRE(prof.size() == 7);
    for (int i = 0; i < 7; ++i) {
      CHECK(prof[i][0] == doctest::Approx(i / 6.0).epsilon(1e-14));
      CHECK(prof[i][1] == doctest::Approx(3.5).epsilon(1e-13));
    }
  }
  SUBCASE("zero boundary values at the interval endpoints") {
    ProblemSpec prob;
    prob.dim = 1;
    prob.epsilon = 1.0;
    prob.f = [](double, double) { return 1.0; };
    auto zero = [](double, double) { return 0.0; };
    prob.dirichlet = {{"left", zero}, {"right", zero}};
    Mesh mesh = generate_unit_interval(4);
    FeSpace U = build_space(mesh, 1, prob.dirichlet);
    BaselineResult r = galerkin_solve(prob, U);
    auto prof = line_profile(r.u, 'x', 0.0, 2);
    REQUIRE(prof.size() == 2);
    CHECK(prof[0][1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
    CHECK(prof[1][1] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  }
  SUBCASE("midline profile of the exp2 interpolant") {
    ProblemSpec prob = make_problem(ExperimentId::exp2);
    Mesh mesh = generate_unit_square(8);
    FeSpace U = build_space(mesh, 1, prob.dirichlet);
    FeFunction u = interpolate(prob.exact, U);
    auto prof = line_profile(u, 'x', 0.5, 33);
    for (const auto& [x, v] : prof)
      CHECK(std::abs(v - (1.0 - std::exp(-x))) < 2e-3);
    auto prof_y = line_profile(u, 'y', 0.75, 9);
    for (const auto& [y, v] : prof_y)
      CHECK(std::abs(v - (1.0 - std::exp(-0.75))) < 2e-3);
  }
  SUBCASE("invalid requests") {
    Mesh mesh = generate_unit_interval(4);
    FeSpace U = build_space(mesh, 1);
    FeFunction u{&U, std::vector<double>(U.n_dofs(), 0.0)};
    CHECK_THROWS_AS(line_profile(u, 'y', 0.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(line_profile(u, 'x', 1.5, 5), std::invalid_argument);
    CHECK_THROWS_AS(line_profile(u, 'x', 0.5, 1), std::invalid_argument);
  }
}

TEST_CASE("staged diffusion schedule") {
  CHECK(staged_epsilon(0) == 1e-2);
  CHECK(staged_epsilon(500) == 1e-2);
  CHECK(staged_epsilon(999) == 1e-2);
  CHECK(staged_epsilon(1000) == 1e-3);
  CHECK(staged_epsilon(4999) == 1e-3);
  CHECK(staged_epsilon(5000) == 1e-4);
  CHECK(staged_epsilon(9999) == 1e-4);
  CHECK(staged_epsilon(10000) == 1e-5);
  CHECK(staged_epsilon(49999) == 1e-5);
  CHECK(staged_epsilon(50000) == 1e-6);
  CHECK(staged_epsilon(5000000) == 1e-6);
  double prev = 1.0;
  for (int n = 0; n < 60000; n += 357) {
    double e = staged_epsilon(n);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("make_problem validates eriksson eps") {
  CHECK_THROWS_AS(make_problem(ExperimentId::eriksson, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_problem(ExperimentId::eriksson, -1.0), std::invalid_argument);
}
