#include <doctest.h>

#include <cmath>

#include "mcie/cases.hpp"
#include "mcie/deterministic.hpp"
#include "mcie/errors.hpp"
#include "mcie/interpolation.hpp"
#include "test_support.hpp"

using namespace mcie;

namespace {

FunctionOnGrid constant(std::size_t n, double v) { return {std::vector<double>(n, v)}; }

double taylor_exp(double tau, int n) {
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= n; ++k) {
        term *= tau / k;
        sum += term;
    }
    return sum;
}

VolterraProblem volt_exp_high_order(std::size_t tau_points = 257) {
    VolterraProblem p = manufactured_case("volt-exp", {.tau_points = tau_points}).volterra().problem;
    p.tau_interpolation_order = 7;
    return p;
}

}  // namespace

TEST_CASE("picard_step examples") {
    FredholmProblem zero = test::linear_constant();
    zero.forcing = [](Point t) { return std::sin(3.0 * t[0]); };
    zero.kernel = [](Point, Point, double) { return 0.0; };
    const FunctionOnGrid f = forcing_on_grid(zero);
    CHECK(picard_step(zero, constant(f.size(), 7.0)).values == f.values);

    const FredholmProblem lin = test::linear_constant();
    for (double v : picard_step(lin, constant(lin.grid.size(), 1.0)).values) {
        CHECK(v == 1.5);
    }

    // f = t, K = s z / 2: x_1(t) = t + 1/6 (Gauss-Legendre integrates s^2 exactly).
    FredholmProblem ts{.forcing = [](Point t) { return t[0]; },
                       .kernel = [](Point, Point s, double z) { return 0.5 * s[0] * z; },
                       .rho = 0.5,
                       .measure = MeasureSpec::uniform(1),
                       .grid = test::unit_grid(8, QuadratureRule::gauss_legendre)};
    const FunctionOnGrid x1 = picard_step(ts, forcing_on_grid(ts));
    for (std::size_t j = 0; j < ts.grid.size(); ++j) {
        CHECK(x1.values[j] == doctest::Approx(ts.grid.point(j)[0] + 1.0 / 6.0).epsilon(1e-14));
    }

    CHECK_THROWS_AS(picard_step(lin, constant(3, 1.0)), ValidationError);
    FredholmProblem nan = lin;
    nan.kernel = [](Point, Point, double) { return std::nan(""); };
    CHECK_THROWS_AS(picard_step(nan, constant(nan.grid.size(), 1.0)), EvaluationError);
}

TEST_CASE("picard_solve examples") {
    const FredholmProblem lin = manufactured_case("fred-lin-const").fredholm().problem;
    const auto it = picard_solve(lin, 50);
    REQUIRE(it.size() == 51);
    for (double v : it.back().values) {
        CHECK(std::abs(v - 2.0) <= 1e-10);
    }
    CHECK_THROWS_AS(picard_solve(lin, 0), ValidationError);

    FredholmProblem zero = lin;
    zero.kernel = [](Point, Point, double) { return 0.0; };
    for (const FunctionOnGrid& x : picard_solve(zero, 3)) {
        CHECK(x.values == forcing_on_grid(zero).values);
    }

    const FredholmCase smooth = manufactured_case("fred-smooth").fredholm();
    const auto s = picard_solve(smooth.problem, 30);
    const double delta0 = sup_distance(s[1], s[0]);
    double err = 0.0;
    for (std::size_t j = 0; j < smooth.problem.grid.size(); ++j) {
        err = std::max(err, std::abs(s.back().values[j] - smooth.reference(smooth.problem.grid.point(j))));
    }
    CHECK(err <= apriori_error_bound(smooth.problem.rho, delta0, 30) + 1e-8);
}

TEST_CASE("apriori_error_bound") {
    CHECK(apriori_error_bound(0.5, 1.0, 3) == 0.25);
    CHECK(apriori_error_bound(0.5, 1.0, 1) == 1.0);
    CHECK(apriori_error_bound(0.9, 2.0, 5) == doctest::Approx(11.8098).epsilon(1e-12));
    CHECK_THROWS_AS(apriori_error_bound(1.0, 1.0, 3), ValidationError);
    CHECK_THROWS_AS(apriori_error_bound(0.0, 1.0, 3), ValidationError);
    CHECK_THROWS_AS(apriori_error_bound(0.5, -1.0, 3), ValidationError);
}

TEST_CASE("property: contraction and the a-priori bound on Fredholm cases") {
    for (const char* id : {"fred-lin-const", "fred-smooth"}) {
        CAPTURE(id);
        const FredholmProblem p = manufactured_case(id).fredholm().problem;
        const auto it = picard_solve(p, 200);
        constexpr double tol = 1e-13;
        for (std::size_t n = 1; n + 1 < 40; ++n) {
            CHECK(sup_distance(it[n + 1], it[n]) <= p.rho * sup_distance(it[n], it[n - 1]) + 2 * tol);
        }
        const double delta0 = sup_distance(it[1], it[0]);
        for (int m = 1; m <= 30; ++m) {
            CHECK(sup_distance(it[200], it[m]) <= apriori_error_bound(p.rho, delta0, m) + tol);
        }
    }
}

TEST_CASE("nystrom_extend reproduces picard_step on the grid") {
    const FredholmProblem p = manufactured_case("fred-smooth").fredholm().problem;
    const auto it = picard_solve(p, 3);
    const auto ext = nystrom_extend(p, it[2], p.grid.points());
    CHECK(test::sup_abs_diff(ext, it[3].values) <= 1e-15);
}

TEST_CASE("volterra_step examples") {
    VolterraProblem p = volt_exp_high_order(65);
    VolterraProblem zero = p;
    zero.forcing = [](double tau, Point y) { return tau + y[0]; };
    zero.kernel = [](double, Point, double, Point, double) { return 0.0; };
    const FunctionOnProductGrid f = forcing_on_grid(zero);
    CHECK(volterra_step(zero, f).values == f.values);

    const FunctionOnProductGrid x1 = volterra_step(p, forcing_on_grid(p));
    for (std::size_t a = 0; a < x1.tau_count; ++a) {
        for (std::size_t j = 0; j < x1.points; ++j) {
            CHECK(x1.at(a, j) == doctest::Approx(1.0 + p.tau_grid[a]).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(volterra_step(p, FunctionOnProductGrid{3, 2, std::vector<double>(6, 1.0)}), ValidationError);
}

TEST_CASE("volterra_solve: Taylor partial sums of exp") {
    const VolterraProblem p = volt_exp_high_order();
    const auto it = volterra_solve(p, 8);
    for (int n = 0; n <= 8; ++n) {
        double worst = 0.0;
        for (std::size_t a = 0; a < p.tau_grid.size(); ++a) {
            worst = std::max(worst, std::abs(it[n].at(a, 0) - taylor_exp(p.tau_grid[a], n)));
        }
        CAPTURE(n);
        CHECK(worst <= 1e-10);
    }
    const double y[] = {0.0};
    CHECK(volterra_extend(p, it[7], 0.3, Point(y, 1)) == doctest::Approx(taylor_exp(0.3, 8)).epsilon(1e-10));
    CHECK_THROWS_AS(volterra_extend(p, it[7], 1.5, Point(y, 1)), ValidationError);
}

TEST_CASE("linear tau interpolation: doubling the grid shrinks the error") {
    auto error_at = [](std::size_t taus) {
        const VolterraProblem p = manufactured_case("volt-exp", {.tau_points = taus}).volterra().problem;
        const auto it = volterra_solve(p, 4);
        double worst = 0.0;
        for (std::size_t a = 0; a < p.tau_grid.size(); ++a) {
            worst = std::max(worst, std::abs(it[4].at(a, 0) - taylor_exp(p.tau_grid[a], 4)));
        }
        return worst;
    };
    const double coarse = error_at(65);
    const double fine = error_at(129);
    CHECK(coarse < 1e-4);
    CHECK(fine < coarse / 3.0);
}

TEST_CASE("volterra_tail_bound") {
    CHECK(volterra_tail_bound(1.0, 1.0, 3) == doctest::Approx(std::exp(1.0) - 2.5).epsilon(1e-14));
    CHECK(volterra_tail_bound(0.0, 1.0, 3) == 0.0);
    CHECK(volterra_tail_bound(2.0, 1.0, 4) == doctest::Approx(std::exp(2.0) - 19.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(volterra_tail_bound(-1.0, 1.0, 3), ValidationError);
    CHECK_THROWS_AS(volterra_tail_bound(1.0, -1.0, 3), ValidationError);
}

TEST_CASE("property: tail bound matches the truncated factorial series") {
    for (double C = 0.0; C <= 5.0; C += 0.25) {
        for (int m = 1; m <= 12; ++m) {
            double series = 0.0;
            double term = 1.0;  // C^n / n!
            for (int n = 0; n <= 60; ++n) {
                if (n > 0) {
                    term *= C / n;
                }
                if (n >= m) {
                    series += term;
                }
            }
            CAPTURE(C);
            CAPTURE(m);
            CHECK(std::abs(volterra_tail_bound(C, 1.0, m) - series) <= 1e-12);
        }
    }
}

TEST_CASE("property: factorial bound on volt-exp") {
    const VolterraProblem p = volt_exp_high_order();
    const auto it = volterra_solve(p, 10);
    const std::size_t last = p.tau_grid.size() - 1;
    for (int n = 1; n <= 10; ++n) {
        CHECK(std::abs(it[n].at(last, 0) - std::exp(1.0)) <= volterra_tail_bound(1.0, 1.0, n + 1) + 1e-10);
    }
}

TEST_CASE("mittag_leffler special values") {
    CHECK(mittag_leffler(1.0, 1.0, 1.5) == doctest::Approx(std::exp(1.5)).epsilon(1e-14));
    CHECK(mittag_leffler(2.0, 1.0, -4.0) == doctest::Approx(std::cos(2.0)).epsilon(1e-12));
    CHECK(mittag_leffler(1.0, 2.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, 1.0), ValidationError);
}

TEST_CASE("TauInterpolator") {
    const std::vector<double> nodes = equispaced_tau_grid(11);
    const TauInterpolator cubic(nodes, 3);
    std::vector<double> values;
    for (double x : nodes) {
        values.push_back(1.0 - 2.0 * x + 3.0 * x * x * x);
    }
    for (double x : {0.0, 0.013, 0.37, 0.5, 0.91, 0.999, 1.0}) {
        CHECK(cubic(x, values) == doctest::Approx(1.0 - 2.0 * x + 3.0 * x * x * x).epsilon(1e-13));
    }
    const TauInterpolator::Stencil at_node = cubic.stencil(0.3);
    double sum = 0.0;
    for (std::size_t k = 0; k < at_node.count; ++k) {
        sum += at_node.weights[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cubic.stencil(1.1), ValidationError);
    CHECK_THROWS_AS(cubic.stencil(-0.1), ValidationError);
    CHECK_THROWS_AS(TauInterpolator({0.0, 0.5, 0.4}, 1), ValidationError);
    CHECK_THROWS_AS(TauInterpolator({0.0, 1.0}, 2), ValidationError);
}

TEST_CASE("sup_distance and sup_norm") {
    const FunctionOnGrid a{{1.0, -3.0, 2.0}};
    const FunctionOnGrid b{{1.5, -3.0, 0.0}};
    CHECK(a.sup_norm() == 3.0);
    CHECK(sup_distance(a, b) == 2.0);
    CHECK_THROWS_AS(sup_distance(a, FunctionOnGrid{{1.0}}), ValidationError);
}
