#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "mcie/cases.hpp"
#include "mcie/deterministic.hpp"
#include "mcie/errors.hpp"
#include "mcie/inference.hpp"
#include "mcie/mc_fredholm.hpp"
#include "mcie/studies.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace mcie;

namespace {

CovarianceEstimate diagonal(std::vector<double> diag) {
    CovarianceEstimate c;
    c.size = diag.size();
    c.matrix.assign(c.size * c.size, 0.0);
    for (std::size_t i = 0; i < c.size; ++i) {
        c.matrix[i * c.size + i] = diag[i];
    }
    return c;
}

double smallest_eigenvalue(const CovarianceEstimate& c) {
    const auto n = static_cast<Eigen::Index>(c.size);
    const Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        c.matrix.data(), n, n);
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

double max_entry_gap(const CovarianceEstimate& a, const CovarianceEstimate& b) {
    return test::sup_abs_diff(a.matrix, b.matrix);
}

}  // namespace

TEST_CASE("estimate_covariance examples") {
    // K independent of s: every summand is the same, so the estimate is exactly zero.
    const FredholmProblem lin = test::linear_constant(0.5, 5);
    const FredholmRun run = mc_solve_fredholm(lin, uniform_partition(400, 2), RandomStream(3));
    const CovarianceEstimate zero = estimate_covariance(lin, run);
    for (double v : zero.matrix) {
        CHECK(v == 0.0);
    }
    CHECK_FALSE(zero.repaired);

    // K = s on the two draws {0, 1}: 1/2 - 1/4.
    const FredholmProblem s = test::s_kernel(3);
    const PointSet draws(1, {0.0, 1.0});
    const CovarianceEstimate two = estimate_covariance(s, draws, std::vector<double>{0.0, 0.0});
    for (double v : two.matrix) {
        CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
    }
    CHECK_THROWS_AS(estimate_covariance(s, draws.view(0, 1), std::vector<double>{0.0}), ValidationError);
    CHECK_THROWS_AS(estimate_covariance(s, draws, std::vector<double>{0.0}), ValidationError);
}

TEST_CASE("estimate_covariance: fred-smooth at N = 1e5 is within 5/sqrt(N) of the limit" * doctest::test_suite("slow")) {
    const FredholmProblem p = manufactured_case("fred-smooth").fredholm().problem;
    const auto det = picard_solve(p, 3);
    const CovarianceEstimate limit = limit_covariance(p, det[2]);
    const FredholmRun run = mc_solve_fredholm(p, budget_consistent_partition(100000, 3), RandomStream(17));
    const CovarianceEstimate est = estimate_covariance(p, run);
    CHECK(max_entry_gap(est, limit) <= 5.0 / std::sqrt(1e5));
    CHECK(limit.source == CovarianceSource::limit);
    CHECK(est.source == CovarianceSource::empirical);
}

TEST_CASE("limit_covariance examples") {
    const FredholmProblem lin = manufactured_case("fred-lin-const").fredholm().problem;
    for (double v : limit_covariance(lin, picard_solve(lin, 1)[0]).matrix) {
        CHECK(v == 0.0);
    }
    // Gauss-Legendre weights integrate s and s^2 exactly; an equal-weight grid would not.
    FredholmProblem s = test::s_kernel();
    s.grid = test::unit_grid(4, QuadratureRule::gauss_legendre);
    for (double v : limit_covariance(s, forcing_on_grid(s)).matrix) {
        CHECK(v == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    }
    FredholmProblem g = test::linear_constant();
    g.kernel = [](Point t, Point, double z) { return t[0] * z; };
    for (double v : limit_covariance(g, FunctionOnGrid{std::vector<double>(g.grid.size(), 1.0)}).matrix) {
        CHECK(v == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("property: estimates are symmetric before repair and PSD after") {
    for (const std::string& id : registered_case_ids()) {
        const ManufacturedCase c = manufactured_case(id);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            CAPTURE(id);
            CAPTURE(seed);
            const CovarianceEstimate cov =
                c.is_fredholm()
                    ? estimate_covariance(c.fredholm().problem,
                                          mc_solve_fredholm(c.fredholm().problem, uniform_partition(600, 3),
                                                            RandomStream(seed)))
                    : estimate_covariance(c.volterra().problem,
                                          mc_solve_volterra(c.volterra().problem, uniform_partition(600, 3),
                                                            RandomStream(seed)));
            CHECK(cov.max_asymmetry <= 1e-10);
            for (std::size_t i = 0; i < cov.size; ++i) {
                for (std::size_t j = 0; j < cov.size; ++j) {
                    CHECK(cov(i, j) == cov(j, i));
                }
            }
            CHECK(smallest_eigenvalue(cov) >= -1e-10 * cov.trace());
        }
    }
}

TEST_CASE("repair_psd clips a clearly negative eigenvalue") {
    CovarianceEstimate c;
    c.size = 2;
    c.matrix = {1.0, 2.0, 2.0, 1.0};  // eigenvalues 3 and -1
    repair_psd(c);
    CHECK(c.repaired);
    CHECK(c.min_eigenvalue == doctest::Approx(-1.0));
    // Clipping leaves 3 * v v^T with v = (1, 1) / sqrt(2).
    for (double v : c.matrix) {
        CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
    }

    CovarianceEstimate tiny;
    tiny.size = 2;
    tiny.matrix = {1.0, 0.0, 0.0, -1e-13};
    repair_psd(tiny);
    CHECK_FALSE(tiny.repaired);
    CHECK(tiny.matrix[3] == -1e-13);
}

TEST_CASE("empirical_covariance shifts by the first row") {
    const std::vector<double> same{0.3, 0.7, 0.3, 0.7, 0.3, 0.7};
    for (double v : empirical_covariance(same, 3, 2).matrix) {
        CHECK(v == 0.0);
    }
    const std::vector<double> pm{1.0, -1.0};
    const CovarianceEstimate c = empirical_covariance(pm, 2, 1);
    CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(empirical_covariance(pm, 1, 2), ValidationError);
}

TEST_CASE("gaussian_sup_quantile examples") {
    const RandomStream stream(2718);
    CHECK(std::abs(gaussian_sup_quantile(diagonal({1.0}), 0.95, 100000, stream) - oracle::kAbsNormal95) <= 0.02);
    CHECK(std::abs(gaussian_sup_quantile(diagonal({4.0}), 0.95, 100000, stream) - 2.0 * oracle::kAbsNormal95) <=
          0.04);
    CHECK(std::abs(gaussian_sup_quantile(diagonal({1.0, 1.0}), 0.95, 100000, stream) - oracle::kSupTwoIid95) <=
          0.03);
    CHECK_THROWS_AS(gaussian_sup_quantile(diagonal({1.0}), 1.0, 10000, stream), ValidationError);
    CHECK_THROWS_AS(gaussian_sup_quantile(diagonal({1.0}), 0.0, 10000, stream), ValidationError);
    CHECK_THROWS_AS(gaussian_sup_quantile(diagonal({1.0}), 0.5, 999, stream), ValidationError);
    CHECK(gaussian_sup_quantile(diagonal({0.0, 0.0}), 0.9, 1000, stream) == 0.0);
}

TEST_CASE("property: quantiles are monotone in level and scale with the covariance") {
    const FredholmProblem p = manufactured_case("fred-smooth").fredholm().problem;
    const CovarianceEstimate base = limit_covariance(p, picard_solve(p, 2)[1]);
    const RandomStream stream(4);
    double previous = 0.0;
    for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
        const double u = gaussian_sup_quantile(base, level, 10000, stream);
        CHECK(u > previous);
        previous = u;
    }
    CovarianceEstimate scaled = base;
    for (double& v : scaled.matrix) {
        v *= 9.0;
    }
    const double u1 = gaussian_sup_quantile(base, 0.9, 20000, stream);
    const double u3 = gaussian_sup_quantile(scaled, 0.9, 20000, stream);
    // Same draws; near-degenerate eigenspaces may rotate under scaling, so agreement is close but not exact.
    CHECK(u3 == doctest::Approx(3.0 * u1).epsilon(1e-6));
}

TEST_CASE("empirical_quantile interpolates order statistics") {
    const std::vector<double> v{1.0, 2.0, 4.0, 8.0};
    CHECK(empirical_quantile(v, 0.0) == 1.0);
    CHECK(empirical_quantile(v, 1.0) == 8.0);
    CHECK(empirical_quantile(v, 0.5) == 3.0);
    CHECK_THROWS_AS(empirical_quantile(std::vector<double>{}, 0.5), ValidationError);
    CHECK_THROWS_AS(empirical_quantile(v, 1.5), ValidationError);
}

TEST_CASE("confidence_band arithmetic") {
    const RandomStream stream(6);
    const std::vector<double> center{1.0, 2.0};
    const ConfidenceBand flat = confidence_band(center, diagonal({0.0, 0.0}), 100, 0.9, stream);
    CHECK(flat.halfwidth == 0.0);
    CHECK(flat.covers(center));
    CHECK_FALSE(flat.covers(std::vector<double>{1.0, 2.0 + 1e-9}));
    CHECK(flat.covers(std::vector<double>{1.0, 2.0 + 1e-13}, kCoverageSlack));

    const ConfidenceBand b = confidence_band(center, diagonal({1.0, 1.0}), 10000, 0.9, stream);
    CHECK(b.halfwidth == b.quantile / 100.0);
    const ConfidenceBand b4 = confidence_band(center, diagonal({1.0, 1.0}), 40000, 0.9, stream);
    CHECK(b4.halfwidth == b.halfwidth / 2.0);
    CHECK(b.q_m == 10000);
    CHECK(b.level == 0.9);
    CHECK_THROWS_AS(confidence_band(center, diagonal({1.0}), 100, 0.9, stream), ValidationError);
    CHECK_THROWS_AS(confidence_band(center, diagonal({1.0, 1.0}), 0, 0.9, stream), ValidationError);
}

TEST_CASE("tail_log_asymptote") {
    CHECK(tail_log_asymptote(2.0, diagonal({1.0, 0.5})) == -2.0);
    CHECK(tail_log_asymptote(3.0, diagonal({0.25})) == -18.0);
    CHECK_THROWS_AS(tail_log_asymptote(1.0, diagonal({0.0, 0.0})), ValidationError);
    CHECK_THROWS_AS(tail_log_asymptote(0.0, diagonal({1.0})), ValidationError);
}

TEST_CASE("entropy_diagnostic examples") {
    // K independent of t: one ball covers everything.
    const FredholmProblem s = test::s_kernel(9);
    const EntropyDiagnostic flat = entropy_diagnostic(s, forcing_on_grid(s), 2.0);
    for (double d : flat.distances) {
        CHECK(d == 0.0);
    }
    for (const auto& [eps, count] : flat.covering_counts) {
        CHECK(count == 1);
    }
    REQUIRE(flat.integral_estimate.has_value());
    CHECK(*flat.integral_estimate == doctest::Approx(1.0).epsilon(1e-15));

    // K = t: d_p(t1, t2) = |t1 - t2|, counts grow like 1/eps.
    FredholmProblem lip = test::s_kernel(257);
    lip.kernel = [](Point t, Point, double) { return t[0]; };
    const EntropyDiagnostic e = entropy_diagnostic(lip, forcing_on_grid(lip), 2.0);
    CHECK(e.growth_exponent == doctest::Approx(1.0).epsilon(0.1));
    CHECK_FALSE(e.divergence_suspected);
    REQUIRE(e.integral_estimate.has_value());
    CHECK(std::isfinite(*e.integral_estimate));
    CHECK_FALSE(e.insufficient_resolution);
    std::size_t previous = e.size + 1;
    for (const auto& [eps, count] : e.covering_counts) {
        CHECK(count <= previous);  // map is ascending in eps
        previous = count;
    }
    for (std::size_t i = 0; i < e.size; ++i) {
        CHECK(e.distances[i * e.size + i] == 0.0);
        for (std::size_t j = 0; j < e.size; ++j) {
            CHECK(e.distances[i * e.size + j] == e.distances[j * e.size + i]);
        }
    }

    FredholmProblem two = test::s_kernel(2);
    two.kernel = [](Point t, Point, double) { return t[0]; };
    const EntropyDiagnostic small = entropy_diagnostic(two, forcing_on_grid(two), 2.0);
    CHECK(small.insufficient_resolution);
    for (const auto& [eps, count] : small.covering_counts) {
        CHECK((count == 1 || count == 2));
    }
    CHECK_FALSE(small.caveat.empty());
    CHECK_THROWS_AS(entropy_diagnostic(two, forcing_on_grid(two), 1.5), ValidationError);
}

TEST_CASE("distance_ball_bound dominates the semi-distances on fred-smooth") {
    const FredholmProblem p = manufactured_case("fred-smooth").fredholm().problem;
    const auto det = picard_solve(p, 3);
    const EntropyDiagnostic e = entropy_diagnostic(p, det[2], 2.0);
    const double bound = distance_ball_bound(p, 2.0);
    for (double d : e.distances) {
        CHECK(d <= bound + 1e-12);
    }
}

TEST_CASE("log_log_slope") {
    const std::vector<double> x{1.0, 10.0, 100.0, 1000.0};
    const std::vector<double> y{1.0, 1.0 / std::sqrt(10.0), 0.1, 1.0 / std::sqrt(1000.0)};
    REQUIRE(log_log_slope(x, y).has_value());
    CHECK(*log_log_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK_FALSE(log_log_slope(x, std::vector<double>{1.0, 0.0, 1.0, 1.0}).has_value());
}

TEST_CASE("rate_study: preconditions and the zero-variance case") {
    FredholmProblem zero = test::linear_constant();
    zero.kernel = [](Point, Point, double) { return 0.0; };
    const std::int64_t budgets[] = {100, 400, 1600, 6400};
    const RateStudyResult r = rate_study(zero, 3, budgets, 20, RandomStream(1));
    for (const RateRow& row : r.rows) {
        CHECK(row.median_error == 0.0);
    }
    CHECK_FALSE(r.slope.has_value());
    CHECK_FALSE(r.note.empty());

    const std::int64_t three[] = {100, 400, 1600};
    CHECK_THROWS_AS(rate_study(zero, 3, three, 20, RandomStream(1)), ValidationError);
    CHECK_THROWS_AS(rate_study(zero, 3, budgets, 19, RandomStream(1)), ValidationError);
    const std::int64_t unsorted[] = {100, 400, 300, 6400};
    CHECK_THROWS_AS(rate_study(zero, 3, unsorted, 20, RandomStream(1)), ValidationError);
}

TEST_CASE("rate_study: volt-exp converges at rate one half" * doctest::test_suite("slow")) {
    const VolterraProblem p = manufactured_case("volt-exp").volterra().problem;
    const std::int64_t budgets[] = {1000, 4000, 16000, 64000};
    const RateStudyResult r = rate_study(p, 3, budgets, 30, RandomStream(1));
    REQUIRE(r.slope.has_value());
    CHECK(*r.slope >= -0.6);
    CHECK(*r.slope <= -0.4);
}

TEST_CASE("coverage_study: degenerate and half-level bands" * doctest::test_suite("slow")) {
    const FredholmCase lin = manufactured_case("fred-lin-const").fredholm();
    const CoverageResult degenerate =
        coverage_study(lin.problem, 3, 300, 0.9, 100, RandomStream(1), {}, lin.reference);
    CHECK(degenerate.coverage == 1.0);
    CHECK(degenerate.mean_halfwidth == 0.0);
    REQUIRE(degenerate.reference_coverage.has_value());
    CHECK(*degenerate.reference_coverage == 1.0);

    const FredholmProblem smooth = manufactured_case("fred-smooth").fredholm().problem;
    const CoverageResult half = coverage_study(smooth, 3, 3000, 0.5, 500, RandomStream(5));
    CHECK(half.coverage >= 0.43);
    CHECK(half.coverage <= 0.57);

    CHECK_THROWS_AS(coverage_study(smooth, 3, 3000, 0.5, 99, RandomStream(5)), ValidationError);
    CHECK_THROWS_AS(coverage_study(smooth, 3, 3000, 1.5, 100, RandomStream(5)), ValidationError);
}
