#include "mcie/cases.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "mcie/deterministic.hpp"
#include "mcie/errors.hpp"
#include "mcie/interpolation.hpp"
#include "mcie/summation.hpp"
#include "fast_kernels.hpp"

namespace mcie {
namespace {

constexpr double kPi = std::numbers::pi;

ManufacturedCase fred_lin_const(const CaseOptions& options) {
    const std::size_t n = options.grid_points ? options.grid_points : 17;
    FredholmProblem p{
        .forcing = [](Point) { return 1.0; },
        .kernel = [](Point, Point, double z) { return 0.5 * z; },
        .rho = 0.5,
        .measure = MeasureSpec::uniform(1),
        .grid = build_grid({.dim = 1, .points_per_axis = n}),
    };
    return {"fred-lin-const", "f = 1, K = z/2 on [0,1]; solution x = 2",
            FredholmCase{std::move(p), [](Point) { return 2.0; }}};
}

double smooth_solution(double t) { return std::cos(0.5 * kPi * t) + t; }

ManufacturedCase fred_smooth(const CaseOptions& options) {
    const std::size_t n = options.grid_points ? options.grid_points : 16;
    // f = x* - int_0^1 0.4 cos(ts) sin(x*(s)) ds, integral by 96-node Gauss-Legendre.
    auto nodes = std::make_shared<std::vector<double>>();
    auto coef = std::make_shared<std::vector<double>>();
    gauss_legendre_unit(96, *nodes, *coef);
    for (std::size_t l = 0; l < nodes->size(); ++l) {
        (*coef)[l] *= 0.4 * std::sin(smooth_solution((*nodes)[l]));
    }
    auto forcing = [nodes, coef](Point t) {
        std::array<double, 96> terms{};
        detail::cos_product_rows(t.data(), 1, nodes->data(), coef->data(), nodes->size(), terms.data());
        CompensatedSum integral;
        for (double v : terms) {
            integral.add(v);
        }
        return smooth_solution(t[0]) - integral.value();
    };
    auto pointwise = [](Point t, Point s, double z) { return 0.4 * std::cos(t[0] * s[0]) * std::sin(z); };
    // One-dimensional points are contiguous, so the coordinates can be passed as arrays.
    auto tile = [](PointSpan t, PointSpan s, std::span<const double> z, std::span<double> out) {
        const std::size_t cols = s.size();
        std::vector<double> sin_z(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            sin_z[c] = 0.4 * std::sin(z[c]);
        }
        const double* t0 = t.empty() ? nullptr : t[0].data();
        const double* s0 = s.empty() ? nullptr : s[0].data();
        detail::cos_product_rows(t0, t.size(), s0, sin_z.data(), cols, out.data());
    };
    FredholmProblem p{
        .forcing = forcing,
        .kernel = FredholmKernel(pointwise, tile),
        .rho = 0.4,
        .measure = MeasureSpec::uniform(1),
        .grid = build_grid({.dim = 1, .points_per_axis = n, .rule = QuadratureRule::gauss_legendre}),
    };
    return {"fred-smooth", "K = 0.4 cos(ts) sin(z) on [0,1]; solution cos(pi t/2) + t",
            FredholmCase{std::move(p), [](Point t) { return smooth_solution(t[0]); }}};
}

ManufacturedCase volt_exp(const CaseOptions& options) {
    const std::size_t taus = options.tau_points ? options.tau_points : 65;
    PointSet atoms(1, {0.0, 1.0});
    VolterraProblem p{
        .forcing = [](double, Point) { return 1.0; },
        .kernel = [](double, Point, double, Point, double z) { return z; },
        .lip = 1.0,
        .measure = MeasureSpec::discrete(atoms, {0.5, 0.5}),
        .grid = MetricSpaceGrid(atoms, {0.5, 0.5}, make_distance(DistanceKind::euclidean)),
        .tau_grid = equispaced_tau_grid(taus),
    };
    return {"volt-exp", "K = z, f = 1 on two atoms; solution exp(tau)",
            VolterraCase{std::move(p), [](double tau, Point) { return std::exp(tau); }}};
}

double volt_smooth_forcing(double tau, Point y) { return std::cos(y[0]) + 0.5 * tau * y[0]; }

double volt_smooth_kernel(double tau, Point y, double nu, Point v, double z) {
    return 0.5 * std::cos(0.5 * kPi * (y[0] - v[0])) * std::sin(z) * std::exp(-(tau - nu));
}

/// Converged high-resolution solution, extended to arbitrary (tau, y). Built on first use.
class VoltSmoothOracle {
public:
    double operator()(double tau, Point y) {
        std::call_once(once_, [this] { build(); });
        return volterra_extend(*problem_, solution_, tau, y);
    }

private:
    void build() {
        problem_ = std::make_unique<VolterraProblem>(VolterraProblem{
            .forcing = volt_smooth_forcing,
            .kernel = volt_smooth_kernel,
            .lip = 0.5,
            .measure = MeasureSpec::uniform(1),
            .grid = build_grid({.dim = 1, .points_per_axis = 24, .rule = QuadratureRule::gauss_legendre}),
            .tau_grid = equispaced_tau_grid(129),
            .tau_interpolation_order = 7,
            .nu_nodes = 32,
        });
        solution_ = forcing_on_grid(*problem_);
        for (int n = 0; n < 60; ++n) {
            FunctionOnProductGrid next = volterra_step(*problem_, solution_);
            const double change = sup_distance(next, solution_);
            solution_ = std::move(next);
            if (change < 1e-15) {
                break;
            }
        }
    }

    std::once_flag once_;
    std::unique_ptr<VolterraProblem> problem_;
    FunctionOnProductGrid solution_;
};

ManufacturedCase volt_smooth(const CaseOptions& options) {
    const std::size_t n = options.grid_points ? options.grid_points : 8;
    const std::size_t taus = options.tau_points ? options.tau_points : 65;
    VolterraProblem p{
        .forcing = volt_smooth_forcing,
        .kernel = volt_smooth_kernel,
        .lip = 0.5,
        .measure = MeasureSpec::uniform(1),
        .grid = build_grid({.dim = 1, .points_per_axis = n, .rule = QuadratureRule::gauss_legendre}),
        .tau_grid = equispaced_tau_grid(taus),
    };
    auto oracle = std::make_shared<VoltSmoothOracle>();
    return {"volt-smooth", "K = 0.5 cos(pi(y-v)/2) sin(z) exp(nu - tau) on [0,1]; high-resolution reference",
            VolterraCase{std::move(p), [oracle](double tau, Point y) { return (*oracle)(tau, y); }}};
}

using Builder = ManufacturedCase (*)(const CaseOptions&);

struct Entry {
    const char* id;
    Builder build;
};

constexpr Entry kRegistry[] = {
    {"fred-lin-const", fred_lin_const},
    {"fred-smooth", fred_smooth},
    {"volt-exp", volt_exp},
    {"volt-smooth", volt_smooth},
};

double fredholm_residual(const FredholmCase& c) {
    const FredholmProblem& p = c.problem;
    GridSpec check_spec{.dim = p.grid.dim(), .points_per_axis = 4 * static_cast<std::size_t>(std::lround(
                                                                       std::pow(p.grid.size(), 1.0 / p.grid.dim())))};
    const MetricSpaceGrid check = build_grid(check_spec);
    const MetricSpaceGrid quad = measure_grid(p.measure, 128);
    std::vector<double> ref(quad.size());
    for (std::size_t l = 0; l < quad.size(); ++l) {
        ref[l] = c.reference(quad.point(l));
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < check.size(); ++j) {
        const Point t = check.point(j);
        double integral = 0.0;
        for (std::size_t l = 0; l < quad.size(); ++l) {
            integral += quad.weights()[l] * p.kernel(t, quad.point(l), ref[l]);
        }
        worst = std::max(worst, std::abs(c.reference(t) - p.forcing(t) - integral));
    }
    return worst;
}

double volterra_residual(const VolterraCase& c) {
    const VolterraProblem& p = c.problem;
    // y: 4x refined grid for continuous T, the atoms for a discrete one.
    const bool discrete = p.measure.is_discrete();
    const MetricSpaceGrid check =
        discrete ? p.grid : build_grid({.dim = 1, .points_per_axis = 4 * p.grid.size(), .rule = QuadratureRule::equal_weight});
    const MetricSpaceGrid quad = discrete ? measure_grid(p.measure, 0) : measure_grid(p.measure, 40);
    std::vector<double> nu_nodes;
    std::vector<double> nu_weights;
    gauss_legendre_unit(40, nu_nodes, nu_weights);

    double worst = 0.0;
    constexpr int kTauChecks = 17;
    for (int a = 0; a < kTauChecks; ++a) {
        const double tau = static_cast<double>(a) / (kTauChecks - 1);
        std::vector<double> ref(nu_nodes.size() * quad.size());
        for (std::size_t b = 0; b < nu_nodes.size(); ++b) {
            for (std::size_t l = 0; l < quad.size(); ++l) {
                ref[b * quad.size() + l] = c.reference(tau * nu_nodes[b], quad.point(l));
            }
        }
        for (std::size_t j = 0; j < check.size(); ++j) {
            const Point y = check.point(j);
            double integral = 0.0;
            for (std::size_t b = 0; b < nu_nodes.size(); ++b) {
                for (std::size_t l = 0; l < quad.size(); ++l) {
                    integral += nu_weights[b] * quad.weights()[l] *
                                p.kernel(tau, y, tau * nu_nodes[b], quad.point(l), ref[b * quad.size() + l]);
                }
            }
            worst = std::max(worst, std::abs(c.reference(tau, y) - p.forcing(tau, y) - tau * integral));
        }
    }
    return worst;
}

}  // namespace

std::vector<std::string> registered_case_ids() {
    std::vector<std::string> ids;
    for (const auto& e : kRegistry) {
        ids.emplace_back(e.id);
    }
    return ids;
}

ManufacturedCase manufactured_case(std::string_view id, const CaseOptions& options) {
    for (const auto& e : kRegistry) {
        if (id == e.id) {
            ManufacturedCase c = e.build(options);
            if (c.is_fredholm()) {
                validate(c.fredholm().problem);
            } else {
                validate(c.volterra().problem);
            }
            return c;
        }
    }
    detail::fail_validation("unknown case id '" + std::string(id) + "'");
}

double reference_residual(const ManufacturedCase& c) {
    return c.is_fredholm() ? fredholm_residual(c.fredholm()) : volterra_residual(c.volterra());
}

}  // namespace mcie
