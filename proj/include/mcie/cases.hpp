#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mcie/problem.hpp"

namespace mcie {

struct FredholmCase {
    FredholmProblem problem;
    std::function<double(Point)> reference;
};

struct VolterraCase {
    VolterraProblem problem;
    std::function<double(double, Point)> reference;
};

struct ManufacturedCase {
    std::string id;
    std::string description;
    std::variant<FredholmCase, VolterraCase> data;

    bool is_fredholm() const noexcept { return std::holds_alternative<FredholmCase>(data); }
    const FredholmCase& fredholm() const { return std::get<FredholmCase>(data); }
    const VolterraCase& volterra() const { return std::get<VolterraCase>(data); }
};

struct CaseOptions {
    std::size_t grid_points = 0;  ///< per axis; 0 keeps the case default
    std::size_t tau_points = 0;   ///< 0 keeps 65
};

/// Registered ids in registry order.
std::vector<std::string> registered_case_ids();

/// Builds and validates a case; throws ValidationError for an unknown id.
ManufacturedCase manufactured_case(std::string_view id, const CaseOptions& options = {});

/// sup over the 4x refined check set of |reference - f - integral(reference)|,
/// integrals by high-resolution quadrature.
double reference_residual(const ManufacturedCase& c);

}  // namespace mcie
