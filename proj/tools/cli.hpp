#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mcie/errors.hpp"
#include "mcie/partition.hpp"

namespace mcie::cli {

/// Effective settings of one invocation: config file values overridden by flags.
struct RunConfig {
    std::string case_id;
    std::vector<std::int64_t> N{10000};
    int m = 3;
    ScheduleKind schedule = ScheduleKind::uniform;
    std::uint64_t seed = 0;
    double level = 0.95;
    int replications = 1;
    std::size_t grid_points = 0;  ///< 0 keeps the case default
    std::size_t tau_points = 0;   ///< 0 keeps the case default
    std::string out;              ///< output prefix; empty writes to stdout
};

/// A config file field failed validation; the message names the field.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Parses a JSON config document. "case" is required; other fields default.
RunConfig parse_config_text(std::string_view json_text);

/// Reads and parses a JSON config file.
RunConfig parse_config(const std::string& path);

/// Entry point behind the `mcie` binary. args[0] is the program name.
/// Returns 0 on success, 1 on a validation error, 2 on a runtime failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mcie::cli
