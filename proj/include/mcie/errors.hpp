#pragma once

#include <stdexcept>
#include <string>

namespace mcie {

/// Bad arguments or a violated precondition. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A user-supplied function produced a non-finite value, or a numerical
/// routine could not proceed. The CLI maps this to exit code 2.
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_validation(const std::string& what) { throw ValidationError(what); }

inline void require(bool condition, const std::string& what) {
    if (!condition) {
        throw ValidationError(what);
    }
}

}  // namespace detail
}  // namespace mcie
