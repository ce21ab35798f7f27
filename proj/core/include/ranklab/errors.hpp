#pragma once

#include <stdexcept>
#include <string>

namespace ranklab {

/// Bad user-supplied parameter (counts, rates, widths, ...).
struct invalid_parameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A coefficient or mean-field profile violates its invariants.
struct invalid_profile : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Requested a stationary object for a system that has none.
struct no_stationary_law : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Diffusion coefficients outside the equal / skew-symmetric families:
/// the stationary gap law exists but is not explicit.
struct unsupported_variance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite state or noise encountered while time-stepping.
struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A grid update broke monotonicity; almost always a CFL misconfiguration.
struct scheme_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Spatial domain cannot hold the requested law or solution.
struct domain_too_small : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The flux does not admit a travelling wave (entropy condition fails).
struct undefined_wave : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A tail integral diverges (infinite mean or normalizer).
struct non_integrable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Critical-phase request that the implemented theory refuses to decide.
struct needs_detailed_analysis : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Grids with incompatible domains and resampling disabled.
struct incompatible_grids : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Configuration parse/validation failure; carries the offending key path.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& key_path, const std::string& what)
        : std::runtime_error(key_path + ": " + what), key(key_path) {}
    std::string key;
};

}  // namespace ranklab
