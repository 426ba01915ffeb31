#pragma once

#include <stdexcept>
#include <string>

namespace scrap {

// Base class for all library errors that are not plain API misuse
// (misuse throws std::invalid_argument).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter combination outside the model's domain of validity.
struct DomainError : Error {
    using Error::Error;
};

// Integration failed its own accuracy contract (norm drift, etc).
struct NonConvergent : Error {
    using Error::Error;
};

// Eigenstate continuity tracking could not decide an assignment.
struct AmbiguousTracking : Error {
    using Error::Error;
};

// A pass would populate a basis state with photon number >= 2.
struct ExcitationOverflow : Error {
    using Error::Error;
};

// Scenario configuration is malformed or violates an invariant.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace scrap
