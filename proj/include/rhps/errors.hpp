#pragma once

#include <stdexcept>
#include <string>

namespace rhps {

// Invalid parameters, empty bases, malformed config files.
struct ConfigurationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// 1 - R_L R_R exp(2ikd) vanished: an undamped closed cavity.
struct SingularResonanceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Observation point inside an interior passive layer.
struct UnsupportedObservationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested far-field projection of an evanescent channel.
struct NoFarFieldError : std::domain_error {
    using std::domain_error::domain_error;
};

struct UndefinedPerformanceError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace rhps
