#pragma once

#include <stdexcept>
#include <string>

namespace growtree {

// Edge list does not describe a tree built by successive leaf additions.
struct NonTreeInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Vertex id outside [0, n).
struct UnknownVertex : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Argument outside the mathematical domain of the operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A diffusion tree vertex exceeds the host degree d.
struct DegreeOverflow : std::domain_error {
    using std::domain_error::domain_error;
};

// Requested object exceeds a configured size cap.
struct OverflowError : std::length_error {
    using std::length_error::length_error;
};

struct TooFewSamples : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsupportedModel : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed experiment configuration or input file.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace growtree
