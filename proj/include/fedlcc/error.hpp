#pragma once

#include <stdexcept>
#include <string>

namespace fedlcc {

// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad configuration: invalid primes, duplicate nodes, mismatched fields,
// out-of-range backend parameters, empty clients. CLI exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

// Parameters that violate a feasibility condition: m < 2l+2t-1, quantization
// range overflow. CLI exit code 3.
struct InfeasibleError : Error {
    using Error::Error;
};

// Malformed or incomplete input data: CSV parse failures, missing pairs,
// truncated transcripts. CLI exit code 4.
struct DataError : Error {
    using Error::Error;
};

}  // namespace fedlcc
