#pragma once

#include <stdexcept>

namespace mistd {

// File and stream problems; the CLI maps these to exit code 2,
// std::invalid_argument (validation) to exit code 1.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mistd
