#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpdtv {

/// File could not be opened, read, or written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// File exists but its contents violate the expected format.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// The solver encountered a non-finite objective value.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::size_t iteration)
        : std::runtime_error(what + " (outer iteration " + std::to_string(iteration) + ")"),
          iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

} // namespace cpdtv
