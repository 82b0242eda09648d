#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddlab {

// Bad arguments or malformed inputs (empty paths, alpha out of range, ...).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The drift vector is not in the range of the covariance matrix: condition
// for the growth-optimal portfolio fails and the model admits arbitrage of
// the first kind.
class no_numeraire_error : public std::runtime_error {
public:
    explicit no_numeraire_error(const std::string& what, std::size_t step = npos)
        : std::runtime_error(what), step_(step) {}
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

// A path violates its drawdown floor beyond tolerance.
class constraint_violation_error : public std::runtime_error {
public:
    constraint_violation_error(const std::string& what, std::size_t first_index)
        : std::runtime_error(what), first_index_(first_index) {}
    std::size_t first_index() const noexcept { return first_index_; }

private:
    std::size_t first_index_;
};

// Non-finite coefficients or state encountered while simulating.
class simulation_error : public std::runtime_error {
public:
    simulation_error(const std::string& what, std::size_t path, std::size_t step)
        : std::runtime_error(what), path_(path), step_(step) {}
    std::size_t path() const noexcept { return path_; }
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t path_;
    std::size_t step_;
};

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ddlab
