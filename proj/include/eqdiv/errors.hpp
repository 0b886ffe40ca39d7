#pragma once

#include <stdexcept>
#include <string>

namespace eqdiv {

/// Invalid model parameters or arguments outside an operation's domain.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(const std::string& what) : std::invalid_argument(what) {}
};

/// The ruin constraint cannot be met from the given initial state.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical routine failed in a way that indicates a bug (e.g. a bracket
/// that theory guarantees could not be found). Never thrown for bad input.
class internal_error : public std::runtime_error {
public:
    explicit internal_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace eqdiv
