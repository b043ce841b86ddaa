#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pshenv {

/// Precondition failure on caller-supplied data (bad counts, mismatched grids,
/// non-admissible inputs).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure gave up. Carries the residual history so callers can
/// report how far it got.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, std::vector<double> history = {})
        : std::runtime_error(what), history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

}  // namespace pshenv
