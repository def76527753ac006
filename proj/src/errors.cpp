#include "fracdyn/errors.hpp"

namespace fracdyn {

AccuracyLossError::AccuracyLossError(const std::string& what, double achieved_bound)
    : std::runtime_error(what + " (achieved bound " + std::to_string(achieved_bound) + ")"),
      achieved_bound_(achieved_bound) {}

DivergenceError::DivergenceError(const std::string& what, double t, std::size_t step)
    : std::runtime_error(what + " at t=" + std::to_string(t) + " (step " + std::to_string(step) + ")"),
      t_(t),
      step_(step) {}

}  // namespace fracdyn
