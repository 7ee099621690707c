#pragma once

#include <stdexcept>
#include <string>

namespace qaixi {

// Experiment configuration problems (missing truth model, bad class dir, ...).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Work that would exceed a hard resource bound (planning tree size,
// colouring search width). The CLI maps this to exit code 3.
class CapacityError : public std::runtime_error {
public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when every hypothesis in a mixture assigns (numerically) zero
// probability to an observed outcome. This means the model class cannot
// explain the data; silently renormalising would hide the misspecification.
class ImpossibleObservationError : public std::runtime_error {
public:
  explicit ImpossibleObservationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace qaixi
