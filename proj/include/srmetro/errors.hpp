#pragma once

#include <stdexcept>
#include <string>

namespace srmetro {

// Bad arguments or configuration. The CLI maps these to exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation called on an object lacking required data (e.g. drift without velocities).
class InvalidState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class OracleScaleExceeded : public InvalidInput {
 public:
  explicit OracleScaleExceeded(const std::string& what)
      : InvalidInput("oracle scale exceeded: " + what) {}
};

// Pulse-area noise so large that the linearized visibility 1 - N dS^2/2 is not positive.
class DegenerateVisibility : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Fewer points or a shorter span than the cosine fit can resolve.
class FitDegeneracy : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFringe : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace srmetro
