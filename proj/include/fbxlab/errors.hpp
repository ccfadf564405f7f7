#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fbx {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct GridMismatch : Error {
  using Error::Error;
};

struct StencilError : Error {
  using Error::Error;
};

struct SingularTransform : Error {
  using Error::Error;
};

struct ResolutionError : Error {
  using Error::Error;
};

// Certification of a barrier inequality failed; carries the violating sample.
struct BarrierFailure : Error {
  BarrierFailure(const std::string& what, std::vector<double> sample, double value)
      : Error(what), sample(std::move(sample)), value(value) {}
  std::vector<double> sample;
  double value;
};

struct NonConvergence : Error {
  NonConvergence(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

}  // namespace fbx
