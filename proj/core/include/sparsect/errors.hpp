#pragma once

#include <stdexcept>
#include <string>

namespace sparsect {

/// Base class for all toolkit errors. The CLI maps the three concrete
/// categories below to process exit codes 1 (validation), 2 (numerical)
/// and 3 (io).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sparsect
