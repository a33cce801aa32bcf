#pragma once

#include <stdexcept>
#include <string>

namespace pbf {

// Bad arguments or violated preconditions (CLI exit code 1).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data that cannot be turned into a valid sample (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical routine failed, e.g. eigensolver non-convergence (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pbf
