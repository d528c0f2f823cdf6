#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace opdyn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Bad input or violated precondition. Surfaces as exit code 2.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Solver breakdown: Newton divergence, step underflow, non-finite state. Exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output directory or file could not be written.
class IoFailure : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

}  // namespace opdyn
