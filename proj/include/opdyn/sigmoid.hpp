#pragma once

#include <string>

#include "opdyn/common.hpp"

namespace opdyn {

enum class SigmoidFamily { Tanh, Algebraic };

// Odd saturating nonlinearity in the sector (0,1] together with its first three derivatives.
// Algebraic is z / sqrt(1 + z^2).
class Sigmoid {
 public:
  Sigmoid() = default;
  explicit Sigmoid(SigmoidFamily family) : family_(family) {}
  static Sigmoid from_name(const std::string& name);

  SigmoidFamily family() const { return family_; }
  std::string name() const;

  double operator()(double z) const;
  double d1(double z) const;
  double d2(double z) const;
  double d3(double z) const;

  Vec apply(const Vec& x) const;
  Vec apply_d1(const Vec& x) const;

 private:
  SigmoidFamily family_ = SigmoidFamily::Tanh;
};

}  // namespace opdyn
