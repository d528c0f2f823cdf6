#include "opdyn/sigmoid.hpp"

#include <cmath>

namespace opdyn {

Sigmoid Sigmoid::from_name(const std::string& name) {
  if (name == "tanh") return Sigmoid(SigmoidFamily::Tanh);
  if (name == "algebraic") return Sigmoid(SigmoidFamily::Algebraic);
  throw InvalidInput("unknown sigmoid '" + name + "' (valid: tanh, algebraic)");
}

std::string Sigmoid::name() const { return family_ == SigmoidFamily::Tanh ? "tanh" : "algebraic"; }

double Sigmoid::operator()(double z) const {
  if (family_ == SigmoidFamily::Tanh) return std::tanh(z);
  return z / std::sqrt(1.0 + z * z);
}

double Sigmoid::d1(double z) const {
  if (family_ == SigmoidFamily::Tanh) {
    double t = std::tanh(z);
    return 1.0 - t * t;
  }
  double r = 1.0 / std::sqrt(1.0 + z * z);
  return r * r * r;
}

double Sigmoid::d2(double z) const {
  if (family_ == SigmoidFamily::Tanh) {
    double t = std::tanh(z);
    return -2.0 * t * (1.0 - t * t);
  }
  double q = 1.0 + z * z;
  return -3.0 * z / (q * q * std::sqrt(q));
}

double Sigmoid::d3(double z) const {
  if (family_ == SigmoidFamily::Tanh) {
    double t = std::tanh(z);
    double s = 1.0 - t * t;
    return -2.0 * s * (1.0 - 3.0 * t * t);
  }
  double q = 1.0 + z * z;
  return (12.0 * z * z - 3.0) / (q * q * q * std::sqrt(q));
}

Vec Sigmoid::apply(const Vec& x) const {
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = (*this)(x(i));
  return out;
}

Vec Sigmoid::apply_d1(const Vec& x) const {
  Vec out(x.size());
  for (Index i = 0; i < x.size(); ++i) out(i) = d1(x(i));
  return out;
}

}  // namespace opdyn
