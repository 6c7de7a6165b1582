#pragma once

#include <string>

namespace fraglab {

// Investment cost c(y) with y = x - xbar the strength bought above baseline.
//   Power:          c(y) = gamma * y^p
//   InadaRational:  c(y) = gamma * y^2 / (1 - y / (1 - xbar))
class CostModel {
 public:
  enum class Family { Power, InadaRational };

  static CostModel power(double gamma, double p = 2.0);
  static CostModel inada_rational(double gamma, double xbar = 0.0);

  Family family() const { return family_; }
  double gamma() const { return gamma_; }
  double exponent() const { return p_; }
  double horizon() const { return horizon_; }

  double operator()(double y) const;
  double derivative(double y) const;

  // True when c'(y) diverges as y approaches 1 - xbar.
  bool satisfies_inada() const { return family_ == Family::InadaRational; }

  CostModel scaled(double lambda) const;

  // Throws InvalidArgument when c(0) != 0, c is not increasing, or c' is
  // not nondecreasing on a grid of [0, horizon).
  void validate() const;

  std::string describe() const;

 private:
  CostModel(Family f, double gamma, double p, double horizon)
      : family_(f), gamma_(gamma), p_(p), horizon_(horizon) {}
  Family family_;
  double gamma_;
  double p_;
  double horizon_;  // 1 - xbar for the rational family
};

}  // namespace fraglab
