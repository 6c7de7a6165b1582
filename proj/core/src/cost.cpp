#include "fraglab/cost.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fraglab/error.hpp"

namespace fraglab {

CostModel CostModel::power(double gamma, double p) {
  CostModel c(Family::Power, gamma, p, 1.0);
  c.validate();
  return c;
}

CostModel CostModel::inada_rational(double gamma, double xbar) {
  if (!(xbar >= 0.0 && xbar < 1.0)) throw InvalidArgument("xbar", "must lie in [0, 1)");
  CostModel c(Family::InadaRational, gamma, 2.0, 1.0 - xbar);
  c.validate();
  return c;
}

double CostModel::operator()(double y) const {
  if (y <= 0.0) return 0.0;
  switch (family_) {
    case Family::Power:
      return gamma_ * std::pow(y, p_);
    case Family::InadaRational:
      if (y >= horizon_) return std::numeric_limits<double>::infinity();
      return gamma_ * y * y / (1.0 - y / horizon_);
  }
  return 0.0;
}

double CostModel::derivative(double y) const {
  if (y <= 0.0) y = 0.0;
  switch (family_) {
    case Family::Power:
      return y == 0.0 && p_ > 1.0 ? 0.0 : gamma_ * p_ * std::pow(y, p_ - 1.0);
    case Family::InadaRational: {
      if (y >= horizon_) return std::numeric_limits<double>::infinity();
      const double d = 1.0 - y / horizon_;
      return gamma_ * (2.0 * y - y * y / horizon_) / (d * d);
    }
  }
  return 0.0;
}

CostModel CostModel::scaled(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda", "must be positive");
  return CostModel(family_, gamma_ * lambda, p_, horizon_);
}

void CostModel::validate() const {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) throw InvalidArgument("cost.gamma", "must be positive and finite");
  if (family_ == Family::Power && !(p_ >= 2.0)) throw InvalidArgument("cost.p", "power cost requires p >= 2");
  if ((*this)(0.0) != 0.0) throw InvalidArgument("cost", "c(0) must be 0");
  constexpr int kGrid = 200;
  double prev_c = 0.0, prev_d = derivative(0.0);
  for (int k = 1; k < kGrid; ++k) {
    const double y = horizon_ * k / kGrid;
    const double c = (*this)(y), d = derivative(y);
    if (!(c > prev_c)) throw InvalidArgument("cost", "c must be strictly increasing");
    if (d < prev_d) throw InvalidArgument("cost", "c' must be nondecreasing");
    prev_c = c;
    prev_d = d;
  }
}

std::string CostModel::describe() const {
  std::ostringstream os;
  if (family_ == Family::Power)
    os << "power(gamma=" << gamma_ << ", p=" << p_ << ")";
  else
    os << "inada_rational(gamma=" << gamma_ << ", horizon=" << horizon_ << ")";
  return os.str();
}

}  // namespace fraglab
