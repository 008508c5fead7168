#include "slln_lab/weight.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "slln_lab/errors.hpp"

namespace slln {

WeightFunction WeightFunction::power(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("tau must be positive");
  WeightFunction w;
  w.kind_ = Kind::power;
  w.tau_ = tau;
  return w;
}

WeightFunction WeightFunction::table(std::vector<double> values) {
  if (values.size() < 2) throw ParameterError("weight table needs at least f(0) and f(1)");
  WeightFunction w;
  w.kind_ = Kind::table;
  w.table_ = std::move(values);
  w.validate(w.table_.size() - 1);
  return w;
}

WeightFunction WeightFunction::rule(std::function<double(std::size_t)> f, std::string label) {
  if (!f) throw ParameterError("empty weight rule");
  WeightFunction w;
  w.kind_ = Kind::rule;
  w.rule_ = std::move(f);
  w.label_ = std::move(label);
  return w;
}

std::string WeightFunction::label() const {
  switch (kind_) {
    case Kind::power: {
      std::ostringstream os;
      os << "power(" << tau_ << ")";
      return os.str();
    }
    case Kind::table:
      return "table(" + std::to_string(table_.size()) + ")";
    case Kind::rule:
      return label_.empty() ? "rule" : label_;
  }
  return "unknown";
}

double WeightFunction::operator()(std::size_t j) const {
  switch (kind_) {
    case Kind::power:
      return j == 0 ? 0.0 : std::pow(static_cast<double>(j), tau_);
    case Kind::table:
      if (j >= table_.size()) {
        throw IndexError("weight table has no entry for j = " + std::to_string(j));
      }
      return table_[j];
    case Kind::rule:
      return rule_(j);
  }
  return 0.0;
}

double WeightFunction::delta(std::size_t j) const {
  if (j == 0) throw IndexError("delta f is defined for j >= 1");
  if (kind_ == Kind::power) {
    if (j == 1) return 1.0;
    const double x = static_cast<double>(j);
    // j^tau - (j-1)^tau = j^tau (1 - (1 - 1/j)^tau)
    return -std::pow(x, tau_) * std::expm1(tau_ * std::log1p(-1.0 / x));
  }
  return (*this)(j) - (*this)(j - 1);
}

void WeightFunction::validate(std::size_t upto) const {
  if ((*this)(0) != 0.0) throw ParameterError("weight function must satisfy f(0) = 0");
  if (kind_ == Kind::power) return;
  double prev = 0.0;
  for (std::size_t j = 1; j <= upto; ++j) {
    const double v = (*this)(j);
    if (!std::isfinite(v) || !(v > prev)) {
      throw ParameterError("weight function is not strictly increasing at j = " +
                           std::to_string(j));
    }
    prev = v;
  }
}

std::size_t WeightFunction::domain_end() const noexcept {
  return kind_ == Kind::table ? table_.size() - 1 : std::numeric_limits<std::size_t>::max();
}

ScalingRule ScalingRule::power(double exponent) {
  if (!std::isfinite(exponent)) throw ParameterError("alpha exponent must be finite");
  ScalingRule s;
  s.exponent_ = exponent;
  return s;
}

ScalingRule ScalingRule::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ParameterError("alpha must be positive");
  ScalingRule s;
  s.constant_ = value;
  return s;
}

ScalingRule ScalingRule::custom(std::function<double(std::size_t)> alpha, std::string label) {
  if (!alpha) throw ParameterError("empty alpha rule");
  ScalingRule s;
  s.custom_ = std::move(alpha);
  s.label_ = std::move(label);
  return s;
}

double ScalingRule::operator()(std::size_t k) const {
  double v;
  if (custom_) {
    v = custom_(k);
  } else if (exponent_) {
    v = *exponent_ == 0.0 ? 1.0 : std::pow(static_cast<double>(k), *exponent_);
  } else {
    v = constant_;
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParameterError("alpha(k) must be positive, k = " + std::to_string(k));
  }
  return v;
}

std::string ScalingRule::label() const {
  std::ostringstream os;
  if (custom_) return label_.empty() ? "custom" : label_;
  if (exponent_) {
    os << "k^" << *exponent_;
  } else {
    os << constant_;
  }
  return os.str();
}

}  // namespace slln
