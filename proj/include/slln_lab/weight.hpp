#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slln {

/// Increasing weight f on the integers with f(0) = 0.
class WeightFunction {
 public:
  enum class Kind { power, table, rule };

  /// f(j) = j^tau, tau > 0.
  static WeightFunction power(double tau);
  static WeightFunction identity() { return power(1.0); }
  /// f(j) = values[j]; values[0] must be 0. Defined for j < values.size().
  static WeightFunction table(std::vector<double> values);
  static WeightFunction rule(std::function<double(std::size_t)> f, std::string label);

  Kind kind() const noexcept { return kind_; }
  std::optional<double> tau() const noexcept {
    return kind_ == Kind::power ? std::optional<double>(tau_) : std::nullopt;
  }
  std::string label() const;

  double operator()(std::size_t j) const;
  /// f(j) - f(j-1) for j >= 1, computed without cancellation for powers.
  double delta(std::size_t j) const;

  /// Throws ParameterError unless f(0) = 0 and f is strictly increasing on 0..upto.
  void validate(std::size_t upto) const;

  /// Largest j for which f(j) is defined (table kind), otherwise SIZE_MAX.
  std::size_t domain_end() const noexcept;

 private:
  WeightFunction() = default;

  Kind kind_ = Kind::power;
  double tau_ = 1.0;
  std::vector<double> table_;
  std::function<double(std::size_t)> rule_;
  std::string label_;
};

/// Positive scaling sequence alpha(k).
class ScalingRule {
 public:
  /// alpha(k) = k^exponent.
  static ScalingRule power(double exponent);
  static ScalingRule constant(double value);
  static ScalingRule custom(std::function<double(std::size_t)> alpha, std::string label);

  double operator()(std::size_t k) const;
  std::optional<double> exponent() const noexcept { return exponent_; }
  std::string label() const;

 private:
  ScalingRule() = default;

  std::optional<double> exponent_;
  double constant_ = 1.0;
  std::function<double(std::size_t)> custom_;
  std::string label_;
};

}  // namespace slln
