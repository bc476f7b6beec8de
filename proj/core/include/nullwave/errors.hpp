#pragma once

#include <stdexcept>
#include <string>

namespace nullwave {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration or malformed input file. Maps to exit code 1.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A requested derivative exceeds what a jet (or window) can supply.
class BudgetError : public Error {
public:
  using Error::Error;
};

/// The coefficient of u_tt dropped below the hyperbolicity threshold.
class HyperbolicityLoss : public Error {
public:
  HyperbolicityLoss(double t, double x1, double x2, double x3, double margin);

  double time() const noexcept { return t_; }
  double margin() const noexcept { return margin_; }
  double x1() const noexcept { return x_[0]; }
  double x2() const noexcept { return x_[1]; }
  double x3() const noexcept { return x_[2]; }

private:
  double t_;
  double x_[3];
  double margin_;
};

/// Non-finite value detected in the evolved state.
class BlowupError : public Error {
public:
  BlowupError(double t, const std::string& what_field);

  double time() const noexcept { return t_; }

private:
  double t_;
};

} // namespace nullwave
