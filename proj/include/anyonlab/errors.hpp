#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>
#include <algorithm>

namespace al {

using cplx = std::complex<double>;
using Index = int;

enum class ErrorKind {
  unknown_charge,
  invalid_model,
  numerical,
  zero_probability,
  invalid_argument,
  unsupported,
  parse,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// One named check of a validation suite. `offenders` holds human-readable
// tuples such as "(sigma,sigma,1)" for every violation beyond tolerance.
struct CheckOutcome {
  std::string name;
  bool passed = true;
  double worst_residual = 0.0;
  std::vector<std::string> offenders;

  CheckOutcome() = default;
  explicit CheckOutcome(std::string check_name) : name(std::move(check_name)) {}

  // NaN residuals count as failures rather than slipping past the comparison.
  void record(double residual, double tol, const std::string& where) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (residual > worst_residual) worst_residual = residual;
    if (residual > tol) {
      passed = false;
      offenders.push_back(where);
    }
  }
};

struct ValidationReport {
  std::vector<CheckOutcome> checks;
  bool modular = false;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  double worst_residual() const {
    double w = 0.0;
    for (const auto& c : checks) w = std::max(w, c.worst_residual);
    return w;
  }
  const CheckOutcome* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

}  // namespace al
