// errors.hpp -- exception taxonomy used across the library.
//
//   domain error     -> std::domain_error      (invalid physical parameter values)
//   usage error      -> ptqed::UsageError      (valid objects combined in an invalid way)
//   numerical error  -> ptqed::NumericalError  (iteration/quadrature failed to converge)
//   resource error   -> ptqed::ResourceError   (configured caps exceeded)
//   validation error -> ptqed::ValidationError (bad run configuration; carries all violations)
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ptqed {

class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}
  // Residual or extrapolation history leading up to the failure.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "configuration invalid:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace ptqed
