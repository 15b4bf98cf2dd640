#pragma once

#include <stdexcept>
#include <string>

namespace tqkd {

// Parameters outside the accepted state family or otherwise malformed input.
class invalid_params : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Explicit basis construction (and hence simulation/tomography) needs a prime
// dimension; the analytic modules accept any n >= 2.
class unsupported_dimension : public std::invalid_argument {
 public:
  explicit unsupported_dimension(int n)
      : std::invalid_argument("unsupported dimension n=" + std::to_string(n) +
                              " (explicit bases need a prime n)"),
        n_(n) {}
  int dimension() const noexcept { return n_; }

 private:
  int n_;
};

class dimension_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class rank_deficient : public std::runtime_error {
 public:
  rank_deficient(const std::string& what, double condition)
      : std::runtime_error(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace tqkd
