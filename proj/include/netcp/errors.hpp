#pragma once

#include <stdexcept>
#include <string>

namespace netcp {

/// Raised when an argument violates an operation's precondition.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative solver fails to converge. Carries the best
/// estimate found so callers can decide whether it is usable.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw validation_error(msg);
}

}  // namespace detail
}  // namespace netcp
