#ifndef CROSSDAMP_ERROR_HPP
#define CROSSDAMP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace crossdamp {

// Bad arguments (violated preconditions) are reported with std::invalid_argument.
// Everything below signals that a well-formed request hit a numerical limit.

class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested state lies outside the domain a closed form supports.
class unsupported_regime : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// A quantity that must be strictly positive (or a non-flat direction) vanished.
class degenerate_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

class convergence_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail
}  // namespace crossdamp

#endif  // CROSSDAMP_ERROR_HPP
