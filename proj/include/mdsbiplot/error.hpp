#pragma once

#include <stdexcept>
#include <string>

namespace mdsbiplot {

// Bad input and violated preconditions raise std::invalid_argument.
// Failures of the numerics themselves (non-finite stress, solver breakdown,
// singular systems) raise NumericalError.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mdsbiplot
