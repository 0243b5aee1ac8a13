#pragma once

#include <stdexcept>
#include <string>

namespace aggfit {

// Malformed, inconsistent or unloadable study data. Maps to CLI exit code 2;
// contract violations (bad arguments, invalid configs) use
// std::invalid_argument and map to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aggfit
