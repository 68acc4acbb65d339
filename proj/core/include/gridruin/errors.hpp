#pragma once

#include <stdexcept>
#include <string>

namespace gridruin {

// Invalid parameters or configuration; detected before any simulation.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine could not deliver its accuracy contract.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gridruin
