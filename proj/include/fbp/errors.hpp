#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fbp {

class InvalidData : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidField : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class InvalidTrace : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class OutOfDomain : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

/// The solution left the region where the transforms are defined (log or denominator <= 0).
class HorizonExceeded : public std::runtime_error {
public:
  HorizonExceeded(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (first offending index " + std::to_string(index) + ")"),
        index(index) {}
  std::size_t index;
};

} // namespace fbp
