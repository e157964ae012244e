#pragma once

#include <stdexcept>
#include <string>

namespace cca {

// Bad caller input: dimension mismatches, invalid parameters, unreadable
// files. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration key or value. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A violated internal invariant; indicates a bug, not bad input. CLI exit
// code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InputError(msg);
}

}  // namespace cca
