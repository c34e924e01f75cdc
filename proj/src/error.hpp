#pragma once

#include <stdexcept>
#include <string>

namespace thash {

enum class ErrorKind {
  invalid_argument,
  dimension_mismatch,
  data,
  io,
  infeasible_sampling,
  divergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace thash
