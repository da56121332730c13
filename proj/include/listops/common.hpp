// Shared error type. Every module reports failures as Error with a short
// machine-readable kind ("EmptyOperands", "UnknownToken", ...) plus detail.
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace listops {

class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

[[noreturn]] inline void raise(std::string kind, const std::string& detail) {
  throw Error(std::move(kind), detail);
}

}  // namespace listops
