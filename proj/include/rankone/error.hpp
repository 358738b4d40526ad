#pragma once

#include <stdexcept>
#include <string>

namespace rankone {

enum class ErrorKind {
  InvalidSpec,
  BudgetExceeded,
  Infeasible,
  CommonColumnRequired,
  UniquenessRequired,
  StageTooSmall,
  IndexOutOfRange,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rankone
