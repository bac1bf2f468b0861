#pragma once

#include <stdexcept>
#include <string>

namespace crib {

enum class ErrorKind {
  InvalidArgument,
  GridTooNarrow,
  StepSize,
  WindowOverflow,
  Schedule,
  WrongTransition,
  SizeLimit,
  Degenerate,
  Premise,
  Io,
  Schema,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::GridTooNarrow: return "grid too narrow";
    case ErrorKind::StepSize: return "step size";
    case ErrorKind::WindowOverflow: return "window overflow";
    case ErrorKind::Schedule: return "schedule violation";
    case ErrorKind::WrongTransition: return "wrong active transition";
    case ErrorKind::SizeLimit: return "size limit";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Premise: return "premise violation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Schema: return "schema";
  }
  return "error";
}

}  // namespace crib
