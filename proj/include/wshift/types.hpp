#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace wshift {

/// Weight positions are 1-based (w_1 is the first weight); vector
/// coordinates are 0-based (x_0 is the first coordinate). Both use this type.
using index_t = std::int64_t;

enum class ErrorKind {
  NonPositiveWeight,
  HorizonExceeded,
  Overflow,
  NoPairsFound,
  PreconditionUnmet,
  InvalidArgument,
  Config,
  Io,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::NoPairsFound: return "NoPairsFound";
    case ErrorKind::PreconditionUnmet: return "PreconditionUnmet";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorKind::Overflow, "64-bit addition overflow");
  return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(ErrorKind::Overflow, "64-bit subtraction overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorKind::Overflow, "64-bit multiplication overflow");
  return r;
}

}  // namespace detail

}  // namespace wshift
