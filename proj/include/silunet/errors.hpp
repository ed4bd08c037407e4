#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace silunet {

enum class ErrorKind {
  domain,
  capacity,
  degenerate_shift,
  overflow,
  parse,
  infeasible,
  contract,
  io,
};

/// Base class of every error the library throws.  The kind drives the CLI
/// exit code, see exit_code().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::capacity, what) {}
};

/// The leading coefficient K(a) or K_m(a) is (numerically) zero, so the
/// shifted-SiLU expansion cannot be normalised.
class DegenerateShiftError : public Error {
 public:
  explicit DegenerateShiftError(const std::string& what)
      : Error(ErrorKind::degenerate_shift, what) {}
};

/// An intermediate exceeded the overflow guard.  layer() is the 0-based
/// layer index, or npos when the failure is in a parameter computation.
class OverflowError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  OverflowError(const std::string& what, std::size_t layer = npos)
      : Error(ErrorKind::overflow, what), layer_(layer) {}
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(ErrorKind::parse, what + " (at byte " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  std::size_t byte_offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& what) : Error(ErrorKind::infeasible, what) {}
};

/// Precondition violated by the caller (dimension mismatch, bad wiring, ...).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Process exit code used by the command-line tool for each error kind.
/// 2 is reserved for usage errors.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return 3;
    case ErrorKind::capacity: return 4;
    case ErrorKind::degenerate_shift: return 5;
    case ErrorKind::overflow: return 6;
    case ErrorKind::parse: return 7;
    case ErrorKind::infeasible: return 8;
    case ErrorKind::contract: return 9;
    case ErrorKind::io: return 10;
  }
  return 1;
}

inline const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::degenerate_shift: return "degenerate_shift";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::parse: return "parse";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::contract: return "contract";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace silunet
