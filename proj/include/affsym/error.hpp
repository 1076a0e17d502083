#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace affsym {

// Mirrors affsym_status in the C header; values must stay in sync.
enum class ErrorCode : int {
  Ok = 0,
  Parse = 1,
  UnknownIdentifier = 2,
  Domain = 3,
  OrderExceeded = 4,
  SingularFrame = 5,
  NotSelfAdjoint = 6,
  SingularForm = 7,
  Hypothesis = 8,
  InvalidArgument = 9,
  Io = 10,
  Internal = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Syntax error in an expression; `offset` is the byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& expected, const std::string& what)
      : Error(ErrorCode::Parse, what), offset_(offset), expected_(expected) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::string expected_;
};

class UnknownIdentifierError : public Error {
 public:
  UnknownIdentifierError(std::string name, std::size_t offset)
      : Error(ErrorCode::UnknownIdentifier,
              "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
        name_(std::move(name)),
        offset_(offset) {}
  const std::string& name() const noexcept { return name_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string name_;
  std::size_t offset_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::Domain, what) {}
};

}  // namespace affsym
