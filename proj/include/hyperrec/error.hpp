#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperrec {

enum class ErrorKind {
  kValidation,   // bad parameters or data violating a documented invariant
  kParse,        // malformed input text
  kLookup,       // unknown vertex, edge, user, or track
  kFingerprint,  // staged artifact built from a different graph
  kIo,           // file cannot be opened, read, or written
  kFormat,       // persisted artifact is truncated or inconsistent
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(ErrorKind::kParse,
              source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LookupError : public Error {
 public:
  explicit LookupError(const std::string& what)
      : Error(ErrorKind::kLookup, what) {}
};

class FingerprintError : public Error {
 public:
  explicit FingerprintError(const std::string& what)
      : Error(ErrorKind::kFingerprint, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::kFormat, what) {}
};

}  // namespace hyperrec
