#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dx {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the file and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

// Unknown concept, individual or item name.
class LookupError : public Error {
 public:
  using Error::Error;
};

// Violated internal invariant (e.g. a cycle reaching closure materialization).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Caller supplied arguments outside an operation's precondition.
class UsageError : public Error {
 public:
  using Error::Error;
};

// A statistical estimator could not produce a finite answer.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

// Binary index file has the wrong magic, version or is truncated.
class IndexFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace dx
