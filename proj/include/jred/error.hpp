#pragma once

#include <stdexcept>
#include <string>

namespace jred {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operands over different block structures.
class StructureError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAffineError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace jred
