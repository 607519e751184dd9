#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace provabs {

// Base of every error raised by the library. Report-style checks (forest
// validation, compatibility) return violation lists instead of throwing.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCoefficient : public Error {
 public:
  using Error::Error;
};

class InvalidExponent : public Error {
 public:
  using Error::Error;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(std::string name)
      : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& what)
      : Error(location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

class UnknownLabel : public Error {
 public:
  explicit UnknownLabel(const std::string& label) : Error("unknown label '" + label + "'") {}
};

class EmptyTree : public Error {
 public:
  using Error::Error;
};

class InvalidForest : public Error {
 public:
  using Error::Error;
};

class CompatibilityError : public Error {
 public:
  using Error::Error;
};

class BoundError : public Error {
 public:
  using Error::Error;
};

class TooManyCuts : public Error {
 public:
  explicit TooManyCuts(std::uint64_t count, std::uint64_t cap)
      : Error("cut enumeration needs " + std::to_string(count) + " cuts, cap is " + std::to_string(cap)),
        count_(count) {}
  std::uint64_t count() const { return count_; }

 private:
  std::uint64_t count_;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidPair : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

class InvalidGraph : public InvalidSpec {
 public:
  using InvalidSpec::InvalidSpec;
};

}  // namespace provabs
