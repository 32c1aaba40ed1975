#pragma once

#include <stdexcept>
#include <string>

namespace pglee {

// Error hierarchy. Each category maps onto one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return 1; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 2; }
};

class DataError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 3; }
};

class BackendError : public Error {
 public:
  enum class Kind { Timeout, Connection, HttpStatus, MissingOutput, MalformedResponse };

  BackendError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }
  int exit_code() const override { return 4; }

 private:
  Kind kind_;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
  int exit_code() const override { return 5; }
};

}  // namespace pglee
