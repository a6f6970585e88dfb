#pragma once

#include <stdexcept>
#include <string>

namespace mee {

// Base class for all library errors. Each subclass maps onto one of the
// error kinds named by the operations (invalid-bandwidth, invalid-input, ...).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidBandwidth : public Error {
public:
  explicit InvalidBandwidth(double h)
      : Error("invalid bandwidth h=" + std::to_string(h) + " (must be > 0)"), h_(h) {}
  double bandwidth() const { return h_; }

private:
  double h_;
};

class InvalidInput : public Error {
public:
  using Error::Error;
};

class InvalidModel : public Error {
public:
  using Error::Error;
};

class InvalidHypothesis : public Error {
public:
  using Error::Error;
};

class DegenerateSample : public Error {
public:
  using Error::Error;
};

// Quadrature did not reach the requested tolerance; carries what it did reach.
class QuadratureError : public Error {
public:
  QuadratureError(const std::string& what, double achieved, double requested)
      : Error(what + ": achieved abs error " + std::to_string(achieved) + " > requested " +
              std::to_string(requested)),
        achieved_(achieved), requested_(requested) {}
  double achieved() const { return achieved_; }
  double requested() const { return requested_; }

private:
  double achieved_;
  double requested_;
};

class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(format(what, line, field)), line_(line), field_(std::move(field)) {}
  int line() const { return line_; }
  const std::string& field() const { return field_; }

private:
  static std::string format(const std::string& what, int line, const std::string& field) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!field.empty()) out += "field '" + field + "': ";
    return out + what;
  }
  int line_;
  std::string field_;
};

class IoError : public Error {
public:
  IoError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

private:
  std::string path_;
};

} // namespace mee
