#pragma once

#include <stdexcept>
#include <string>

namespace harmlab {

enum class ErrorKind {
  parameter,
  geometry,
  domain,
  constraint,
  numerical,
  positivity,
  precondition,
  insufficient_data,
  resource,
  io,
  config,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Names the offending scenario or option field.
class ParameterError : public Error {
 public:
  ParameterError(std::string field, const std::string& what)
      : Error(ErrorKind::parameter, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class GeometryError : public Error {
 public:
  GeometryError(int triangle, const std::string& what)
      : Error(ErrorKind::geometry, "triangle " + std::to_string(triangle) + ": " + what),
        triangle_(triangle) {}
  int triangle() const { return triangle_; }

 private:
  int triangle_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(ErrorKind::numerical, what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(ErrorKind::config, path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline Error domain_error(const std::string& w) { return Error(ErrorKind::domain, w); }
inline Error constraint_error(const std::string& w) { return Error(ErrorKind::constraint, w); }
inline Error precondition_error(const std::string& w) { return Error(ErrorKind::precondition, w); }

}  // namespace harmlab
