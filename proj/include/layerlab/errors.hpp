#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace layerlab {

// Base class for every failure raised by the library. Preconditions that are
// caller bugs (bad sizes, non-positive steps) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time, double value)
      : Error(what), time_(time), value_(value) {}
  double time() const { return time_; }
  double value() const { return value_; }

 private:
  double time_;
  double value_;
};

class InvariantRectangleError : public Error {
 public:
  using Error::Error;
};

class EmptyLevelSetError : public Error {
 public:
  using Error::Error;
};

class ContourError : public Error {
 public:
  using Error::Error;
};

class GraphPropertyError : public Error {
 public:
  GraphPropertyError(const std::string& what, std::size_t vertex, int intersections)
      : Error(what), vertex_(vertex), intersections_(intersections) {}
  std::size_t vertex() const { return vertex_; }
  int intersections() const { return intersections_; }

 private:
  std::size_t vertex_;
  int intersections_;
};

class ExtinctionError : public Error {
 public:
  ExtinctionError(const std::string& what, double t_lo, double t_hi)
      : Error(what), t_lo_(t_lo), t_hi_(t_hi) {}
  // The interface vanishes somewhere in [lower(), upper()].
  double lower() const { return t_lo_; }
  double upper() const { return t_hi_; }

 private:
  double t_lo_;
  double t_hi_;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace layerlab
