#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace riskgrid {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary file does not start with the expected magic or has a short header.
class MalformedHeader : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A pixel's class probabilities sum to something further than 1e-3 from 1.
class ProbabilityDrift : public Error {
 public:
  using Error::Error;
};

class MissingClassCost : public Error {
 public:
  using Error::Error;
};

/// Scene description or parameter set violates its invariants.
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InvalidEndpoint : public Error {
 public:
  using Error::Error;
};

/// Start and goal are disconnected. When raised during candidate generation
/// the offending (vehicle, demand, lambda) triple is attached.
class NoPath : public Error {
 public:
  struct Context {
    int vehicle;
    int demand;
    double lambda;
  };

  explicit NoPath(const std::string& what) : Error(what) {}
  NoPath(const std::string& what, Context ctx) : Error(what), context_(ctx) {}

  const std::optional<Context>& context() const { return context_; }

 private:
  std::optional<Context> context_;
};

class UnknownTuple : public Error {
 public:
  using Error::Error;
};

class EmptySamples : public Error {
 public:
  using Error::Error;
};

class InstanceTooLarge : public Error {
 public:
  using Error::Error;
};

/// Text input (CSV, JSON) that cannot be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace riskgrid
