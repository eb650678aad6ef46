#pragma once

#include <stdexcept>
#include <string>

namespace hapdeploy {

// Base class so callers can catch everything from this library at once.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Scenario file could not be read or is not valid JSON/schema.
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A named model invariant is violated; message carries the offending
// crossroad/user index where applicable.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& msg) : Error(msg) {}
};

class IndexError : public Error {
public:
  explicit IndexError(const std::string& msg) : Error(msg) {}
};

// Markov chain is reducible; no unique stationary distribution.
class NotErgodic : public Error {
public:
  explicit NotErgodic(const std::string& msg) : Error(msg) {}
};

class EmptyTrace : public Error {
public:
  explicit EmptyTrace(const std::string& msg) : Error(msg) {}
};

// Candidate space exceeds the configured exhaustive-search cap.
class TooLarge : public Error {
public:
  explicit TooLarge(const std::string& msg) : Error(msg) {}
};

// No deployment satisfies the constraints (or an LP/relaxation has an
// empty feasible region).
class Infeasible : public Error {
public:
  explicit Infeasible(const std::string& msg) : Error(msg) {}
};

// The root relaxation of a branch-and-bound dive is already infeasible.
class RelaxationInfeasible : public Infeasible {
public:
  explicit RelaxationInfeasible(const std::string& msg) : Infeasible(msg) {}
};

// Solver asked to run on a scheme it does not support.
class SchemeMismatch : public Error {
public:
  explicit SchemeMismatch(const std::string& msg) : Error(msg) {}
};

// Simplex cycled; only possible when anti-cycling is disabled.
class CycleDetected : public Error {
public:
  explicit CycleDetected(const std::string& msg) : Error(msg) {}
};

}  // namespace hapdeploy
