#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vinedep {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// A variable that is constant (or entirely missing) on its observed cells.
class DegenerateVariableError : public Error {
public:
  DegenerateVariableError(std::string variable, const std::string& what)
      : Error(what), variable_(std::move(variable)) {}
  const std::string& variable() const noexcept { return variable_; }

private:
  std::string variable_;
};

// Raised when a transform that needs complete data sees missing cells.
class NotImputedError : public Error {
public:
  using Error::Error;
};

class ImputationError : public Error {
public:
  ImputationError(std::string variable, const std::string& what)
      : Error(what), variable_(std::move(variable)) {}
  const std::string& variable() const noexcept { return variable_; }

private:
  std::string variable_;
};

class NotPositiveDefiniteError : public Error {
public:
  using Error::Error;
};

// 1 - rho^2 vanished inside the partial-correlation recursion.
class SingularityError : public Error {
public:
  SingularityError(std::size_t i, std::size_t k, std::vector<std::size_t> conditioning,
                   const std::string& what)
      : Error(what), i_(i), k_(k), conditioning_(std::move(conditioning)) {}
  std::size_t first() const noexcept { return i_; }
  std::size_t second() const noexcept { return k_; }
  const std::vector<std::size_t>& conditioning() const noexcept { return conditioning_; }

private:
  std::size_t i_;
  std::size_t k_;
  std::vector<std::size_t> conditioning_;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, std::vector<double> last_iterate,
                   std::vector<double> objective_trace)
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        objective_trace_(std::move(objective_trace)) {}
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }
  const std::vector<double>& objective_trace() const noexcept { return objective_trace_; }

private:
  std::vector<double> last_iterate_;
  std::vector<double> objective_trace_;
};

// Wraps a failure inside run_pipeline with the stage that produced it.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

}  // namespace vinedep
