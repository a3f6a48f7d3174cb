#pragma once

#include <stdexcept>
#include <string>

namespace agsp {

/// Operand shapes do not agree (vector length vs node count, |F| mismatch, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value violates a type invariant (negative weight, probability above its bound, ...).
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// U_F^T diag(p) U_F (or its noise-weighted variant) is singular: the signal
/// cannot be recovered from the expected sampling set.
class ReconstructabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A design problem has an empty feasible set. `best_achievable` carries the
/// closest attainable value of the violated quantity (max lambda_min, min MSD).
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, double best_achievable)
      : std::runtime_error(what), best_achievable_(best_achievable) {}
  double best_achievable() const noexcept { return best_achievable_; }

 private:
  double best_achievable_;
};

/// Malformed edge-list file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace agsp
