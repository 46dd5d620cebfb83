#pragma once

#include <stdexcept>
#include <string>

namespace growgraph {

// Argument errors use std::invalid_argument, out-of-domain inputs std::domain_error.
// The types below cover the failure modes that callers are expected to tell apart.

/// Cached state no longer matches the objects it was computed from.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Two agents (or an agent and its neighbour) occupy the same point.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or unknown configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or gradient.
class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t sample_index)
      : std::runtime_error(what), sample_index_(sample_index) {}
  std::size_t sample_index() const noexcept { return sample_index_; }

 private:
  std::size_t sample_index_;
};

}  // namespace growgraph
