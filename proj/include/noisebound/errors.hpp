#pragma once

#include <stdexcept>

namespace noisebound {

// Malformed caller input: bad indices, inconsistent sizes, parameters out of
// their stated domain.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested computation would exceed a configured enumeration or size
// budget.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A series or bound has no finite value for the given parameters.
class divergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Config file rejected: parse failure or schema violation. Messages name the
// offending field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace noisebound
