#pragma once

#include <stdexcept>
#include <string>

namespace rcm {

// Bad argument or out-of-domain input (exit code 2 at the CLI).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The connection function / dimension pair does not define a valid model,
// e.g. a power-law tail whose radial integral diverges.
class ModelInvalid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A limit theorem's hypothesis does not hold for this model instance.
class NotApplicable : public std::runtime_error {
 public:
  explicit NotApplicable(const std::string& hypothesis)
      : std::runtime_error("not applicable: requires " + hypothesis),
        hypothesis_(hypothesis) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

// Truncated build whose certified omission bound exceeds the tolerance.
class TruncationRefused : public std::runtime_error {
 public:
  TruncationRefused(double bound, double epsilon, double minimal_cutoff)
      : std::runtime_error("truncation refused: certified bound " + std::to_string(bound) +
                           " exceeds epsilon " + std::to_string(epsilon) +
                           "; minimal admissible cutoff is " + std::to_string(minimal_cutoff)),
        minimal_cutoff_(minimal_cutoff) {}

  double minimal_cutoff() const noexcept { return minimal_cutoff_; }

 private:
  double minimal_cutoff_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rcm
