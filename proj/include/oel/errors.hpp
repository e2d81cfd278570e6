#pragma once

#include <stdexcept>
#include <string>

namespace oel {

// Base class for every failure the library reports deliberately.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A stage or schedule requirement that cannot be met with the current data.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// d_M would exceed the configured depth cap.
class CapExceededError : public Error {
 public:
  using Error::Error;
};

// A construction invariant that the proof guarantees was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Stored run artifact is malformed or from a different tool version.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace oel
