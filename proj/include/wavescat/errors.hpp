#pragma once

#include <stdexcept>
#include <string>

namespace wavescat {

// Exit codes used by the CLI driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitSolver = 3,
  kExitGeometry = 4,
  kExitIo = 5,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The embedded object (plus its diffuse halo) reached the PML collar.
struct GeometryEscape : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedMotion : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutOfDomain : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace wavescat
