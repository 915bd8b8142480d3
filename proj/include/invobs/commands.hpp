#pragma once

// Subcommands behind the invobs command line tool. Each writes to the given
// streams and returns the process exit code:
//   0 success, 2 parse, 3 validation, 4 numeric, 5 property failure.

#include <complex>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace invobs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitProperty = 5;

/// Maps a caught exception onto the exit code contract.
int exit_code_for(const std::exception& e);

/// "-2", "-1+0.5i", "-1-0.5j". Throws ParseError.
std::complex<double> parse_pole(const std::string& text);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

struct SimulateOptions {
  std::string file;
  std::string out;    // CSV path (single run) or output directory (batch)
  std::string batch;  // directory of *.yaml scenarios
  int jobs = 0;       // 0: hardware concurrency
};
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);

struct LinearizeOptions {
  std::string system;
  std::vector<double> ubar;          // empty: system default
  std::vector<std::string> poles;
  std::vector<double> K;
};
int cmd_linearize(const LinearizeOptions& opt, std::ostream& out, std::ostream& err);
/// Same options; reports the gain and the closed-loop spectrum only.
/// Without poles or K the adjoint design with unit weights is used.
int cmd_gains(const LinearizeOptions& opt, std::ostream& out, std::ostream& err);

struct CheckOptions {
  std::string system;
  int samples = 200;
  std::uint64_t seed = 1;
  double tol = 1e-8;
  double trajectory_tol = 1e-7;
};
int cmd_check(const CheckOptions& opt, std::ostream& out, std::ostream& err);

struct PermanentOptions {
  std::string system;
  std::vector<double> ubar;
  std::vector<double> x0;  // exponential coordinates
  double duration = 10.0;
  double dt = 0.01;
  double perturb = 0.0;  // amplitude of a sinusoidal input disturbance
  std::string out;
};
int cmd_permanent(const PermanentOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace invobs
