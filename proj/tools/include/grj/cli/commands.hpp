#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "grj/cli/io.hpp"

namespace grj::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 1,
  kExitNoUnitRoot = 2,
  kExitNotIntegrated = 3,
  kExitInvariant = 4,
};

struct RunConfig {
  std::string command;
  std::string model;  // model file path or built-in id
  std::size_t n = 0;  // built-in truncation size, 0 = model default
  double lambda = 0.5;
  std::uint64_t model_seed = 1;
  std::optional<double> tol;  // rank_rel
  std::optional<double> radius;
  std::optional<std::size_t> nodes;
  std::uint64_t seed = 1;
  std::size_t horizon = 500;
  int j_max = 20;
  std::string out = "-";
  unsigned threads = 1;
  std::vector<std::size_t> sweep;
  std::size_t replications = 0;
  std::size_t mc_horizon = 2000;
  std::string path;    // stored path CSV for the determinism check
  std::string report;  // stored represent output for the h-coefficient check
  std::string slope_method = "variogram";
};

struct LoadedModel {
  std::string id;
  bool builtin = false;
  ArPencil ar;
  OperatorMatrix cov;
};

/// --tol, else GRJ_DEFAULT_TOL, else the library default.
Tolerance resolve_tolerance(const RunConfig& cfg);
ContourOptions resolve_contour(const RunConfig& cfg);
LoadedModel load_model(const RunConfig& cfg);

Json cmd_analyze(const RunConfig& cfg, int& code);
Json cmd_represent(const RunConfig& cfg, int& code);
/// CSV for one path, a JSON summary for an ensemble.
std::string cmd_simulate(const RunConfig& cfg);
Json cmd_verify(const RunConfig& cfg, int& code);
Json cmd_examples(const RunConfig& cfg);
Json cmd_sweep(const RunConfig& cfg);

/// Parses arguments, runs the command and maps failures to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grj::cli
