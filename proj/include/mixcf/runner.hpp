#pragma once

// Experiment orchestration behind the command line tool. Every command returns
// a JSON report and an exit code; errors are reported, never thrown.
//
// Exit codes:
//   0  success (solve/roundtrip/report: W[u] positive definite everywhere)
//   2  invalid input: configuration, non-C^2+ body, incompatible density,
//      non-elliptic coefficients, or a numerical failure of the solve
//   3  solve converged but W[u] is not positive definite
//   4  a selected sufficient condition failed (the solve still runs)

#include <string>

#include "mixcf/config.hpp"
#include "mixcf/verdict.hpp"

namespace mixcf {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNotGeometric = 3;
inline constexpr int kExitCondition = 4;

struct RunResult {
  int exit_code = kExitOk;
  json report;
  /// Per-node data: the density for measure, eigenvalues of W[u] otherwise.
  std::string csv;
};

RunResult cmd_measure(const ExperimentConfig& cfg);
RunResult cmd_solve(const ExperimentConfig& cfg);
RunResult cmd_check(const ExperimentConfig& cfg);
RunResult cmd_roundtrip(const ExperimentConfig& cfg);
RunResult cmd_report(const ExperimentConfig& cfg);

/// Parses the document (with overrides already applied) and dispatches.
RunResult run_command(const std::string& command, const json& config_doc);

json to_json(const ConditionVerdict& v, const FramedGrid& grid);

}  // namespace mixcf
