#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "flownet/gains.hpp"
#include "flownet/simulator.hpp"

namespace flownet {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitParse = 2,
  kExitInfeasible = 3,
  kExitGainBound = 4,
  kExitBlowUp = 5,
};

struct CommandOptions {
  std::string scenario;
  std::optional<std::string> out;
  std::optional<double> dt;
  std::optional<ControlMode> mode;
  std::optional<double> theta;
  DeltaThetaReading reading = DeltaThetaReading::kDirect;
  int segment = 0;
};

// Each command prints a plain-text report to `out`, diagnostics to `err`,
// and returns the process exit code. Library errors are mapped to codes.
int cmd_feasibility(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gains(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_steady_state(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace flownet
