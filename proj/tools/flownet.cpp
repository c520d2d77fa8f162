// Command-line front end: feasibility, gains, steady-state, simulate.
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "flownet/commands.hpp"

namespace {

void configure_logging() {
  const char* level = std::getenv("FLOWNET_LOG_LEVEL");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
  spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();

  CLI::App app{"Distributed flow-network regulator toolkit"};
  app.require_subcommand(1);

  flownet::CommandOptions opts;
  std::string mode;
  std::string reading = "direct";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario, "Scenario file")->required();
    sub->add_option("--theta", opts.theta, "Override theta in (0, 1)");
    sub->add_option("--delta-theta-reading", reading,
                    "direct: theta/(1-theta), inverted: (1-theta)/theta")
        ->check(CLI::IsMember({"direct", "inverted"}));
  };

  CLI::App* feasibility = app.add_subcommand("feasibility", "Check steady inputs against limits");
  feasibility->add_option("--scenario", opts.scenario, "Scenario file")->required();

  CLI::App* gains = app.add_subcommand("gains", "Synthesize or verify gains");
  add_common(gains);

  CLI::App* steady = app.add_subcommand("steady-state", "Dump equilibrium of one segment");
  add_common(steady);
  steady->add_option("--segment", opts.segment, "Segment index (0-based)");

  CLI::App* sim = app.add_subcommand("simulate", "Integrate the closed loop");
  add_common(sim);
  sim->add_option("--out", opts.out, "CSV trace path");
  sim->add_option("--dt", opts.dt, "Step size in seconds")->check(CLI::PositiveNumber);
  sim->add_option("--mode", mode, "saturated or unconstrained")
      ->check(CLI::IsMember({"saturated", "unconstrained"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return flownet::kExitParse;
  }

  if (!mode.empty()) {
    opts.mode = mode == "saturated" ? flownet::ControlMode::kSaturated
                                    : flownet::ControlMode::kUnconstrained;
  }
  opts.reading = reading == "inverted" ? flownet::DeltaThetaReading::kInverted
                                       : flownet::DeltaThetaReading::kDirect;

  if (*feasibility) return flownet::cmd_feasibility(opts, std::cout, std::cerr);
  if (*gains) return flownet::cmd_gains(opts, std::cout, std::cerr);
  if (*steady) return flownet::cmd_steady_state(opts, std::cout, std::cerr);
  return flownet::cmd_simulate(opts, std::cout, std::cerr);
}
