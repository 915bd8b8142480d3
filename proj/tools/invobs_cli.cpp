#include <iostream>

#include <CLI11.hpp>

#include "invobs/commands.hpp"
#include "invobs/examples.hpp"

int main(int argc, char** argv) {
  using namespace invobs;
  CLI::App app{"Invariant observers on Lie groups: simulation and analysis"};
  app.require_subcommand(1);
  const auto& names = system_names();

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a scenario file and print its summary");
  simulate->add_option("file", sim.file, "Scenario file (YAML)");
  simulate->add_option("--out", sim.out, "CSV output path (directory with --batch)");
  simulate->add_option("--batch", sim.batch, "Run every *.yaml in a directory concurrently");
  simulate->add_option("--jobs", sim.jobs, "Worker threads for --batch (0: all cores)")
      ->check(CLI::NonNegativeNumber);

  LinearizeOptions lin;
  auto* linearize = app.add_subcommand("linearize", "First-order error system at a permanent trajectory");
  linearize->add_option("system", lin.system, "System name")->required()->check(CLI::IsMember(names));
  linearize->add_option("--ubar", lin.ubar, "Invariant input");
  auto* lin_poles = linearize->add_option("--poles", lin.poles, "Closed-loop poles, e.g. -1 -2+0.5i -2-0.5i");
  linearize->add_option("--K", lin.K, "Adjoint gain weights in output space")->excludes(lin_poles);

  LinearizeOptions gain;
  auto* gains = app.add_subcommand("gains", "Design an observer gain");
  gains->add_option("system", gain.system, "System name")->required()->check(CLI::IsMember(names));
  gains->add_option("--ubar", gain.ubar, "Invariant input");
  auto* gain_poles = gains->add_option("--poles", gain.poles, "Closed-loop poles");
  gains->add_option("--K", gain.K, "Adjoint gain weights")->excludes(gain_poles);

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "Randomized invariance and equivariance identities");
  check->add_option("system", chk.system, "System name")->required()->check(CLI::IsMember(names));
  check->add_option("--samples", chk.samples, "Random draws per identity");
  check->add_option("--seed", chk.seed, "Random seed");
  check->add_option("--tol", chk.tol, "Tolerance for the algebraic identities");

  PermanentOptions perm;
  auto* permanent = app.add_subcommand("permanent", "Sample a permanent trajectory and test it");
  permanent->add_option("system", perm.system, "System name")->required()->check(CLI::IsMember(names));
  permanent->add_option("--ubar", perm.ubar, "Invariant input");
  permanent->add_option("--x0", perm.x0, "Initial state, exponential coordinates");
  permanent->add_option("--duration", perm.duration, "Duration in seconds");
  permanent->add_option("--dt", perm.dt, "Step in seconds");
  permanent->add_option("--perturb", perm.perturb, "Sinusoidal disturbance added to the first input");
  permanent->add_option("--out", perm.out, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (*simulate) return cmd_simulate(sim, std::cout, std::cerr);
  if (*linearize) return cmd_linearize(lin, std::cout, std::cerr);
  if (*gains) return cmd_gains(gain, std::cout, std::cerr);
  if (*check) return cmd_check(chk, std::cout, std::cerr);
  return cmd_permanent(perm, std::cout, std::cerr);
}
