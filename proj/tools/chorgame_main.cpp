// Copyright 2026 The chorgame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: analyze / value / schedule / verify an instance
// file, JSON report on stdout, human-readable summary on stderr.
//
// Exit codes: 0 feasible or stable, 1 usage or parse error, 2 internal solver
// failure, 3 infeasible or violation found.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chorgame/chorgame.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitViolation = 3;

struct CommandArgs {
  std::string instance_path;
  std::string coalition_spec;
  std::string imputation_spec;
  std::optional<double> alpha_override;
  double tol = 1e-9;
  double eq_tol = 1e-9;
  double epsilon = 1e-2;
  bool no_migration = false;
  unsigned long seed = 0;
};

void add_common_options(CLI::App* cmd, CommandArgs& args) {
  cmd->add_option("instance", args.instance_path, "instance file (JSON)")->required();
  cmd->add_option("--coalition", args.coalition_spec,
                  "comma-separated organization ids (default: all organizations)");
  cmd->add_option("--alpha-override", args.alpha_override,
                  "replace the instance's alpha (for sweeps without editing files)");
  cmd->add_option("--tol", args.tol, "relative tolerance of the iterative energy solver");
  cmd->add_option("--eq-tol", args.eq_tol, "relative equality tolerance for value comparisons");
  cmd->add_option("--epsilon", args.epsilon, "strictness margin of the objection search");
  cmd->add_flag("--no-migration", args.no_migration,
                "integral balanced loads in the common-deadline energy case");
  cmd->add_option("--seed", args.seed,
                  "random seed (reserved for test harnesses; commands are deterministic)");
}

chorgame::Instance load_instance(const CommandArgs& args) {
  std::ifstream in(args.instance_path);
  if (!in) throw std::runtime_error("cannot open instance file: " + args.instance_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  chorgame::Instance inst = chorgame::parse_instance(buffer.str());
  if (args.alpha_override) {
    inst.alpha = *args.alpha_override;
    if (auto violations = chorgame::validate_instance(inst); !violations.empty())
      throw chorgame::ValidationError(std::move(violations));
  }
  return inst;
}

chorgame::Coalition select_coalition(const chorgame::Instance& inst,
                                     const std::string& spec) {
  if (spec.empty()) return chorgame::Coalition::all(inst.size());
  std::vector<int> members;
  std::stringstream ss(spec);
  std::string id;
  while (std::getline(ss, id, ',')) {
    const int k = inst.organization_index(id);
    if (k < 0) throw std::runtime_error("unknown organization id: " + id);
    members.push_back(k);
  }
  if (members.empty()) throw std::runtime_error("empty coalition selector");
  return chorgame::Coalition(std::move(members));
}

std::vector<double> parse_imputation(const std::string& spec, const chorgame::Coalition& s,
                                     int n) {
  std::vector<double> values;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    values.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::runtime_error("malformed imputation entry: " + item);
  }
  if (static_cast<int>(values.size()) != s.size())
    throw std::runtime_error("imputation length " + std::to_string(values.size()) +
                             " does not match coalition size " + std::to_string(s.size()));
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (int idx = 0; idx < s.size(); ++idx)
    x[static_cast<std::size_t>(s.members()[static_cast<std::size_t>(idx)])] =
        values[static_cast<std::size_t>(idx)];
  return x;
}

void emit(const nlohmann::ordered_json& report) {
  std::cout << chorgame::dump_report(report);
}

int run_analyze(const CommandArgs& args) {
  const chorgame::Instance inst = load_instance(args);
  const chorgame::Coalition s = select_coalition(inst, args.coalition_spec);
  chorgame::SolverOptions opts{args.tol, args.eq_tol, args.no_migration};
  chorgame::GameCache cache(inst, opts);
  const chorgame::AllianceReport report = chorgame::detect_alliance(cache, s);
  emit(chorgame::report_envelope("analyze", args.instance_path, inst, s, opts, args.epsilon,
                                 chorgame::alliance_report_json(inst, report)));
  if (report.feasible) {
    std::cerr << "alliance feasible; v(S) = " << report.grand_value << ", "
              << report.pivotal.size() << " pivotal organization(s)\n";
    return kExitOk;
  }
  std::cerr << "alliance infeasible (" << report.failed_gate << " gate failed)\n";
  return kExitViolation;
}

int run_value(const CommandArgs& args) {
  const chorgame::Instance inst = load_instance(args);
  const chorgame::Coalition s = select_coalition(inst, args.coalition_spec);
  chorgame::SolverOptions opts{args.tol, args.eq_tol, args.no_migration};
  chorgame::GameCache cache(inst, opts);
  const chorgame::CoalitionEconomics& econ = cache.economics(s);
  emit(chorgame::report_envelope(
      "value", args.instance_path, inst, s, opts, args.epsilon,
      chorgame::value_report_json(inst, s, econ.price, econ.cost, econ.value)));
  std::cerr << "p = " << econ.price << ", Cost = " << econ.cost << ", v = " << econ.value
            << "\n";
  return kExitOk;
}

int run_schedule(const CommandArgs& args) {
  const chorgame::Instance inst = load_instance(args);
  const chorgame::Coalition s = select_coalition(inst, args.coalition_spec);
  chorgame::SolverOptions opts{args.tol, args.eq_tol, args.no_migration};
  const chorgame::PooledCoalition pooled = chorgame::pool_coalition(inst, s);
  const chorgame::ScheduleOutcome outcome = chorgame::coalition_cost(inst, s, opts);
  emit(chorgame::report_envelope("schedule", args.instance_path, inst, s, opts, args.epsilon,
                                 chorgame::schedule_report_json(inst, pooled, outcome)));
  std::cerr << "optimal cost " << outcome.total_cost << " over " << outcome.placement.size()
            << " placement piece(s)\n";
  return kExitOk;
}

int run_verify(const CommandArgs& args) {
  const chorgame::Instance inst = load_instance(args);
  const chorgame::Coalition s = select_coalition(inst, args.coalition_spec);
  chorgame::SolverOptions opts{args.tol, args.eq_tol, args.no_migration};
  chorgame::GameCache cache(inst, opts);
  const std::vector<double> x = parse_imputation(args.imputation_spec, s, inst.size());
  const chorgame::StabilityReport report =
      chorgame::stability_report(cache, s, x, args.epsilon);
  emit(chorgame::report_envelope("verify", args.instance_path, inst, s, opts, args.epsilon,
                                 chorgame::stability_report_json(inst, report)));
  if (report.all_checks_pass()) {
    std::cerr << "stable at epsilon = " << report.epsilon << "\n";
    return kExitOk;
  }
  std::cerr << "violations found";
  if (report.justified_objection)
    std::cerr << " (justified objection by "
              << inst.organizations[static_cast<std::size_t>(
                                        report.justified_objection->objector)]
                     .id
              << ")";
  std::cerr << "\n";
  return kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alliance detection and stable cost sharing for cooperative scheduling"};
  app.require_subcommand(1);

  CommandArgs args;
  CLI::App* analyze = app.add_subcommand("analyze", "detect whether the coalition is viable");
  add_common_options(analyze, args);
  CLI::App* value = app.add_subcommand("value", "price, cost and savings of a coalition");
  add_common_options(value, args);
  CLI::App* schedule = app.add_subcommand("schedule", "optimal pooled schedule of a coalition");
  add_common_options(schedule, args);
  CLI::App* verify = app.add_subcommand("verify", "stability checks for a payoff vector");
  add_common_options(verify, args);
  verify->add_option("-x,--imputation", args.imputation_spec,
                     "comma-separated payoffs for the coalition members, instance order")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) return run_analyze(args);
    if (value->parsed()) return run_value(args);
    if (schedule->parsed()) return run_schedule(args);
    if (verify->parsed()) return run_verify(args);
  } catch (const chorgame::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << " (best bound " << e.best_bound()
              << ")\n";
    return kExitSolver;
  } catch (const chorgame::ParseError& e) {
    std::cerr << "parse error at byte " << e.position() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const chorgame::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
