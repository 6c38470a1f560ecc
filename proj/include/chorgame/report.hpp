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

#ifndef CHORGAME_REPORT_HPP
#define CHORGAME_REPORT_HPP

/// \file report.hpp
/// \brief Machine-readable reports: JSON payloads for every command, emitted
///        deterministically with 17 significant digits per real so identical
///        runs produce byte-identical output and values round-trip exactly.

#include <cmath>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "chorgame/coalition_cost.hpp"
#include "chorgame/game.hpp"
#include "chorgame/instance.hpp"
#include "chorgame/stability.hpp"

namespace chorgame {

inline constexpr const char* kToolVersion = "0.1.0";

namespace detail {

inline void dump_report_value(const nlohmann::ordered_json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) { out += "{}"; return; }
      out += "{\n";
      bool first = true;
      for (const auto& item : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + nlohmann::json(item.key()).dump() + ": ";
        dump_report_value(item.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) { out += "[]"; return; }
      out += "[\n";
      bool first = true;
      for (const auto& item : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_report_value(item, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::ordered_json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) { out += "null"; return; }
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();  // integers, booleans, strings, null
      return;
  }
}

}  // namespace detail

/// Serializes a report document; every real carries 17 significant digits.
inline std::string dump_report(const nlohmann::ordered_json& j) {
  std::string out;
  detail::dump_report_value(j, out, 0);
  out += "\n";
  return out;
}

namespace detail {

inline nlohmann::ordered_json id_array(const Instance& inst, const Coalition& c) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (int k : c.members())
    arr.push_back(inst.organizations[static_cast<std::size_t>(k)].id);
  return arr;
}

inline nlohmann::ordered_json id_map(const Instance& inst, const std::map<int, double>& m) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m)
    obj[inst.organizations[static_cast<std::size_t>(k)].id] = v;
  return obj;
}

}  // namespace detail

inline nlohmann::ordered_json alliance_report_json(const Instance& inst,
                                                   const AllianceReport& report) {
  nlohmann::ordered_json j;
  j["feasible"] = report.feasible;
  j["no_savings"] = report.no_savings;
  j["coalition"] = detail::id_array(inst, report.analyzed);
  j["pivotal_set"] = detail::id_array(inst, report.pivotal);
  j["grand_value"] = report.grand_value;
  if (report.imputation.empty()) {
    j["imputation"] = nullptr;
  } else {
    nlohmann::ordered_json imp = nlohmann::ordered_json::object();
    for (int k : report.analyzed.members())
      imp[inst.organizations[static_cast<std::size_t>(k)].id] =
          report.imputation[static_cast<std::size_t>(k)];
    j["imputation"] = std::move(imp);
  }
  j["efficiency_gap"] = report.efficiency_gap;
  j["cost_shares"] = detail::id_map(inst, report.cost_shares);
  nlohmann::ordered_json incentive = nlohmann::ordered_json::object();
  for (const auto& [k, ok] : report.incentive)
    incentive[inst.organizations[static_cast<std::size_t>(k)].id] = ok;
  j["incentive"] = std::move(incentive);
  j["failed_gate"] = report.failed_gate.empty() ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(report.failed_gate);
  nlohmann::ordered_json negatives = nlohmann::ordered_json::array();
  for (int k : report.negative_components)
    negatives.push_back(inst.organizations[static_cast<std::size_t>(k)].id);
  j["negative_components"] = std::move(negatives);
  j["equality_tolerance"] = report.equality_tolerance;
  return j;
}

inline nlohmann::ordered_json value_report_json(const Instance& inst, const Coalition& c,
                                                double price, double cost, double value) {
  nlohmann::ordered_json j;
  j["coalition"] = detail::id_array(inst, c);
  j["price"] = price;
  j["cost"] = cost;
  j["value"] = value;
  return j;
}

inline nlohmann::ordered_json schedule_report_json(const Instance& inst,
                                                   const PooledCoalition& pooled,
                                                   const ScheduleOutcome& outcome) {
  nlohmann::ordered_json j;
  j["total_cost"] = outcome.total_cost;
  j["per_org_cost"] = detail::id_map(inst, outcome.per_org_cost);
  nlohmann::ordered_json placement = nlohmann::ordered_json::array();
  const bool energy = inst.objective == Objective::SumEnergy;
  for (const PlacementPiece& piece : outcome.placement) {
    const PooledJob& job = pooled.jobs[static_cast<std::size_t>(piece.job)];
    nlohmann::ordered_json p;
    p["job_org"] = inst.organizations[static_cast<std::size_t>(job.org)].id;
    p["job_index"] = job.index;
    p["machine"] = piece.machine;
    p["machine_owner"] =
        inst.organizations[static_cast<std::size_t>(
                               pooled.machine_owner[static_cast<std::size_t>(piece.machine)])]
            .id;
    p["start"] = piece.start;
    p["end"] = piece.end;
    if (energy) p["speed"] = piece.speed;
    placement.push_back(std::move(p));
  }
  j["placement"] = std::move(placement);
  return j;
}

inline nlohmann::ordered_json stability_report_json(const Instance& inst,
                                                    const StabilityReport& report) {
  nlohmann::ordered_json j;
  j["null_payment_ok"] = report.null_payment_ok;
  j["nonnegativity_ok"] = report.nonnegativity_ok;
  j["pivotal_set"] = detail::id_array(inst, report.pivotal);
  nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
  for (const auto& row : report.counter_condition_matrix) {
    nlohmann::ordered_json jrow = nlohmann::ordered_json::array();
    for (bool ok : row) jrow.push_back(ok);
    matrix.push_back(std::move(jrow));
  }
  j["counter_condition_matrix"] = std::move(matrix);
  if (report.justified_objection) {
    const Objection& obj = *report.justified_objection;
    nlohmann::ordered_json o;
    o["objector"] = inst.organizations[static_cast<std::size_t>(obj.objector)].id;
    o["target"] = inst.organizations[static_cast<std::size_t>(obj.target)].id;
    o["coalition"] = detail::id_array(inst, obj.coalition);
    nlohmann::ordered_json payoff = nlohmann::ordered_json::object();
    for (int k : obj.coalition.members())
      payoff[inst.organizations[static_cast<std::size_t>(k)].id] =
          obj.payoff[static_cast<std::size_t>(k)];
    o["payoff"] = std::move(payoff);
    j["justified_objection"] = std::move(o);
  } else {
    j["justified_objection"] = nullptr;
  }
  j["all_checks_pass"] = report.all_checks_pass();
  nlohmann::ordered_json search;
  search["epsilon"] = report.epsilon;
  search["feasibility_method"] = report.feasibility_method;
  j["search"] = std::move(search);
  return j;
}

/// Common envelope around every command's payload.
inline nlohmann::ordered_json report_envelope(const std::string& command,
                                              const std::string& instance_path,
                                              const Instance& inst, const Coalition& coalition,
                                              const SolverOptions& opts, double epsilon,
                                              nlohmann::ordered_json payload) {
  nlohmann::ordered_json j;
  j["tool"] = "chorgame";
  j["version"] = kToolVersion;
  j["command"] = command;
  nlohmann::ordered_json digest;
  digest["path"] = instance_path;
  digest["organizations"] = inst.size();
  digest["objective"] = to_string(inst.objective);
  digest["alpha"] = inst.alpha ? nlohmann::ordered_json(*inst.alpha)
                               : nlohmann::ordered_json(nullptr);
  std::size_t jobs = 0;
  for (const Organization& org : inst.organizations) jobs += org.jobs.size();
  digest["jobs"] = jobs;
  j["instance"] = std::move(digest);
  nlohmann::ordered_json params;
  params["coalition"] = detail::id_array(inst, coalition);
  params["tol"] = opts.tol;
  params["eq_tol"] = opts.eq_tol;
  params["epsilon"] = epsilon;
  params["no_migration"] = opts.no_migration;
  j["parameters"] = std::move(params);
  j["result"] = std::move(payload);
  return j;
}

}  // namespace chorgame

#endif  // CHORGAME_REPORT_HPP
