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

#ifndef CHORGAME_INSTANCE_HPP
#define CHORGAME_INSTANCE_HPP

/// \file instance.hpp
/// \brief Problem instances: organizations, their machines and jobs, plus
///        JSON ingestion, validation and canonical serialization.
///
/// An instance describes N organizations that share a common scheduling
/// objective.  Instances are immutable after construction and safe for
/// shared read access from any number of threads.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace chorgame {

/// Scheduling objective shared by every organization of an instance.
enum class Objective {
  SumCompletion,  ///< minimize the sum of job completion times
  SumEnergy       ///< minimize total energy under speed scaling
};

inline const char* to_string(Objective o) {
  return o == Objective::SumCompletion ? "sum_completion" : "sum_energy";
}

/// A single job. All release dates are 0.
struct Job {
  double volume = 1.0;               ///< processing volume (work units)
  std::optional<double> deadline;    ///< required for the energy objective
  std::optional<double> proc_time;   ///< required for the completion objective

  friend bool operator==(const Job&, const Job&) = default;
};

struct Organization {
  std::string id;
  int machine_count = 1;
  std::vector<Job> jobs;

  friend bool operator==(const Organization&, const Organization&) = default;
};

/// A full problem instance. Organization order in the file defines the
/// canonical index used in coalitions and imputation vectors.
struct Instance {
  Objective objective = Objective::SumEnergy;
  std::optional<double> alpha;  ///< power exponent, > 1; energy objective only
  std::vector<Organization> organizations;

  int size() const { return static_cast<int>(organizations.size()); }

  /// Index of the organization with the given id, or -1 if unknown.
  int organization_index(std::string_view id) const {
    for (int k = 0; k < size(); ++k)
      if (organizations[k].id == id) return k;
    return -1;
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// A duplicate-free, ascending set of organization indices.
class Coalition {
 public:
  Coalition() = default;

  explicit Coalition(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty() && members_.front() < 0)
      throw std::invalid_argument("coalition members must be non-negative indices");
  }

  static Coalition all(int n) {
    std::vector<int> m(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k)] = k;
    return Coalition(std::move(m));
  }

  static Coalition from_mask(std::uint64_t mask) {
    std::vector<int> m;
    for (int k = 0; mask != 0; ++k, mask >>= 1)
      if (mask & 1u) m.push_back(k);
    return Coalition(std::move(m));
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int k : members_) m |= std::uint64_t{1} << k;
    return m;
  }

  bool contains(int k) const {
    return std::binary_search(members_.begin(), members_.end(), k);
  }

  Coalition without(int k) const {
    std::vector<int> m;
    m.reserve(members_.size());
    for (int j : members_)
      if (j != k) m.push_back(j);
    return Coalition(std::move(m));
  }

  Coalition with(int k) const {
    std::vector<int> m = members_;
    m.push_back(k);
    return Coalition(std::move(m));
  }

  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }

  friend bool operator==(const Coalition&, const Coalition&) = default;

 private:
  std::vector<int> members_;
};

/// Malformed instance document (position is a byte offset into the input).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Structurally valid document that violates an instance invariant.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid instance:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

/// Returns every violated invariant; empty means the instance is valid.
/// Violations are data, not failures: this never throws.
inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> out;
  auto fail = [&out](const std::string& msg) { out.push_back(msg); };

  if (inst.organizations.empty()) fail("organizations: at least one organization required");
  const bool energy = inst.objective == Objective::SumEnergy;
  if (energy && !inst.alpha) fail("alpha required for the sum_energy objective");
  if (inst.alpha && !(*inst.alpha > 1.0)) fail("alpha must exceed 1");

  for (int k = 0; k < inst.size(); ++k) {
    const Organization& org = inst.organizations[static_cast<std::size_t>(k)];
    const std::string where = "organizations[" + std::to_string(k) + "]";
    if (org.id.empty()) fail(where + ": id must be non-empty");
    for (int j = 0; j < k; ++j)
      if (inst.organizations[static_cast<std::size_t>(j)].id == org.id) {
        fail("organizations: duplicate id " + org.id);
        break;
      }
    if (org.machine_count < 1) fail(where + ": machine_count must be >= 1");
    for (std::size_t i = 0; i < org.jobs.size(); ++i) {
      const Job& job = org.jobs[i];
      const std::string jwhere = where + ".jobs[" + std::to_string(i) + "]";
      if (!(job.volume > 0)) fail(jwhere + ": volume must be positive");
      if (job.deadline && !(*job.deadline > 0)) fail(jwhere + ": deadline must be positive");
      if (job.proc_time && !(*job.proc_time > 0)) fail(jwhere + ": proc_time must be positive");
      if (energy && !job.deadline) fail(jwhere + ": deadline missing for energy objective");
      if (!energy && !job.proc_time) fail(jwhere + ": proc_time missing for completion objective");
    }
  }
  return out;
}

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) { known = true; break; }
    if (!known)
      throw ValidationError({where + ": unknown key \"" + item.key() + "\""});
  }
}

inline double require_positive_number(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number())
    throw ValidationError({where + ": expected a number"});
  return j.get<double>();
}

}  // namespace detail

/// Parses and validates a JSON instance document. Unknown keys are rejected
/// (strict mode) to surface typos. Throws ParseError on malformed JSON and
/// ValidationError on violated invariants.
inline Instance parse_instance(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
  if (!doc.is_object()) throw ValidationError({"top level: expected an object"});
  detail::reject_unknown_keys(doc, {"objective", "alpha", "organizations"}, "top level");

  Instance inst;
  if (!doc.contains("objective") || !doc["objective"].is_string())
    throw ValidationError({"objective: required, one of \"sum_energy\" or \"sum_completion\""});
  const std::string obj = doc["objective"].get<std::string>();
  if (obj == "sum_energy")
    inst.objective = Objective::SumEnergy;
  else if (obj == "sum_completion")
    inst.objective = Objective::SumCompletion;
  else
    throw ValidationError({"objective: unknown value \"" + obj + "\""});

  if (doc.contains("alpha"))
    inst.alpha = detail::require_positive_number(doc["alpha"], "alpha");

  if (!doc.contains("organizations") || !doc["organizations"].is_array())
    throw ValidationError({"organizations: required array"});
  for (std::size_t k = 0; k < doc["organizations"].size(); ++k) {
    const auto& jorg = doc["organizations"][k];
    const std::string where = "organizations[" + std::to_string(k) + "]";
    if (!jorg.is_object()) throw ValidationError({where + ": expected an object"});
    detail::reject_unknown_keys(jorg, {"id", "machines", "jobs"}, where);
    Organization org;
    if (!jorg.contains("id") || !jorg["id"].is_string())
      throw ValidationError({where + ": id required (string)"});
    org.id = jorg["id"].get<std::string>();
    if (!jorg.contains("machines") || !jorg["machines"].is_number_integer())
      throw ValidationError({where + ": machines required (integer)"});
    org.machine_count = jorg["machines"].get<int>();
    if (jorg.contains("jobs")) {
      if (!jorg["jobs"].is_array()) throw ValidationError({where + ".jobs: expected an array"});
      for (std::size_t i = 0; i < jorg["jobs"].size(); ++i) {
        const auto& jjob = jorg["jobs"][i];
        const std::string jwhere = where + ".jobs[" + std::to_string(i) + "]";
        if (!jjob.is_object()) throw ValidationError({jwhere + ": expected an object"});
        detail::reject_unknown_keys(jjob, {"volume", "deadline", "proc_time"}, jwhere);
        Job job;
        if (jjob.contains("volume"))
          job.volume = detail::require_positive_number(jjob["volume"], jwhere + ".volume");
        if (jjob.contains("deadline"))
          job.deadline = detail::require_positive_number(jjob["deadline"], jwhere + ".deadline");
        if (jjob.contains("proc_time"))
          job.proc_time = detail::require_positive_number(jjob["proc_time"], jwhere + ".proc_time");
        org.jobs.push_back(job);
      }
    }
    inst.organizations.push_back(std::move(org));
  }

  if (auto violations = validate_instance(inst); !violations.empty())
    throw ValidationError(std::move(violations));
  return inst;
}

/// Canonical serialization; parse(serialize(inst)) == inst, and
/// serialize(parse(text)) is a fixed point of parse-then-serialize.
inline std::string serialize_instance(const Instance& inst) {
  nlohmann::ordered_json doc;
  doc["objective"] = to_string(inst.objective);
  if (inst.alpha) doc["alpha"] = *inst.alpha;
  doc["organizations"] = nlohmann::ordered_json::array();
  for (const Organization& org : inst.organizations) {
    nlohmann::ordered_json jorg;
    jorg["id"] = org.id;
    jorg["machines"] = org.machine_count;
    jorg["jobs"] = nlohmann::ordered_json::array();
    for (const Job& job : org.jobs) {
      nlohmann::ordered_json jjob;
      jjob["volume"] = job.volume;
      if (job.deadline) jjob["deadline"] = *job.deadline;
      if (job.proc_time) jjob["proc_time"] = *job.proc_time;
      jorg["jobs"].push_back(std::move(jjob));
    }
    doc["organizations"].push_back(std::move(jorg));
  }
  return doc.dump(2) + "\n";
}

}  // namespace chorgame

#endif  // CHORGAME_INSTANCE_HPP
