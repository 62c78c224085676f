#pragma once

// In-memory editing sessions behind the HTTP service. Each session owns an
// electorate, a raster plan and the report for its current revision.
// Mutations hold the session's write lock; reads share it.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/io.hpp"
#include "gerrylab/metrics.hpp"
#include "gerrylab/optimizer.hpp"
#include "gerrylab/splitline.hpp"

namespace gerrylab {

/// Failure carrying an HTTP status: 400 malformed body, 404 unknown
/// session, 409 stale revision, 422 invalid or infeasible request.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message)
      : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

inline constexpr int kMaxSessionResolution = 512;
inline constexpr std::int64_t kMaxSessionAnnealSteps = 10'000'000;

struct Session {
  std::string id;
  Electorate electorate;
  CellTally tally;
  int g = 1;
  int k = 1;
  DesiderataParams params;
  CellPartition plan;
  PlanReport report;
  std::int64_t revision = 0;
  mutable std::shared_mutex mutex;
};

namespace detail {

inline const json& body_field(const json& body, const char* name) {
  if (!body.contains(name)) throw ApiError(400, std::string("missing field '") + name + "'");
  return body[name];
}

inline std::int64_t body_int(const json& body, const char* name) {
  const json& v = body_field(body, name);
  if (!v.is_number_integer()) throw ApiError(400, std::string("field '") + name + "' must be an integer");
  return v.get<std::int64_t>();
}

template <class T>
T body_number_or(const json& body, const char* name, T fallback) {
  if (!body.contains(name)) return fallback;
  const json& v = body[name];
  if (!v.is_number()) throw ApiError(400, std::string("field '") + name + "' must be a number");
  return v.get<T>();
}

inline void check_revision(const json& body, const Session& s) {
  if (!body.contains("expected_revision")) return;
  const std::int64_t expected = body_int(body, "expected_revision");
  if (expected != s.revision) {
    throw ApiError(409, "revision conflict: expected " + std::to_string(expected) + ", current " +
                            std::to_string(s.revision));
  }
}

// Label-blind start: k bands of consecutive cells in row-major order.
inline CellPartition banded_plan(int g, int k) {
  const std::size_t cells = CellPartition::cell_count_for(g);
  std::vector<DistrictId> ids(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    ids[c] = static_cast<DistrictId>(c * static_cast<std::size_t>(k) / cells) + 1;
  }
  return CellPartition(g, k, std::move(ids));
}

inline DesiderataParams params_from_json(const json& body) {
  DesiderataParams p;
  if (!body.contains("desiderata")) return p;
  const json& d = body["desiderata"];
  if (!d.is_object()) throw ApiError(400, "desiderata must be an object");
  p.delta = body_number_or(d, "delta", p.delta);
  p.C = body_number_or(d, "C", p.C);
  p.alpha = body_number_or(d, "alpha", p.alpha);
  p.beta = body_number_or(d, "beta", p.beta);
  return p;
}

inline void refresh(Session& s) { s.report = make_report(s.tally, s.plan, s.params); }

inline json state_json(const Session& s) {
  return {{"id", s.id},
          {"revision", s.revision},
          {"g", s.g},
          {"k", s.k},
          {"assignment", s.plan.assignment()},
          {"report", report_to_json(s.report)}};
}

inline json metrics_json(const Session& s) {
  return {{"id", s.id}, {"revision", s.revision}, {"report", report_to_json(s.report)}};
}

}  // namespace detail

class SessionRegistry {
 public:
  SessionRegistry() : rng_(std::random_device{}()) {}

  /// Body: {"n","l","a","b"[,"pattern"]} or {"electorate": <electorate doc>},
  /// plus "g", "k" and optional "desiderata". Starts from a banded plan.
  json create(const json& body) {
    if (!body.is_object()) throw ApiError(400, "request body must be an object");
    auto s = std::make_shared<Session>();
    try {
      if (body.contains("electorate")) {
        s->electorate = electorate_from_json(body["electorate"]);
      } else {
        s->electorate = generate_lattice_electorate(lattice_from_json(body));
      }
    } catch (const FormatError& e) {
      throw ApiError(400, e.what());
    } catch (const DomainError& e) {
      throw ApiError(422, e.what());
    }
    const std::int64_t g = detail::body_int(body, "g");
    const std::int64_t k = detail::body_int(body, "k");
    if (g < 1 || g > kMaxSessionResolution) {
      throw ApiError(422, "g must lie in 1.." + std::to_string(kMaxSessionResolution));
    }
    if (k < 1 || k > g * g) throw ApiError(422, "k must lie in 1..g^2");
    s->g = static_cast<int>(g);
    s->k = static_cast<int>(k);
    s->params = detail::params_from_json(body);
    try {
      s->params.validate();
      s->tally = s->electorate.tally(s->g);
      s->plan = detail::banded_plan(s->g, s->k);
      detail::refresh(*s);
    } catch (const DomainError& e) {
      throw ApiError(422, e.what());
    }

    std::unique_lock lock(mutex_);
    do {
      s->id = make_id();
    } while (sessions_.count(s->id));
    sessions_[s->id] = s;
    std::shared_lock read(s->mutex);
    return detail::state_json(*s);
  }

  json get_state(const std::string& id) const {
    auto s = find(id);
    std::shared_lock lock(s->mutex);
    return detail::state_json(*s);
  }

  json get_metrics(const std::string& id) const {
    auto s = find(id);
    std::shared_lock lock(s->mutex);
    return detail::metrics_json(*s);
  }

  json get_electorate(const std::string& id) const {
    auto s = find(id);
    std::shared_lock lock(s->mutex);
    return electorate_to_json(s->electorate);
  }

  /// Body: {"cells": [[cell, district], ...] or [{"cell","district"}, ...],
  /// "expected_revision"?}. All-or-nothing; the revision moves only when
  /// some cell changes district. Painting may empty a district.
  json paint_cells(const std::string& id, const json& body) {
    auto s = find(id);
    std::unique_lock lock(s->mutex);
    if (!body.is_object()) throw ApiError(400, "request body must be an object");
    detail::check_revision(body, *s);
    const json& cells = detail::body_field(body, "cells");
    if (!cells.is_array()) throw ApiError(400, "cells must be an array");

    std::vector<std::pair<std::size_t, DistrictId>> changes;
    changes.reserve(cells.size());
    for (const auto& item : cells) {
      json cell, district;
      if (item.is_array() && item.size() == 2) {
        cell = item[0];
        district = item[1];
      } else if (item.is_object() && item.contains("cell") && item.contains("district")) {
        cell = item["cell"];
        district = item["district"];
      } else {
        throw ApiError(400, "cells entries must be [cell, district] pairs");
      }
      if (!cell.is_number_integer() || !district.is_number_integer()) {
        throw ApiError(400, "cell and district must be integers");
      }
      const auto c = cell.get<std::int64_t>();
      const auto d = district.get<std::int64_t>();
      if (c < 0 || c >= static_cast<std::int64_t>(s->plan.cell_count())) {
        throw ApiError(422, "cell index " + std::to_string(c) + " out of range");
      }
      if (d < 1 || d > s->k) {
        throw ApiError(422, "district id " + std::to_string(d) + " outside 1.." +
                                std::to_string(s->k));
      }
      changes.emplace_back(static_cast<std::size_t>(c), static_cast<DistrictId>(d));
    }

    bool changed = false;
    for (const auto& [c, d] : changes) {
      if (s->plan[c] != d) {
        s->plan.assign(c, d);
        changed = true;
      }
    }
    if (changed) {
      ++s->revision;
      detail::refresh(*s);
    }
    return detail::state_json(*s);
  }

  /// Body (all optional): angle_steps, population_tolerance, balance_slack,
  /// expected_revision.
  json run_splitline(const std::string& id, const json& body) {
    auto s = find(id);
    std::unique_lock lock(s->mutex);
    if (!body.is_object()) throw ApiError(400, "request body must be an object");
    detail::check_revision(body, *s);
    SplitlineConfig cfg;
    cfg.angle_steps = detail::body_number_or(body, "angle_steps", cfg.angle_steps);
    cfg.population_tolerance =
        detail::body_number_or(body, "population_tolerance", cfg.population_tolerance);
    cfg.balance_slack = detail::body_number_or(body, "balance_slack", cfg.balance_slack);
    try {
      s->plan = shortest_splitline(s->tally, s->k, cfg);
    } catch (const DomainError& e) {
      throw ApiError(422, e.what());
    }
    ++s->revision;
    detail::refresh(*s);
    return detail::state_json(*s);
  }

  /// Body (all optional): seed, steps, t_initial, t_final, pp_floor,
  /// delta_cap, weights {pop, pp, conn}, start ("current" or "fresh"),
  /// expected_revision. "current" continues from the session plan when it
  /// has no empty district.
  json run_anneal(const std::string& id, const json& body) {
    auto s = find(id);
    std::unique_lock lock(s->mutex);
    if (!body.is_object()) throw ApiError(400, "request body must be an object");
    detail::check_revision(body, *s);
    AnnealConfig cfg;
    cfg.seed = detail::body_number_or<std::uint64_t>(body, "seed", cfg.seed);
    cfg.steps = detail::body_number_or(body, "steps", cfg.steps);
    cfg.t_initial = detail::body_number_or(body, "t_initial", cfg.t_initial);
    cfg.t_final = detail::body_number_or(body, "t_final", cfg.t_final);
    cfg.pp_floor = detail::body_number_or(body, "pp_floor", cfg.pp_floor);
    cfg.delta_cap = detail::body_number_or(body, "delta_cap", cfg.delta_cap);
    if (body.contains("weights")) {
      const json& w = body["weights"];
      if (!w.is_object()) throw ApiError(400, "weights must be an object");
      cfg.weights.pop = detail::body_number_or(w, "pop", cfg.weights.pop);
      cfg.weights.pp = detail::body_number_or(w, "pp", cfg.weights.pp);
      cfg.weights.conn = detail::body_number_or(w, "conn", cfg.weights.conn);
    }
    cfg.trace_every = std::max<std::int64_t>(1, cfg.steps / 100);
    if (cfg.steps > kMaxSessionAnnealSteps) {
      throw ApiError(422, "steps must not exceed " + std::to_string(kMaxSessionAnnealSteps));
    }
    std::string start = "current";
    if (body.contains("start")) {
      if (!body["start"].is_string()) throw ApiError(400, "start must be a string");
      start = body["start"].get<std::string>();
      if (start != "current" && start != "fresh") {
        throw ApiError(400, "start must be 'current' or 'fresh'");
      }
    }
    std::optional<CellPartition> initial;
    if (start == "current" && validate_partition(s->plan).empty()) initial = s->plan;
    AnnealResult result;
    try {
      result = anneal(s->tally, s->k, cfg, std::move(initial));
    } catch (const DomainError& e) {
      throw ApiError(422, e.what());
    }
    s->plan = std::move(result.plan);
    ++s->revision;
    detail::refresh(*s);
    json out = detail::state_json(*s);
    out["anneal"] = {{"objective", result.objective}, {"feasible", result.feasible}};
    return out;
  }

  void remove(const std::string& id) {
    std::unique_lock lock(mutex_);
    if (sessions_.erase(id) == 0) throw ApiError(404, "unknown session " + id);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
  }

 private:
  std::shared_ptr<Session> find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ApiError(404, "unknown session " + id);
    return it->second;
  }

  // Caller holds mutex_ exclusively.
  std::string make_id() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t v = rng_();
    std::string id(16, '0');
    for (auto& ch : id) {
      ch = kHex[v & 15];
      v >>= 4;
    }
    return id;
  }

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_;
};

}  // namespace gerrylab
