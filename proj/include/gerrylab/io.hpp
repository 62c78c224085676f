#pragma once

// Plan files, electorate files and report serialization.
//
// Plan file (exact format):
//   line 1: "g k"
//   line 2: g*g district ids, row-major, bottom row first, single spaces
//
// Electorate file: JSON, either lattice provenance
//   {"lattice": {"n": 8, "l": 3, "a": 5, "b": 4, "pattern": "checkerboard"},
//    "a_count": 320, "b_count": 256}
// or explicit points
//   {"a_points": [[x, y], ...], "b_points": [[x, y], ...]}

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gerrylab/electorate.hpp"
#include "gerrylab/error.hpp"
#include "gerrylab/grid.hpp"
#include "gerrylab/metrics.hpp"

namespace gerrylab {

using json = nlohmann::json;

inline std::string write_plan(const CellPartition& p) {
  std::string out = std::to_string(p.resolution()) + " " + std::to_string(p.districts()) + "\n";
  const auto& cells = p.assignment();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (c) out += ' ';
    out += std::to_string(cells[c]);
  }
  out += '\n';
  return out;
}

/// Parses a plan document and validates it; violations are FormatErrors.
inline CellPartition read_plan(const std::string& text) {
  std::istringstream in(text);
  std::string header, body;
  if (!std::getline(in, header)) throw FormatError("plan file: missing header line");
  std::getline(in, body);

  std::istringstream hs(header);
  long long g = 0, k = 0;
  std::string extra;
  if (!(hs >> g >> k) || (hs >> extra)) throw FormatError("plan file: header must be 'g k'");
  if (g < 1 || k < 1 || g > 4096) throw FormatError("plan file: g and k must be positive");

  std::vector<DistrictId> ids;
  ids.reserve(static_cast<std::size_t>(g * g));
  std::istringstream bs(body);
  long long id = 0;
  while (bs >> id) ids.push_back(static_cast<DistrictId>(id));
  if (!bs.eof()) throw FormatError("plan file: non-integer district id");

  CellPartition p(static_cast<int>(g), static_cast<int>(k), std::move(ids));
  if (auto v = validate_partition(p); !v.empty()) {
    throw FormatError("plan file: " + v.front().message);
  }
  return p;
}

inline json lattice_to_json(const LatticeParams& p) {
  return {{"n", p.n}, {"l", p.l}, {"a", p.a}, {"b", p.b}, {"pattern", to_string(p.pattern)}};
}

inline json electorate_to_json(const Electorate& e) {
  json doc;
  if (const auto& lat = e.provenance()) {
    doc["lattice"] = lattice_to_json(*lat);
    doc["a_count"] = e.a_count();
    doc["b_count"] = e.b_count();
    return doc;
  }
  auto points = [](const std::vector<Point>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({p.x, p.y});
    return arr;
  };
  doc["a_points"] = points(e.a_points());
  doc["b_points"] = points(e.b_points());
  return doc;
}

namespace detail {

inline std::vector<Point> points_from_json(const json& arr, const char* field) {
  if (!arr.is_array()) throw FormatError(std::string(field) + " must be an array");
  std::vector<Point> out;
  out.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number()) {
      throw FormatError(std::string(field) + " entries must be [x, y] pairs");
    }
    out.push_back({item[0].get<double>(), item[1].get<double>()});
  }
  return out;
}

inline std::int64_t int_field(const json& obj, const char* name) {
  if (!obj.contains(name) || !obj[name].is_number_integer()) {
    throw FormatError(std::string("missing integer field '") + name + "'");
  }
  return obj[name].get<std::int64_t>();
}

}  // namespace detail

inline LatticeParams lattice_from_json(const json& lat) {
  if (!lat.is_object()) throw FormatError("lattice must be an object");
  LatticeParams p{detail::int_field(lat, "n"), detail::int_field(lat, "l"),
                  detail::int_field(lat, "a"), detail::int_field(lat, "b")};
  if (lat.contains("pattern")) {
    const auto& pat = lat["pattern"];
    if (pat == "checkerboard") {
      p.pattern = LatticePattern::Checkerboard;
    } else if (pat == "row_major") {
      p.pattern = LatticePattern::RowMajor;
    } else {
      throw FormatError("unsupported lattice pattern");
    }
  }
  return p;
}

inline Electorate electorate_from_json(const json& doc) {
  if (!doc.is_object()) throw FormatError("electorate document must be an object");
  if (doc.contains("lattice")) {
    Electorate e = generate_lattice_electorate(lattice_from_json(doc["lattice"]));
    if (doc.contains("a_count") && detail::int_field(doc, "a_count") != e.a_count()) {
      throw FormatError("a_count does not match lattice provenance");
    }
    if (doc.contains("b_count") && detail::int_field(doc, "b_count") != e.b_count()) {
      throw FormatError("b_count does not match lattice provenance");
    }
    if (doc.contains("a_points") &&
        doc["a_points"].size() != static_cast<std::size_t>(e.a_count())) {
      throw FormatError("a_points count does not match lattice provenance");
    }
    if (doc.contains("b_points") &&
        doc["b_points"].size() != static_cast<std::size_t>(e.b_count())) {
      throw FormatError("b_points count does not match lattice provenance");
    }
    return e;
  }
  if (!doc.contains("a_points") || !doc.contains("b_points")) {
    throw FormatError("electorate needs either 'lattice' or 'a_points' and 'b_points'");
  }
  return Electorate(detail::points_from_json(doc["a_points"], "a_points"),
                    detail::points_from_json(doc["b_points"], "b_points"));
}

inline Electorate parse_electorate(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("electorate file: ") + e.what());
  }
  return electorate_from_json(doc);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
}

inline void save_electorate(const Electorate& e, const std::string& path) {
  write_file(path, electorate_to_json(e).dump() + "\n");
}

inline Electorate load_electorate(const std::string& path) {
  return parse_electorate(read_file(path));
}

inline void save_plan(const CellPartition& p, const std::string& path) {
  write_file(path, write_plan(p));
}

inline CellPartition load_plan(const std::string& path) { return read_plan(read_file(path)); }

inline json rational_to_json(const Rational& r) { return to_string(r); }

inline json report_to_json(const PlanReport& r) {
  json districts = json::array();
  for (std::size_t i = 0; i < r.tallies.size(); ++i) {
    const auto& t = r.tallies[i];
    const auto& s = r.shapes[i];
    json row = {{"id", t.id},
                {"pop", t.pop},
                {"a", t.a_count},
                {"b", t.b_count},
                {"winner", to_string(t.winner)},
                {"wasted_a", t.wasted_a},
                {"wasted_b", t.wasted_b},
                {"cells", s.cells},
                {"perimeter", rational_to_json(s.perimeter())},
                {"connected", s.connected}};
    if (const auto& pp = r.pp_scores[i]) {
      row["pp"] = pp->value();
      row["pp_over_pi"] = rational_to_json(pp->pi_multiple);
    } else {
      row["pp"] = nullptr;
      row["pp_over_pi"] = nullptr;
    }
    districts.push_back(std::move(row));
  }
  auto verdict = [](const DesideratumResult& d) {
    json j = {{"pass", d.pass}, {"detail", d.detail}};
    j["district"] = d.district ? json(*d.district) : json(nullptr);
    return j;
  };
  const auto& dz = r.desiderata;
  json out = {
      {"g", r.resolution},
      {"k", r.k},
      {"total_a", r.total_a},
      {"total_b", r.total_b},
      {"districts", std::move(districts)},
      {"eg", rational_to_json(r.eg)},
      {"eg_value", to_double(r.eg)},
      {"delta", rational_to_json(r.delta)},
      {"delta_value", to_double(r.delta)},
      {"imbalance", rational_to_json(r.imbalance)},
      {"seats", {{"a", r.seat_counts.a}, {"b", r.seat_counts.b}, {"ties", r.seat_counts.ties}}},
      {"empty_districts", r.empty_districts},
      {"desiderata",
       {{"params",
         {{"delta", dz.params.delta},
          {"C", dz.params.C},
          {"pp_floor", dz.params.pp_floor()},
          {"alpha", dz.params.alpha},
          {"beta", dz.params.beta}}},
        {"balance", verdict(dz.balance)},
        {"compactness", verdict(dz.compactness)},
        {"efficiency", verdict(dz.efficiency)},
        {"efficiency_clause_active", dz.efficiency_clause_active}}}};
  if (r.min_pp) {
    out["min_pp"] = r.min_pp->value();
    out["min_pp_over_pi"] = rational_to_json(r.min_pp->pi_multiple);
  } else {
    out["min_pp"] = nullptr;
    out["min_pp_over_pi"] = nullptr;
  }
  return out;
}

inline std::string report_to_text(const PlanReport& r) {
  std::ostringstream out;
  out << "# id pop a b winner wasted_a wasted_b pp\n";
  for (std::size_t i = 0; i < r.tallies.size(); ++i) {
    const auto& t = r.tallies[i];
    out << t.id << ' ' << t.pop << ' ' << t.a_count << ' ' << t.b_count << ' '
        << to_string(t.winner) << ' ' << t.wasted_a << ' ' << t.wasted_b << ' ';
    if (const auto& pp = r.pp_scores[i]) {
      out << pp->value();
    } else {
      out << "empty";
    }
    out << '\n';
  }
  out << "eg " << to_string(r.eg) << " (" << to_double(r.eg) << ")\n";
  out << "delta " << to_string(r.delta) << " (" << to_double(r.delta) << ")\n";
  out << "min_pp " << (r.min_pp ? std::to_string(r.min_pp->value()) : "none") << '\n';
  out << "seats " << r.seat_counts.a << ' ' << r.seat_counts.b << ' ' << r.seat_counts.ties
      << '\n';
  const auto& dz = r.desiderata;
  auto pf = [](bool b) { return b ? "pass" : "fail"; };
  out << "balance " << pf(dz.balance.pass) << " delta<=" << dz.params.delta << '\n';
  out << "compactness " << pf(dz.compactness.pass) << " C=" << dz.params.C
      << " pp_floor=" << dz.params.pp_floor() << '\n';
  out << "efficiency " << pf(dz.efficiency.pass) << " alpha=" << dz.params.alpha
      << " beta=" << dz.params.beta
      << (dz.efficiency_clause_active ? "" : " (inactive)") << '\n';
  return out.str();
}

}  // namespace gerrylab
