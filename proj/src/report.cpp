#include "bmit/report.hpp"

#include <ostream>

namespace bmit {

using nlohmann::json;

json boundaries_json(const BoundarySet& b, const AxisVars& vars) {
  json cond = json::object();
  for (std::size_t k = 0; k < vars.cond.size(); ++k) cond[vars.cond[k]] = b.cond.at(k);
  return json{{"x", b.x}, {"y", b.y}, {"cond", cond}};
}

BoundarySet boundaries_from_json(const json& j, const AxisVars& vars) {
  BoundarySet b = BoundarySet::empty(vars.cond.size());
  b.x = j.at("x").get<std::vector<double>>();
  b.y = j.at("y").get<std::vector<double>>();
  if (j.contains("cond")) {
    for (std::size_t k = 0; k < vars.cond.size(); ++k) {
      if (j["cond"].contains(vars.cond[k])) b.cond[k] = j["cond"][vars.cond[k]].get<std::vector<double>>();
    }
  }
  return b;
}

json move_json(const Move& m, const AxisVars& vars) {
  if (m.kind == Move::Kind::xy) {
    return json{{"type", "xy"}, {"x", m.x}, {"y", m.y}, {"x_index", m.x_index}, {"y_index", m.y_index}};
  }
  json cuts = json::object();
  for (const auto& c : m.cond) cuts[vars.name(c.axis)] = c.position;
  return json{{"type", "cond"}, {"cond", cuts}};
}

json trace_record_json(const TraceRecord& rec, const AxisVars& vars) {
  return json{{"t", rec.t},
              {"p", rec.p},
              {"move", move_json(rec.move, vars)},
              {"q_max", rec.q_max},
              {"resolution", rec.resolution},
              {"weight", rec.move.weight},
              {"posterior_independence", rec.posterior_independence},
              {"n_candidates", rec.n_candidates},
              {"grid", boundaries_json(rec.boundaries, vars)}};
}

void write_trace_jsonl(std::ostream& out, const IndependenceResult& result) {
  for (const auto& rec : result.trace) out << trace_record_json(rec, result.vars).dump() << '\n';
}

}  // namespace bmit
