#pragma once

#include <iosfwd>

#include "json.hpp"

#include "bmit/discretize.hpp"
#include "bmit/multires.hpp"

namespace bmit {

/// {"x":[...], "y":[...], "cond":{"name":[...]}}
nlohmann::json boundaries_json(const BoundarySet& b, const AxisVars& vars);
BoundarySet boundaries_from_json(const nlohmann::json& j, const AxisVars& vars);

nlohmann::json move_json(const Move& m, const AxisVars& vars);

/// {"t", "p", "move", "q_max", "resolution", "weight", "posterior_independence",
///  "n_candidates", "grid"}
nlohmann::json trace_record_json(const TraceRecord& rec, const AxisVars& vars);

/// One compact JSON object per line, one line per iteration.
void write_trace_jsonl(std::ostream& out, const IndependenceResult& result);

}  // namespace bmit
