#pragma once

#include <json.hpp>

#include "fockpres/fock.hpp"
#include "fockpres/leeyang.hpp"
#include "fockpres/linop.hpp"
#include "fockpres/mpoly.hpp"
#include "fockpres/stability.hpp"

// JSON schemas (object keys emitted in a fixed order, so output is
// byte-stable for a given input):
//
// MPoly    {"nvars": n, "max_degree": d|null,
//           "terms": [{"alpha": [..], "re": x, "im": y}, ...]}  graded-lex
// Symbol   MPoly fields plus {"degree": D, "z_count": m, "w_count": n}
// Verdict  {"outcome": "certified_no"|"probably_yes"|"certified_yes",
//           "witness": [{"re","im"},..], "value": {"re","im"},
//           "trials": n, "seed": s, "method": "...", "notes": "..."}
// LinOp    {"kind": "table"|"diagonal"|"diff"|"mult"|"compose"|"tensor_extend", ...}
// SpinModel{"J": [[..]], "sites": [{"kind": "two_atom", "a":.., "b":..}, ...]}
// GaussianForm {"matrix": [[..]], "scale": c}

namespace fockpres {

using json = nlohmann::ordered_json;

json to_json(const MPoly& p);
MPoly mpoly_from_json(const json& j);

json to_json(const OpSymbol& s);
OpSymbol symbol_from_json(const json& j);

json to_json(const Verdict& v);
Verdict verdict_from_json(const json& j);

json to_json(const LinOp& op);
LinOp linop_from_json(const json& j);

json to_json(const SpinModel& m);
SpinModel spin_model_from_json(const json& j);
Measure1D measure_from_json(const json& j);
json to_json(const Measure1D& mu);

json to_json(const GaussianForm& g);
GaussianForm gaussian_form_from_json(const json& j);

json to_json(const PreserverReport& r);

// Parses with a line/column diagnostic on failure (std::invalid_argument).
json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace fockpres
