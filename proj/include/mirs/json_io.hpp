#pragma once

#include "mirs/appell.hpp"
#include "mirs/hierarchy.hpp"
#include "mirs/noise_sim.hpp"
#include "mirs/recentering.hpp"

#include <json.hpp>

#include <string>

namespace mirs::io {

using Json = nlohmann::ordered_json;

/// Parses a file; ValidationError with the path in the message on failure.
Json read_json_file(const std::string& path);

/// Rationals travel as strings "p/q"; plain JSON integers are accepted on input.
Rational rational_from_json(const Json& j, const std::string& where);
Json to_json(const Rational& r);

/// {"d": 3, "kmin": 3, "alpha": "-11/20", "kappa": "1/100", "pbar"?: "...", "kmax"?: 5}
/// Missing fields take the defaults.
StructureParams params_from_json(const Json& j);
Json to_json(const StructureParams& p);

/// {"k": {"3": 2}, "n": [{"idx": [1,0,0,0], "mult": 2}]}
Multiindex multiindex_from_json(const Json& j, const StructureParams& p);
Json to_json(const Multiindex& m);

PolyIndex polyindex_from_json(const Json& j, const StructureParams& p);

/// {"const": "p/q", "alpha": "p/q", "kappa": "p/q"}
Json to_json(const LinearForm& f);

/// [{"symbols": [["p", 1]], "rational": "2"}]; a bare rational string is
/// accepted as a constant.
Coefficient coefficient_from_json(const Json& j);
Json to_json(const Coefficient& c);

/// [{"beta": <multiindex>, "coeff": <coefficient>}]
FormalSeries series_from_json(const Json& j, const StructureParams& p);
Json to_json(const FormalSeries& s);

/// {"strict": false, "entries": [{"n": [0,0,0,0], "beta": <multiindex>, "value": <coefficient>}]}
PiSpec pispec_from_json(const Json& j, const StructureParams& p);
DPiSpec dpispec_from_json(const Json& j, const StructureParams& p);

/// {"m": ["1", "0", "1"]}
MomentSequence moments_from_json(const Json& j);
Json to_json(const MomentSequence& m);
Json to_json(const AppellPolynomial& w);

Json to_json(const PiMinusTerm& t);
Json to_json(const PiMinusExpr& e);
Json to_json(const DependencyGraph& g);

sim::SimConfig sim_config_from_json(const Json& j);
sim::SimOptions sim_options_from_json(const Json& j);
Json to_json(const sim::SimConfig& c);
Json to_json(const sim::SimReport& r);

} // namespace mirs::io
