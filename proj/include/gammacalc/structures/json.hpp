#pragma once
#include <json.hpp>

#include "gammacalc/structures/hamza.hpp"
#include "gammacalc/structures/structure.hpp"

namespace gammacalc::structures {

// {"kind":"ou1d"} | {"kind":"lebesgue","domain":[[lo,hi],...],"a":[[...]] or ["expr",...] rows}
// | {"kind":"product","factors":[...]} | {"kind":"product","factor":{...},"countable":true}
// | {"kind":"image","base":{...},"map":["expr",...],"estimator":{...}}
ErrorStructure structure_from_json(const nlohmann::json& spec);

// {"atoms":[[x,w],...],"density_grid":{"lo":..,"hi":..,"values":[...]}}
Measure1D measure_from_json(const nlohmann::json& spec);

} // namespace gammacalc::structures
