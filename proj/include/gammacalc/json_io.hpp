#pragma once
#include <string>

#include <json.hpp>

#include "gammacalc/errored_vector.hpp"

namespace gammacalc {

// {"value":[...], "variance":[[...]], "bias":[...]} with the variance given
// row-major; symmetry and positive semidefiniteness enforced on load.
nlohmann::json errored_to_json(const ErroredVector& ev);
ErroredVector errored_from_json(const nlohmann::json& j, const ToleranceConfig& tol = default_tolerances());
ErroredVector errored_from_json_text(const std::string& text, const ToleranceConfig& tol = default_tolerances());

} // namespace gammacalc
