#pragma once

#include <json.hpp>
#include <string>

#include "wpt/cone.hpp"

namespace wpt {

// Floats in emitted files carry 17 significant digits.
std::string format_double(double v);

nlohmann::json manifold_to_json(const Manifold& m);
Manifold manifold_from_json(const nlohmann::json& j);

// {"manifold": {...}, "atoms": [{"x": [...], "w": r}, ...]}
nlohmann::json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const nlohmann::json& j);

// {"gaussian": {"mean": [...], "cov": [[...]]}}
nlohmann::json gaussian_to_json(const GaussianMeasure& g);
GaussianMeasure gaussian_from_json(const nlohmann::json& j);

// {"pairs": [[i, j, mass], ...]}
nlohmann::json plan_to_json(const TransportPlan& p);

// {"values": [[...], ...]} or {"linear": [[...]], "const": [...]}
nlohmann::json field_to_json(const TangentField& f);

// {"base": <measure>, "plan": [[i, target_point, mass]], "radius": r}
nlohmann::json cone_element_to_json(const ConeElement& e);
ConeElement cone_element_from_json(const nlohmann::json& j);

}  // namespace wpt
