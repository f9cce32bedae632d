#pragma once

#include "creepdiv/expsum.hpp"

#include <json.hpp>

namespace creepdiv {

// Serialized as an array of {"coeff", "power", "rate"} records. Coefficients
// and rates are written at full precision so that stored solutions can be
// re-evaluated exactly. Support is not serialized; decoded sums are whole-line.
void to_json(nlohmann::ordered_json& j, const ExpPolySum& f);
void from_json(const nlohmann::ordered_json& j, ExpPolySum& f);

}  // namespace creepdiv
