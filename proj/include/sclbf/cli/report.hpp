#pragma once

#include <json.hpp>

#include "sclbf/clbf.hpp"

namespace sclbf::cli {

nlohmann::json to_json(const ConditionResult& c);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const WeakClbf& w);
nlohmann::json to_json(const ParameterCheck& c);

}  // namespace sclbf::cli
