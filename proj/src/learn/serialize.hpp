#pragma once

#include <json.hpp>

#include "learn/hypotheses.hpp"

namespace lab::learn {

nlohmann::json to_json(const LinearClassifier& h);
nlohmann::json to_json(const ParityHypothesis& h);
nlohmann::json to_json(const UnionOfIntervals& h);

LinearClassifier linear_from_json(const nlohmann::json& j);
ParityHypothesis parity_from_json(const nlohmann::json& j);
UnionOfIntervals intervals_from_json(const nlohmann::json& j);

}  // namespace lab::learn
