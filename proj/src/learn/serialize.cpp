#include "learn/serialize.hpp"

#include "core/error.hpp"

namespace lab::learn {

using nlohmann::json;

json to_json(const LinearClassifier& h) { return json{{"kind", "linear"}, {"w", h.w}, {"w0", h.bias}}; }

json to_json(const ParityHypothesis& h) {
  return json{{"kind", "parity"},
              {"n", h.bit_width},
              {"s", h.parity_set},
              {"planar", h.planar},
              {"orientation", h.orientation}};
}

json to_json(const UnionOfIntervals& h) {
  json list = json::array();
  for (const auto& iv : h.intervals)
    list.push_back(json{{"lo", iv.lo}, {"hi", iv.hi}, {"lo_open", iv.lo_open}, {"hi_open", iv.hi_open}});
  return json{{"kind", "intervals"}, {"intervals", list}};
}

namespace {
void expect_kind(const json& j, const char* kind) {
  require(j.is_object() && j.value("kind", "") == kind, errc::bad_format,
          std::string("hypothesis JSON is not of kind ") + kind);
}
}  // namespace

LinearClassifier linear_from_json(const json& j) {
  expect_kind(j, "linear");
  LinearClassifier h;
  h.w = j.at("w").get<std::vector<double>>();
  h.bias = j.at("w0").get<double>();
  return h;
}

ParityHypothesis parity_from_json(const json& j) {
  expect_kind(j, "parity");
  ParityHypothesis h;
  h.bit_width = j.at("n").get<int>();
  h.parity_set = j.at("s").get<std::vector<int>>();
  h.planar = j.at("planar").get<bool>();
  h.orientation = j.at("orientation").get<int>();
  return h;
}

UnionOfIntervals intervals_from_json(const json& j) {
  expect_kind(j, "intervals");
  UnionOfIntervals h;
  for (const auto& item : j.at("intervals"))
    h.intervals.push_back({item.at("lo").get<double>(), item.at("hi").get<double>(),
                           item.at("lo_open").get<bool>(), item.at("hi_open").get<bool>()});
  validate(h);
  return h;
}

}  // namespace lab::learn
