#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "mnar/baselines.hpp"
#include "mnar/causal.hpp"
#include "mnar/diagnostics.hpp"
#include "mnar/interval.hpp"
#include "mnar/set_expansion.hpp"
#include "mnar/shadow.hpp"
#include "mnar/simlab.hpp"

namespace mnar::report {

using json = nlohmann::json;

json interval_json(const Interval& iv);
json point_json(const baselines::PointEstimate& est);
json shadow_json(const shadow::ShadowBoundsReport& rep);
json expansion_json(const expansion::ExpansionReport& rep);
json rate_json(const expansion::RateTable& rep);
json completeness_json(const diag::CompletenessReport& rep);
json sign_test_json(const causal::SignTestResult& res);
json metrics_json(const sim::MetricsReport& rep, bool include_rows = false);

// FNV-1a 64-bit digest, hex-encoded; used to echo input file identities.
std::string fnv1a64_hex(const std::string& bytes);

// Wraps a result body in the committed report envelope. Timing is null
// when seconds is negative so reruns stay byte-identical.
std::string render(const std::string& command, const json& inputs, const json& results,
                   const json& warnings, double seconds);

}  // namespace mnar::report
