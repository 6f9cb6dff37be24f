#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "corridor/model.hpp"

namespace corridor {

// Machine-readable record of one solver run.
struct RunReport {
    std::string instance_digest;
    std::string algorithm;  // requested algorithm ("auto" resolves in info["route"])
    int objective = 0;
    Solution solution;
    std::map<std::string, std::int64_t> counters;  // node/state/pivot counts
    std::map<std::string, std::string> info;       // route, gaps (exact rationals), flags
    std::map<std::string, double> timings_ms;      // only emitted on request
};

// Canonical JSON with sorted keys. Timings are omitted unless `include_timings`, so
// two runs of the same seed compare byte-identical.
std::string emit_report(const RunReport& rep, bool include_timings = false);
RunReport parse_report(const std::string& json_text);

// Plain-text rendering for terminals, same content as the JSON form.
std::string format_report_text(const RunReport& rep, bool include_timings = false);

}  // namespace corridor
