#include "corridor/report.hpp"

#include <json.hpp>

#include <sstream>

#include "corridor/errors.hpp"

namespace corridor {

namespace {
using nlohmann::json;
}

std::string emit_report(const RunReport& rep, bool include_timings) {
    json doc = json::object();
    doc["instance"] = rep.instance_digest;
    doc["algorithm"] = rep.algorithm;
    doc["objective"] = rep.objective;
    doc["solution"] = json::parse(emit_solution(rep.solution));
    json counters = json::object();
    for (const auto& [k, v] : rep.counters) counters[k] = v;
    doc["counters"] = std::move(counters);
    json info = json::object();
    for (const auto& [k, v] : rep.info) info[k] = v;
    doc["info"] = std::move(info);
    if (include_timings) {
        json times = json::object();
        for (const auto& [k, v] : rep.timings_ms) times[k] = v;
        doc["timings_ms"] = std::move(times);
    }
    return doc.dump();
}

RunReport parse_report(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw parse_error(std::string("bad JSON: ") + e.what());
    }
    if (!doc.is_object()) throw parse_error("report must be a JSON object");
    RunReport rep;
    try {
        rep.instance_digest = doc.at("instance").get<std::string>();
        rep.algorithm = doc.at("algorithm").get<std::string>();
        rep.objective = doc.at("objective").get<int>();
        rep.solution = parse_solution(doc.at("solution").dump());
        for (const auto& [k, v] : doc.at("counters").items())
            rep.counters[k] = v.get<std::int64_t>();
        for (const auto& [k, v] : doc.at("info").items())
            rep.info[k] = v.get<std::string>();
        if (doc.contains("timings_ms"))
            for (const auto& [k, v] : doc["timings_ms"].items())
                rep.timings_ms[k] = v.get<double>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("bad report: ") + e.what());
    }
    return rep;
}

std::string format_report_text(const RunReport& rep, bool include_timings) {
    std::ostringstream os;
    os << "instance   " << rep.instance_digest << "\n";
    os << "algorithm  " << rep.algorithm << "\n";
    os << "objective  " << rep.objective << "\n";
    os << "cancelled  ";
    if (rep.solution.cancelled.empty()) os << "(none)";
    for (std::size_t i = 0; i < rep.solution.cancelled.size(); ++i)
        os << (i ? " " : "") << path_name(rep.solution.cancelled[i]);
    os << "\n";
    for (const auto& [id, ps] : rep.solution.chosen) {
        os << "job " << id << "      ";
        if (ps.empty()) os << "runs free";
        for (std::size_t i = 0; i < ps.size(); ++i) os << (i ? " " : "") << path_name(ps[i]);
        const auto st = rep.solution.starts.find(id);
        if (st != rep.solution.starts.end()) os << "  (start " << format_rational(st->second) << ")";
        os << "\n";
    }
    for (const auto& [k, v] : rep.counters) os << k << "  " << v << "\n";
    for (const auto& [k, v] : rep.info) os << k << "  " << v << "\n";
    if (include_timings)
        for (const auto& [k, v] : rep.timings_ms) os << k << "  " << v << " ms\n";
    return os.str();
}

}  // namespace corridor
