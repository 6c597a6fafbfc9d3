#pragma once

#include "minsurf/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

using Json = nlohmann::ordered_json;

enum class Status { pass, warn, fail };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::pass: return "PASS";
        case Status::warn: return "WARN";
        case Status::fail: return "FAIL";
    }
    return "FAIL";
}

/// Outcome of one check at one refinement level.
struct Finding {
    std::string check;
    Status status = Status::pass;
    std::string message;
    Json values = Json::object();
    Json tolerances = Json::object();
    int level = -1;

    bool passed() const { return status != Status::fail; }
};

inline Finding make_finding(std::string check, bool ok, std::string message) {
    Finding f;
    f.check = std::move(check);
    f.status = ok ? Status::pass : Status::fail;
    f.message = std::move(message);
    return f;
}

/// JSON number for a double; non-finite values become strings so the output
/// stays valid JSON.
inline Json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

inline Json num_array(const std::vector<double>& vs) {
    Json a = Json::array();
    for (double v : vs) a.push_back(num(v));
    return a;
}

inline Json to_json(const Finding& f) {
    Json j;
    j["check"] = f.check;
    j["status"] = to_string(f.status);
    if (f.level >= 0) j["level"] = f.level;
    j["message"] = f.message;
    j["values"] = f.values;
    j["tolerances"] = f.tolerances;
    return j;
}

inline bool any_fail(const std::vector<Finding>& fs) {
    return std::any_of(fs.begin(), fs.end(), [](const Finding& f) { return f.status == Status::fail; });
}

} // namespace minsurf
