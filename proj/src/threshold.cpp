#include "primelab/threshold.hpp"

#include "primelab/csv.hpp"
#include "primelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace primelab {

const char* to_string(ThresholdFamily family) {
    switch (family) {
    case ThresholdFamily::log: return "log";
    case ThresholdFamily::loglog: return "loglog";
    case ThresholdFamily::power: return "power";
    }
    return "log";
}

double ThresholdFunction::operator()(double x) const {
    double v = 0.0;
    switch (family) {
    case ThresholdFamily::log: v = x > 1.0 ? scale * std::log(x) : 0.0; break;
    case ThresholdFamily::loglog: v = x > std::exp(1.0) ? scale * std::log(std::log(x)) : 0.0; break;
    case ThresholdFamily::power: v = x > 0.0 ? scale * std::pow(x, alpha) : 0.0; break;
    }
    if (cap) v = std::min(v, std::sqrt(std::max(x, 0.0)) / 6.0);
    return v;
}

ThresholdFunction ThresholdFunction::unit() const {
    ThresholdFunction u = *this;
    u.scale = 1.0;
    u.cap = false;
    return u;
}

std::string ThresholdFunction::family_name() const { return to_string(family); }

std::string ThresholdFunction::to_spec() const {
    std::string s = family_name() + ":c=" + format_double(scale);
    if (family == ThresholdFamily::power) s += ",alpha=" + format_double(alpha);
    if (cap) s += ",cap";
    return s;
}

ThresholdFunction ThresholdFunction::parse(std::string_view spec) {
    ThresholdFunction t;
    const auto colon = spec.find(':');
    const std::string name(spec.substr(0, colon));
    if (name == "log")
        t.family = ThresholdFamily::log;
    else if (name == "loglog")
        t.family = ThresholdFamily::loglog;
    else if (name == "power")
        t.family = ThresholdFamily::power;
    else
        throw UsageError("threshold", "unknown family '" + name + "' (expected log, loglog or power)");

    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        if (item == "cap") {
            t.cap = true;
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("threshold", "expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::logic_error&) {
            throw UsageError("threshold", "bad number '" + value + "'");
        }
        if (key == "c")
            t.scale = v;
        else if (key == "alpha")
            t.alpha = v;
        else
            throw UsageError("threshold", "unknown parameter '" + key + "'");
    }
    if (!(t.scale > 0.0)) throw UsageError("threshold", "scale c must be positive");
    if (t.family == ThresholdFamily::power && !(t.alpha > 0.0 && t.alpha < 0.5))
        throw UsageError("threshold", "alpha must lie in (0, 0.5)");
    return t;
}

} // namespace primelab
