#pragma once

#include <string>
#include <string_view>

namespace primelab {

enum class ThresholdFamily { log, loglog, power };

// Slowly diverging scale function used for the windows M(m) sqrt(m) and
// Q(n) sqrt(Li(n)).
//   log:    c ln x
//   loglog: c ln ln x
//   power:  c x^alpha, 0 < alpha < 1/2
// Negative values (small x) are clamped to 0. With cap set, the value is
// additionally limited to sqrt(x) / 6.
struct ThresholdFunction {
    ThresholdFamily family = ThresholdFamily::log;
    double scale = 1.0;
    double alpha = 0.25;
    bool cap = false;

    double operator()(double x) const;

    // Same family with scale 1 and no cap.
    ThresholdFunction unit() const;

    std::string family_name() const;
    // Round-trippable form, e.g. "log:c=1" or "power:c=2,alpha=0.25,cap".
    std::string to_spec() const;

    // Throws UsageError("threshold", ...) for unknown families or bad parameters.
    static ThresholdFunction parse(std::string_view spec);
};

const char* to_string(ThresholdFamily family);

} // namespace primelab
