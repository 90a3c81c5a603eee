#pragma once

#include "primelab/threshold.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace primelab {

enum class OutputFormat { csv, json };

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names = {"sieve", "pi", "li", "scan-error", "pbin-check", "concentration",
                                                   "report"};
    return names;
}

struct RunConfig {
    std::string subcommand;

    std::uint64_t limit = 1'000'000;
    double spacing = 1.25;
    std::string threshold_spec = "log:c=1";
    ThresholdFunction threshold;
    std::uint64_t seed = 42;
    std::uint64_t trials = 10'000;
    std::filesystem::path cache_dir = "cache";
    std::string output = "-"; // "-" is standard output
    OutputFormat format = OutputFormat::csv;
    int jobs = 0;             // 0 = available parallelism

    // li
    std::optional<double> n;
    // sieve
    std::uint64_t lo = 2;
    std::optional<std::uint64_t> hi;
    // pi
    bool table = false;
    // scan-error
    bool thm4 = false;
    // pbin-check
    std::string k_list = "4,6,8";
    std::string m_list = "1,2,k/2";
    std::uint64_t grid = 12;
    double A = 2.0;
    // concentration
    std::string n_list = "100,1000,10000,100000";
    std::string p_list = "0.1,0.3,0.5";
    std::uint64_t vectors = 0; // > 0 switches to the fixed-mean sweep
    std::optional<double> mean;
    std::string sampler = "random";
    // report
    std::vector<std::string> inputs;
};

// Thrown by parse_config for --help; carries the rendered usage text.
struct HelpRequested {
    std::string text;
};

// Settings resolve with precedence command line > environment > config file >
// defaults. The config file holds `key = value` lines and `#` comments; when
// `file` is empty, ./primelab.conf is read if it exists (or the file named by
// --config). Recognised environment variables: PRIME_LAB_CACHE, PRIME_LAB_JOBS.
// args excludes the program name; args[0] is the subcommand.
// Throws UsageError naming the offending key.
RunConfig parse_config(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
                       const std::optional<std::filesystem::path>& file = std::nullopt);

// Accepts plain integers and scientific notation ("1e8") that denote integers.
std::uint64_t parse_count(const std::string& key, const std::string& text);
double parse_real(const std::string& key, const std::string& text);

} // namespace primelab
