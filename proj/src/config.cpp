#include "primelab/config.hpp"

#include "primelab/errors.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace primelab {
namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "limit", "spacing", "threshold", "seed", "trials", "cache_dir", "output", "format", "jobs",
        "n",     "lo",      "hi",        "table", "thm4",  "k",         "m",      "grid",   "A",
        "p",     "vectors", "mean",      "sampler", "inputs"};
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("config", "cannot read config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config", path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = normalize_key(trim(line.substr(0, eq)));
        if (!known_keys().contains(key)) throw UsageError(key, "unknown key in " + path.string());
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off") return false;
    throw UsageError(key, "expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

double parse_real(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError(key, "expected a number, got '" + text + "'");
    }
}

std::uint64_t parse_count(const std::string& key, const std::string& text) {
    if (!text.empty() && std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
        try {
            return std::stoull(text);
        } catch (const std::out_of_range&) {
            throw UsageError(key, "value out of range: '" + text + "'");
        }
    }
    const double v = parse_real(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19)
        throw UsageError(key, "expected a non-negative integer, got '" + text + "'");
    return static_cast<std::uint64_t>(v);
}

RunConfig parse_config(const std::vector<std::string>& args, const std::map<std::string, std::string>& env,
                       const std::optional<std::filesystem::path>& file) {
    CLI::App app{"primelab: prime counting, logarithmic integral and concentration experiments", "primelab"};
    std::string subcommand;
    app.add_option("subcommand", subcommand, "sieve | pi | li | scan-error | pbin-check | concentration | report")
        ->required();

    std::map<std::string, std::string> cli;
    std::map<std::string, CLI::Option*> opts;
    auto value = [&](const std::string& key, const std::string& names, const std::string& help) {
        opts[key] = app.add_option(names, cli[key], help);
    };
    value("limit", "--limit", "upper end of the sieve / scan (1e8 notation accepted)");
    value("spacing", "--spacing", "geometric checkpoint ratio (> 1)");
    value("threshold", "--threshold", "threshold function, e.g. log:c=1, loglog:c=2, power:c=1,alpha=0.25[,cap]");
    value("seed", "--seed", "random seed");
    value("trials", "--trials", "Monte Carlo trials");
    value("cache_dir", "--cache-dir", "checkpoint cache directory");
    value("output", "-o,--output", "output file, - for stdout");
    value("format", "--format", "csv or json");
    value("jobs", "-j,--jobs", "worker threads (0 = available parallelism)");
    value("n", "--n", "li: evaluation point; concentration: comma-separated sample sizes");
    value("lo", "--lo", "sieve: window start");
    value("hi", "--hi", "sieve: window end (exclusive)");
    value("k", "--k", "pbin-check: comma-separated k values");
    value("m", "--m", "pbin-check: comma-separated means (k/2 allowed)");
    value("grid", "--grid", "pbin-check: probability grid resolution");
    value("A", "--A", "pbin-check: tail window constant (> 1)");
    value("p", "--p", "concentration: comma-separated probabilities");
    value("vectors", "--vectors", "concentration: number of fixed-mean vectors (sweep mode)");
    value("mean", "--mean", "concentration: fixed mean for the sweep");
    value("sampler", "--sampler", "concentration: random, mixed or equal");
    bool table = false, thm4 = false;
    auto* table_opt = app.add_flag("--table", table, "pi: print the checkpoint table");
    auto* thm4_opt = app.add_flag("--thm4", thm4, "scan-error: append the 2 M(m) sqrt(m) window columns");
    std::vector<std::string> inputs;
    auto* inputs_opt = app.add_option("-i,--inputs", inputs, "report: CSV files to aggregate")->delimiter(',');
    std::string config_path;
    auto* config_opt = app.add_option("--config", config_path, "config file (default ./primelab.conf)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError("", e.what());
    }

    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        throw UsageError("subcommand", "unknown subcommand '" + subcommand + "'");

    std::map<std::string, std::string> settings;
    std::optional<std::filesystem::path> conf = file;
    if (config_opt->count()) conf = config_path;
    if (conf) {
        settings = read_config_file(*conf);
    } else if (std::filesystem::exists("primelab.conf")) {
        settings = read_config_file("primelab.conf");
    }
    if (auto it = env.find("PRIME_LAB_CACHE"); it != env.end() && !it->second.empty()) settings["cache_dir"] = it->second;
    if (auto it = env.find("PRIME_LAB_JOBS"); it != env.end() && !it->second.empty()) settings["jobs"] = it->second;
    for (const auto& [key, opt] : opts)
        if (opt->count()) settings[key] = cli[key];
    if (table_opt->count()) settings["table"] = "true";
    if (thm4_opt->count()) settings["thm4"] = "true";
    if (inputs_opt->count()) {
        std::string joined;
        for (const auto& s : inputs) joined += (joined.empty() ? "" : ",") + s;
        settings["inputs"] = joined;
    }

    RunConfig cfg;
    cfg.subcommand = subcommand;
    for (const auto& [key, text] : settings) {
        if (key == "limit") cfg.limit = parse_count(key, text);
        else if (key == "spacing") cfg.spacing = parse_real(key, text);
        else if (key == "threshold") cfg.threshold_spec = text;
        else if (key == "seed") cfg.seed = parse_count(key, text);
        else if (key == "trials") cfg.trials = parse_count(key, text);
        else if (key == "cache_dir") cfg.cache_dir = text;
        else if (key == "output") cfg.output = text;
        else if (key == "format") {
            if (text == "csv") cfg.format = OutputFormat::csv;
            else if (text == "json") cfg.format = OutputFormat::json;
            else throw UsageError(key, "expected csv or json, got '" + text + "'");
        }
        else if (key == "jobs") {
            const auto j = parse_count(key, text);
            if (j > 4096) throw UsageError(key, "too many jobs");
            cfg.jobs = static_cast<int>(j);
        }
        else if (key == "n") {
            if (cfg.subcommand == "concentration") cfg.n_list = text;
            else cfg.n = parse_real(key, text);
        }
        else if (key == "lo") cfg.lo = parse_count(key, text);
        else if (key == "hi") cfg.hi = parse_count(key, text);
        else if (key == "table") cfg.table = parse_bool(key, text);
        else if (key == "thm4") cfg.thm4 = parse_bool(key, text);
        else if (key == "k") cfg.k_list = text;
        else if (key == "m") cfg.m_list = text;
        else if (key == "grid") cfg.grid = parse_count(key, text);
        else if (key == "A") cfg.A = parse_real(key, text);
        else if (key == "p") cfg.p_list = text;
        else if (key == "vectors") cfg.vectors = parse_count(key, text);
        else if (key == "mean") cfg.mean = parse_real(key, text);
        else if (key == "sampler") cfg.sampler = text;
        else if (key == "inputs") cfg.inputs = split_list(text);
    }

    if (!(cfg.spacing > 1.0)) throw UsageError("spacing", "must exceed 1");
    if (cfg.trials < 1) throw UsageError("trials", "must be at least 1");
    if (cfg.grid < 1) throw UsageError("grid", "must be at least 1");
    if (cfg.sampler != "random" && cfg.sampler != "mixed" && cfg.sampler != "equal")
        throw UsageError("sampler", "expected random, mixed or equal");
    cfg.threshold = ThresholdFunction::parse(cfg.threshold_spec);
    return cfg;
}

} // namespace primelab
