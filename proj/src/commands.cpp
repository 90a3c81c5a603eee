#include "primelab/commands.hpp"

#include "primelab/checkpoint_cache.hpp"
#include "primelab/concentration.hpp"
#include "primelab/csv.hpp"
#include "primelab/errors.hpp"
#include "primelab/errorscan.hpp"
#include "primelab/logint.hpp"
#include "primelab/pbin.hpp"
#include "primelab/philox.hpp"
#include "primelab/sieve.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace primelab {
namespace {

using nlohmann::json;
using Row = std::vector<std::string>;

json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(format_double(x));
}

std::string str(std::uint64_t v) { return std::to_string(v); }
std::string str(bool b) { return b ? "true" : "false"; }

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

SieveConfig sieve_config(const RunConfig& cfg) {
    SieveConfig sc;
    sc.jobs = cfg.jobs;
    return sc;
}

void save_cache(const CheckpointCache& cache, std::ostream& err) {
    try {
        cache.save();
    } catch (const std::exception& e) {
        err << "warning: checkpoint cache not written: " << e.what() << '\n';
    }
}

CheckpointCache open_cache(const RunConfig& cfg, std::ostream& err) {
    CheckpointCache cache(cfg.cache_dir);
    if (!cache.load()) err << "warning: ignoring corrupt checkpoint cache " << cache.file().string() << '\n';
    return cache;
}

int cmd_sieve(const RunConfig& cfg, std::ostream& out) {
    const std::uint64_t hi = cfg.hi.value_or(cfg.limit + 1);
    if (cfg.lo < 2 || hi <= cfg.lo) throw DomainError("sieve needs 2 <= lo < hi");
    const SegmentedSieve sieve(sieve_config(cfg));
    if (cfg.format == OutputFormat::json) {
        json primes = json::array();
        sieve.for_each_prime(cfg.lo, hi, [&](std::uint64_t p, std::uint64_t) {
            primes.push_back(p);
            return true;
        });
        out << json{{"lo", cfg.lo}, {"hi", hi}, {"primes", primes}}.dump() << '\n';
        return kExitOk;
    }
    CsvWriter csv(out);
    csv.row({"prime"});
    sieve.for_each_prime(cfg.lo, hi, [&](std::uint64_t p, std::uint64_t) {
        csv.row({str(p)});
        return true;
    });
    return kExitOk;
}

int cmd_pi(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.limit < 2) throw DomainError("pi needs --limit >= 2");
    const SegmentedSieve sieve(sieve_config(cfg));
    auto cache = open_cache(cfg, err);
    std::vector<std::uint64_t> ns = {cfg.limit};
    if (cfg.table) ns = geometric_grid(std::min<std::uint64_t>(100, cfg.limit), cfg.limit, cfg.spacing);
    const auto cps = cache.resolve(sieve, ns);
    save_cache(cache, err);
    if (cfg.format == OutputFormat::json) {
        json rows = json::array();
        for (const auto& cp : cps) rows.push_back({{"n", cp.n}, {"pi", cp.pi_n}});
        out << (cfg.table ? rows : rows.front()).dump() << '\n';
    } else if (cfg.table) {
        CsvWriter csv(out);
        csv.row({"n", "pi"});
        for (const auto& cp : cps) csv.row({str(cp.n), str(cp.pi_n)});
    } else {
        out << cps.front().pi_n << '\n';
    }
    return kExitOk;
}

int cmd_li(const RunConfig& cfg, std::ostream& out) {
    const double n = cfg.n.value_or(static_cast<double>(cfg.limit));
    const LiValue v = li(n);
    if (cfg.format == OutputFormat::json)
        out << json{{"n", num(v.n)}, {"li", num(v.value)}, {"abs_error_bound", num(v.abs_error_bound)}}.dump() << '\n';
    else
        out << format_double(v.value) << '\n';
    return kExitOk;
}

json fit_json(const FitSummary& s) {
    json fits = json::array();
    for (const auto& f : s.fits) {
        json j{{"family", f.family}, {"c", f.c ? num(*f.c) : json(nullptr)}};
        if (f.family == "power") j["alpha"] = num(f.alpha);
        fits.push_back(j);
    }
    return {{"max_ratio", num(s.max_ratio)},
            {"argmax_n", s.argmax_n},
            {"fits", fits},
            {"last_failure_n", s.last_failure_n ? json(*s.last_failure_n) : json(nullptr)}};
}

int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const SegmentedSieve sieve(sieve_config(cfg));
    auto cache = open_cache(cfg, err);
    ScanOptions opts;
    opts.spacing = cfg.spacing;
    opts.jobs = cfg.jobs;
    const auto records = scan(sieve, cfg.limit, cfg.threshold, opts, &cache);
    save_cache(cache, err);

    bool violated = false;
    for (const auto& r : records) violated |= !r.bound_ok || (cfg.thm4 && !r.window_ok_li);

    if (cfg.format == OutputFormat::json) {
        const auto families = default_fit_families();
        out << fit_json(threshold_fit(records, families)).dump(2) << '\n';
    } else {
        CsvWriter csv(out);
        Row header = {"n", "pi", "li", "delta", "sqrt_li", "ratio", "Q", "bound_ok", "sign"};
        if (cfg.thm4) header.insert(header.end(), {"window_m_li", "window_ok_li", "window_m_pi", "window_ok_pi"});
        csv.row(header);
        for (const auto& r : records) {
            Row row = {str(r.n),
                       str(r.pi_n),
                       format_double(r.li_n),
                       format_double(r.delta),
                       format_double(r.sqrt_li),
                       format_double(r.ratio),
                       format_double(r.q_value),
                       str(r.bound_ok),
                       std::to_string(r.sign)};
            if (cfg.thm4)
                row.insert(row.end(), {format_double(r.window_m_li), str(r.window_ok_li), format_double(r.window_m_pi),
                                       str(r.window_ok_pi)});
            csv.row(row);
        }
    }
    return violated ? kExitViolation : kExitOk;
}

std::vector<double> means_for(std::size_t k, const std::string& m_list) {
    std::vector<double> out;
    for (const auto& tok : split(m_list)) {
        double m = 0.0;
        if (tok.rfind("k/", 0) == 0) {
            const double d = parse_real("m", tok.substr(2));
            if (!(d > 0.0)) throw UsageError("m", "bad divisor in '" + tok + "'");
            m = static_cast<double>(k) / d;
        } else if (tok == "k") {
            m = static_cast<double>(k);
        } else {
            m = parse_real("m", tok);
        }
        if (m < 0.0) throw UsageError("m", "negative mean");
        if (m > static_cast<double>(k)) continue;
        if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
    return out;
}

std::string join_probs(const PBParams& p) {
    std::string s;
    for (double v : p.probs()) s += (s.empty() ? "" : ";") + format_double(v);
    return s;
}

int cmd_pbin(const RunConfig& cfg, std::ostream& out) {
    if (!(cfg.A > 1.0)) throw UsageError("A", "must exceed 1");
    SearchOptions opts;
    opts.grid = cfg.grid;
    opts.A = cfg.A;
    opts.tolerance = 1e-12;
    opts.jobs = cfg.jobs;

    std::vector<std::size_t> ks;
    for (const auto& tok : split(cfg.k_list)) {
        const auto k = parse_count("k", tok);
        if (k < 2) throw UsageError("k", "k must be at least 2");
        ks.push_back(static_cast<std::size_t>(k));
    }

    bool violated = false;
    json rows = json::array(), roots = json::array();
    std::ostringstream csv_text;
    CsvWriter csv(csv_text);
    csv.row({"k", "m", "q", "A", "region", "h", "binom", "satisfied", "witness"});
    for (const std::size_t k : ks) {
        for (const double m : means_for(k, cfg.m_list)) {
            const double p = m / static_cast<double>(k);
            if (p > 0.0 && p < 1.0) {
                const auto r = q_roots(k, p);
                roots.push_back({{"k", k},
                                 {"m", num(m)},
                                 {"q_minus", num(r.q_minus)},
                                 {"q_plus", num(r.q_plus)},
                                 {"q_minus_nearest", std::llround(r.q_minus)},
                                 {"q_plus_nearest", std::llround(r.q_plus)}});
            }
            for (std::size_t q = 0; q <= k; ++q) {
                const auto rep = extremal_search(k, m, q, opts);
                const bool na = rep.verdict == ExtremalVerdict::not_applicable;
                violated |= rep.verdict == ExtremalVerdict::violated;
                const std::string witness = rep.witness && !na ? join_probs(*rep.witness) : "";
                const std::string sat = na ? "" : str(rep.satisfied());
                csv.row({str(k), format_double(m), str(q), format_double(cfg.A), to_string(rep.region),
                         format_double(rep.h_value), format_double(rep.binomial_value), sat, witness});
                rows.push_back({{"k", k},
                                {"m", num(m)},
                                {"q", q},
                                {"A", num(cfg.A)},
                                {"region", to_string(rep.region)},
                                {"h", num(rep.h_value)},
                                {"binom", num(rep.binomial_value)},
                                {"satisfied", na ? json(nullptr) : json(rep.satisfied())},
                                {"witness", witness}});
            }
        }
    }
    if (cfg.format == OutputFormat::json)
        out << json{{"rows", rows}, {"q_roots", roots}}.dump(2) << '\n';
    else
        out << csv_text.str();
    return violated ? kExitViolation : kExitOk;
}

Row concentration_row(const ConcentrationResult& r, std::optional<double> exact, std::optional<double> gaussian) {
    const auto& t = r.threshold;
    return {str(r.n),
            format_double(r.m),
            t.family_name(),
            format_double(t.scale),
            t.family == ThresholdFamily::power ? format_double(t.alpha) : "",
            format_double(r.window.lo),
            format_double(r.window.hi),
            str(r.trials),
            str(r.hits),
            format_double(r.empirical_prob),
            exact ? format_double(*exact) : "",
            gaussian ? format_double(*gaussian) : ""};
}

const Row kConcentrationHeader = {"n",         "m",      "family", "c",         "alpha", "window_lo",
                                  "window_hi", "trials", "hits",   "empirical", "exact", "gaussian"};

std::optional<double> try_gaussian(std::size_t n, double p, const ThresholdFunction& t) {
    try {
        return gaussian_window_approx(n, p, t);
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

int cmd_concentration(const RunConfig& cfg, std::ostream& out) {
    std::vector<std::size_t> ns;
    for (const auto& tok : split(cfg.n_list)) ns.push_back(static_cast<std::size_t>(parse_count("n", tok)));
    if (ns.empty()) throw UsageError("n", "empty list");
    json rows = json::array();
    std::ostringstream text;
    CsvWriter csv(text);
    bool violated = false;

    if (cfg.vectors > 0) {
        const std::size_t n = ns.front();
        if (!cfg.mean) throw UsageError("mean", "sweep mode needs --mean");
        const double m = *cfg.mean;
        if (!(m > 0.0 && m < static_cast<double>(n))) throw UsageError("mean", "must lie in (0, n)");
        VectorSampler sampler = cfg.sampler == "equal"   ? equal_sampler(n, m)
                                : cfg.sampler == "mixed" ? mixed_sampler(n, m, 0.5, cfg.seed)
                                                         : random_sampler(n, m, cfg.seed);
        const auto sweep = theorem3_sweep(n, m, sampler, cfg.vectors, cfg.threshold, cfg.trials, cfg.seed, cfg.jobs);
        Row header = kConcentrationHeader;
        header.insert(header.end(), {"vector", "reference_exact", "flagged"});
        csv.row(header);
        const auto gaussian = try_gaussian(n, m / static_cast<double>(n), cfg.threshold);
        for (const auto& s : sweep) {
            Row row = concentration_row(s.result, s.result.exact_prob, gaussian);
            row.insert(row.end(), {str(static_cast<std::uint64_t>(s.index)), format_double(s.reference_exact),
                                   str(s.flagged)});
            csv.row(row);
            rows.push_back({{"vector", s.index},
                            {"m", num(s.result.m)},
                            {"empirical", num(s.result.empirical_prob)},
                            {"reference_exact", num(s.reference_exact)},
                            {"flagged", s.flagged}});
        }
    } else {
        std::vector<double> ps;
        for (const auto& tok : split(cfg.p_list)) {
            const double p = parse_real("p", tok);
            if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p", "probability outside [0, 1]");
            ps.push_back(p);
        }
        csv.row(kConcentrationHeader);
        std::uint64_t index = 0;
        for (const std::size_t n : ns) {
            for (const double p : ps) {
                const PBParams params(std::vector<double>(n, p));
                const auto r = simulate_sum(params, cfg.threshold, cfg.trials, mix_seed(cfg.seed, index++), cfg.jobs);
                const auto g = try_gaussian(n, p, cfg.threshold);
                csv.row(concentration_row(r, r.exact_prob, g));
                if (r.exact_prob) {
                    const double e = *r.exact_prob;
                    const double se = std::sqrt(e * (1.0 - e) / static_cast<double>(r.trials));
                    violated |= std::abs(r.empirical_prob - e) > 4.0 * se + 1e-12;
                }
                rows.push_back({{"n", n},
                                {"p", num(p)},
                                {"window_lo", num(r.window.lo)},
                                {"window_hi", num(r.window.hi)},
                                {"hits", r.hits},
                                {"empirical", num(r.empirical_prob)},
                                {"exact", r.exact_prob ? num(*r.exact_prob) : json(nullptr)},
                                {"gaussian", g ? num(*g) : json(nullptr)}});
            }
        }
    }
    if (cfg.format == OutputFormat::json)
        out << rows.dump(2) << '\n';
    else
        out << text.str();
    return violated ? kExitViolation : kExitOk;
}

// ---- report ----

double cell(const CsvTable& t, const Row& row, const char* name) {
    const int c = t.column(name);
    if (c < 0 || row[static_cast<std::size_t>(c)].empty()) return std::nan("");
    return std::stod(row[static_cast<std::size_t>(c)]);
}

std::string text_cell(const CsvTable& t, const Row& row, const char* name) {
    const int c = t.column(name);
    return c < 0 ? std::string() : row[static_cast<std::size_t>(c)];
}

json entry(const std::string& claim) { return {{"claim", claim}, {"status", "no-data"}, {"evidence", json::object()}}; }

int cmd_report(const RunConfig& cfg, std::ostream& out) {
    if (cfg.inputs.empty()) throw UsageError("inputs", "report needs at least one CSV input");
    json report = {
        {"Prop1", entry("tail probabilities of a Poisson-binomial sum are maximised by equal probabilities")},
        {"Prop2", entry("P(|S_n - np| < M(m) sqrt(m)) -> 1 for diverging M")},
        {"Thm3", entry("fixed-mean Bernoulli sums concentrate in m +/- M(m) sqrt(m)")},
        {"Thm4", entry("|pi(n) - Li(n)| < 2 M(m) sqrt(m) for large n, m instantiated as Li(n)")},
        {"Thm5", entry("|pi(n) - Li(n)| < Q(n) sqrt(Li(n)) for large n")},
        {"Lemma2", entry("sign behaviour of pi(n1) - pi(n0) - integral over [n0, n1]")}};

    for (const auto& path : cfg.inputs) {
        std::ifstream in(path);
        if (!in) throw UsageError("inputs", "cannot read " + path);
        const CsvTable t = read_csv(in);
        if (t.column("bound_ok") >= 0 && t.column("sqrt_li") >= 0) {
            std::size_t rows = 0, bound_fail = 0, window_fail = 0, positive = 0, negative = 0;
            double max_ratio = 0.0;
            std::uint64_t argmax = 0;
            std::vector<DeltaSample> samples;
            std::vector<std::uint64_t> failures;
            double prev_pi = std::nan(""), prev_li = std::nan("");
            for (const auto& row : t.rows) {
                const auto n = static_cast<std::uint64_t>(cell(t, row, "n"));
                const double pi = cell(t, row, "pi"), li_n = cell(t, row, "li"), delta = cell(t, row, "delta");
                const double ratio = cell(t, row, "ratio");
                samples.push_back({n, delta});
                if (!std::isnan(prev_pi)) ((pi - prev_pi) - (li_n - prev_li) < 0 ? negative : positive)++;
                prev_pi = pi;
                prev_li = li_n;
                if (n < 1000) continue;
                ++rows;
                if (ratio > max_ratio) {
                    max_ratio = ratio;
                    argmax = n;
                }
                if (text_cell(t, row, "bound_ok") != "true") {
                    ++bound_fail;
                    failures.push_back(n);
                }
                if (!(std::abs(delta) < 2.0 * cfg.threshold(li_n) * std::sqrt(li_n))) ++window_fail;
            }
            const auto crossings = detect_sign_changes(samples);
            json cross = json::array();
            for (const auto& c : crossings) cross.push_back(c.n);
            report["Thm5"]["status"] = bound_fail ? "violated" : "consistent";
            report["Thm5"]["evidence"] = {{"source", path},
                                          {"checkpoints_n_ge_1000", rows},
                                          {"bound_failures", failures},
                                          {"max_ratio", num(max_ratio)},
                                          {"argmax_n", argmax}};
            report["Thm4"]["status"] = window_fail ? "violated" : "consistent";
            report["Thm4"]["evidence"] = {{"source", path},
                                          {"threshold", cfg.threshold.to_spec()},
                                          {"checkpoints_n_ge_1000", rows},
                                          {"window_failures", window_fail}};
            report["Lemma2"]["status"] = "informational";
            report["Lemma2"]["evidence"] = {{"source", path},
                                            {"checkpoint_sign_changes", cross},
                                            {"consecutive_intervals_negative_excess", negative},
                                            {"consecutive_intervals_positive_excess", positive}};
        } else if (t.column("region") >= 0 && t.column("binom") >= 0) {
            std::size_t applicable = 0, violated = 0;
            json witnesses = json::array();
            for (const auto& row : t.rows) {
                const std::string sat = text_cell(t, row, "satisfied");
                if (sat.empty()) continue;
                ++applicable;
                if (sat != "true") {
                    ++violated;
                    witnesses.push_back({{"k", text_cell(t, row, "k")},
                                         {"m", text_cell(t, row, "m")},
                                         {"q", text_cell(t, row, "q")},
                                         {"witness", text_cell(t, row, "witness")}});
                }
            }
            report["Prop1"]["status"] = violated ? "violated" : (applicable ? "consistent" : "no-data");
            report["Prop1"]["evidence"] = {{"source", path},
                                           {"rows", t.rows.size()},
                                           {"applicable", applicable},
                                           {"violations", violated},
                                           {"witnesses", witnesses}};
        } else if (t.column("empirical") >= 0 && t.column("flagged") >= 0) {
            std::size_t flagged = 0;
            double min_emp = 1.0;
            for (const auto& row : t.rows) {
                flagged += text_cell(t, row, "flagged") == "true";
                min_emp = std::min(min_emp, cell(t, row, "empirical"));
            }
            report["Thm3"]["status"] = flagged ? "inconclusive" : "consistent";
            report["Thm3"]["evidence"] = {
                {"source", path}, {"vectors", t.rows.size()}, {"flagged", flagged}, {"min_empirical", num(min_emp)}};
        } else if (t.column("empirical") >= 0 && t.column("exact") >= 0) {
            std::size_t disagreements = 0;
            std::map<double, std::vector<std::pair<double, double>>> by_p; // p -> (n, exact)
            double min_exact = 1.0;
            for (const auto& row : t.rows) {
                const double n = cell(t, row, "n"), m = cell(t, row, "m"), e = cell(t, row, "exact");
                const double emp = cell(t, row, "empirical"), trials = cell(t, row, "trials");
                if (std::isnan(e)) continue;
                min_exact = std::min(min_exact, e);
                if (std::abs(emp - e) > 4.0 * std::sqrt(e * (1.0 - e) / trials) + 1e-12) ++disagreements;
                by_p[std::stod(format_double(m / n))].push_back({n, e});
            }
            bool monotone = true;
            for (auto& [p, seq] : by_p) {
                std::sort(seq.begin(), seq.end());
                for (std::size_t i = 1; i < seq.size(); ++i) monotone &= seq[i].second >= seq[i - 1].second - 1e-3;
            }
            report["Prop2"]["status"] = (disagreements == 0 && monotone) ? "consistent" : "violated";
            report["Prop2"]["evidence"] = {{"source", path},
                                           {"rows", t.rows.size()},
                                           {"min_exact", num(min_exact)},
                                           {"nondecreasing_in_n", monotone},
                                           {"mc_exact_disagreements", disagreements}};
        } else {
            throw UsageError("inputs", path + ": unrecognised CSV header");
        }
    }
    out << report.dump(2) << '\n';
    for (const auto& [key, value] : report.items())
        if (value["status"] == "violated") return kExitViolation;
    return kExitOk;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const std::string& s = cfg.subcommand;
    if (s == "sieve") return cmd_sieve(cfg, out);
    if (s == "pi") return cmd_pi(cfg, out, err);
    if (s == "li") return cmd_li(cfg, out);
    if (s == "scan-error") return cmd_scan(cfg, out, err);
    if (s == "pbin-check") return cmd_pbin(cfg, out);
    if (s == "concentration") return cmd_concentration(cfg, out);
    if (s == "report") return cmd_report(cfg, out);
    throw UsageError("subcommand", "unknown subcommand '" + s + "'");
}

} // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.output == "-") return dispatch(cfg, out, err);
        // Write to a buffer first so a failed run leaves no partial file.
        std::ostringstream buf;
        const int status = dispatch(cfg, buf, err);
        std::ofstream file(cfg.output, std::ios::binary | std::ios::trunc);
        if (!file) throw UsageError("output", "cannot write " + cfg.output);
        file << buf.str();
        return status;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace primelab
