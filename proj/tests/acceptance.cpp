// Acceptance suite: one PASS/FAIL line per criterion. With no arguments every
// criterion runs; otherwise only the named ones (C1 ... C10).

#include "oracles.hpp"

#include "primelab/concentration.hpp"
#include "primelab/csv.hpp"
#include "primelab/errorscan.hpp"
#include "primelab/logint.hpp"
#include "primelab/pbin.hpp"
#include "primelab/reference.hpp"
#include "primelab/sieve.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#ifndef PRIMELAB_CLI
#error "PRIMELAB_CLI must name the primelab executable"
#endif

using namespace primelab;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " | " << what;
        }
    }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const ThresholdFunction kLn{ThresholdFamily::log, 1.0, 0.25, false};

struct CliResult {
    int code = -1;
    std::string out;
};

CliResult cli(const std::string& args) {
    const std::string cmd = std::string(PRIMELAB_CLI) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string cache_flag() {
    static const auto dir = std::filesystem::temp_directory_path() / "primelab_acceptance_cache";
    return "--cache-dir " + dir.string();
}

// ---------------------------------------------------------------------------

Outcome c1_sieve() {
    Outcome v;
    const auto table = oracle::pi_table(100'000);
    std::vector<std::uint64_t> ns(table.size());
    std::iota(ns.begin(), ns.end(), 0);
    const auto cps = default_sieve().count_at(ns);
    std::size_t mismatches = 0;
    for (std::size_t n = 0; n < ns.size(); ++n) mismatches += cps[n].pi_n != table[n];
    v.require(mismatches == 0, std::to_string(mismatches) + " mismatches vs trial division for n <= 1e5");

    for (std::uint64_t n = 1000; n <= 100'000'000; n *= 10) {
        const auto t0 = Clock::now();
        const std::uint64_t seg = default_sieve().pi(n);
        const double secs = seconds_since(t0);
        const std::uint64_t mono = reference::count_primes_monolithic(n);
        v.require(seg == mono, "pi(" + std::to_string(n) + ") " + std::to_string(seg) + " != " + std::to_string(mono));
        if (n == 100'000'000) {
            v.require(secs <= 60.0, "pi(1e8) took " + format_double(secs) + " s");
            v.detail << " pi(1e8)=" << seg << " in " << format_double(secs) << " s";
        }
    }
    return v;
}

Outcome c2_quadrature() {
    Outcome v;
    for (double n : {10.0, 1e3, 1e6, 1e9}) {
        const double e = rel(li(n).value, oracle::li_simpson(n));
        v.require(e <= 1e-9, "li(" + format_double(n) + ") rel err " + format_double(e));
    }
    v.require(li(2.0).value == 0.0, "li(2) != 0");
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(std::log(2.0), std::log(1e9));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::array<double, 3> x = {std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
        std::sort(x.begin(), x.end());
        const double whole = li_interval(x[0], x[2]);
        const double parts = li_interval(x[0], x[1]) + li_interval(x[1], x[2]);
        worst = std::max(worst, std::abs(whole - parts) / std::max(std::abs(whole), 1e-300));
    }
    v.require(worst <= 1e-9, "additivity residual " + format_double(worst));
    v.detail << " worst additivity residual " << format_double(worst);
    return v;
}

Outcome c3_pbin_oracle() {
    Outcome v;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> kdist(1, 16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_pmf = 0.0, worst_norm = 0.0, worst_mean = 0.0, worst_var = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> probs(rep < 16 ? static_cast<std::size_t>(rep + 1) : kdist(rng));
        for (auto& p : probs) p = u(rng);
        const PBParams params(probs);
        const auto want = oracle::pb_enumerate(probs);
        double total = 0.0, mean = 0.0, second = 0.0;
        for (std::size_t q = 0; q <= probs.size(); ++q) {
            const double got = pb_pmf(params, q);
            worst_pmf = std::max(worst_pmf, rel(got, want[q]));
            total += got;
            mean += q * got;
            second += double(q) * q * got;
        }
        double var = 0.0;
        for (double p : probs) var += p * (1 - p);
        worst_norm = std::max(worst_norm, std::abs(total - 1.0));
        worst_mean = std::max(worst_mean, std::abs(mean - params.m()) / std::max(1.0, params.m()));
        worst_var = std::max(worst_var, std::abs(second - mean * mean - var) / std::max(1.0, var));
    }
    v.require(worst_pmf <= 1e-12, "pmf rel err " + format_double(worst_pmf));
    v.require(worst_norm <= 1e-10, "normalization " + format_double(worst_norm));
    v.require(worst_mean <= 1e-10, "mean " + format_double(worst_mean));
    v.require(worst_var <= 1e-10, "variance " + format_double(worst_var));
    v.detail << " worst pmf rel err " << format_double(worst_pmf);
    return v;
}

Outcome c4_extremal() {
    Outcome v;
    const auto t0 = Clock::now();
    const auto r = cli("pbin-check --k 4,6,8 --m 1,2,k/2 --A 2 " + cache_flag());
    const double secs = seconds_since(t0);
    v.require(r.code == 0 || r.code == 3, "exit status " + std::to_string(r.code));
    v.require(secs <= 300.0, "runtime " + format_double(secs) + " s");
    std::istringstream in(r.out);
    CsvTable t;
    try {
        t = read_csv(in);
    } catch (const std::exception& e) {
        v.require(false, std::string("unparseable output: ") + e.what());
        return v;
    }
    const int cs = t.column("satisfied"), cw = t.column("witness"), ch = t.column("h"), cb = t.column("binom");
    const int cr = t.column("region");
    if (cs < 0 || cw < 0 || ch < 0 || cb < 0 || cr < 0) {
        v.require(false, "missing columns");
        return v;
    }
    std::size_t applicable = 0, violated = 0;
    for (const auto& row : t.rows) {
        const std::string region = row[cr], sat = row[cs];
        if (region == "na") {
            v.require(sat.empty(), "verdict on a non-tail row");
            continue;
        }
        ++applicable;
        const double h = std::stod(row[ch]), b = std::stod(row[cb]);
        if (sat == "true") {
            v.require(h <= b + 1e-12 * b + 1e-15, "satisfied row with h > binomial");
        } else {
            ++violated;
            v.require(!row[cw].empty(), "violated row without witness");
        }
    }
    v.require(applicable > 0, "no tail rows checked");
    v.require((violated > 0) == (r.code == 3), "exit status disagrees with violation rows");
    v.detail << " " << applicable << " tail rows, " << violated << " violations, " << format_double(secs) << " s";
    return v;
}

Outcome c5_curvature() {
    Outcome v;
    double worst = 0.0;
    for (std::size_t k : {100, 1000, 10000}) {
        for (int i = 1; i <= 9; ++i) {
            const double p = i / 10.0, a = (1 - p) / p;
            const auto roots = q_roots(k, p);
            for (double q : {roots.q_minus, roots.q_plus}) {
                // Residual relative to the magnitude of the expression's terms.
                const double scale = std::abs((q - 1) / (k - q) * a) + 2.0 + std::abs((k - q - 1) / q / a);
                worst = std::max(worst, std::abs(curvature_expression_real(double(k), p, q)) / scale);
            }
        }
    }
    v.require(worst <= 1e-8, "root residual " + format_double(worst));

    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<std::size_t> kdist(3, 20);
    std::uniform_real_distribution<double> pdist(0.05, 0.95);
    std::size_t samples = 0, agree = 0;
    std::ostringstream mismatches;
    while (samples < 2000) {
        const std::size_t k = kdist(rng);
        std::uniform_int_distribution<std::size_t> qdist(1, k - 1);
        const std::size_t q = qdist(rng);
        const double p = pdist(rng);
        const double expr = curvature_expression(k, p, q);
        const double fd = restricted_second_difference(k, p, q);
        ++samples;
        if (sign_of(expr) == sign_of(fd)) {
            ++agree;
        } else if (mismatches.tellp() < 400) {
            mismatches << " (k=" << k << ",q=" << q << ",p=" << format_double(p) << ")";
        }
    }
    const double frac = double(agree) / samples;
    v.require(frac >= 0.99, "sign agreement " + format_double(frac));
    v.detail << " root residual " << format_double(worst) << ", sign agreement " << agree << "/" << samples;
    if (agree < samples) v.detail << " mismatches:" << mismatches.str();
    return v;
}

Outcome c6_window() {
    Outcome v;
    const std::array<std::size_t, 4> ns = {100, 1000, 10000, 100000};
    const std::array<double, 3> ps = {0.1, 0.3, 0.5};
    for (double p : ps) {
        double prev = 0.0;
        for (std::size_t n : ns) {
            const double e = exact_window_probability(n, p, kLn);
            const std::string cell = "(" + std::to_string(n) + "," + format_double(p) + ")";
            v.require(e >= 0.99, "exact " + cell + " = " + format_double(e) + " < 0.99");
            v.require(e >= prev - 1e-3, "not nondecreasing at " + cell);
            prev = e;
        }
    }
    const auto r = cli("concentration --n 100,1000,10000,100000 --p 0.1,0.3,0.5 --trials 10000 --seed 42 " + cache_flag());
    std::istringstream in(r.out);
    const auto t = read_csv(in);
    const int ce = t.column("empirical"), cx = t.column("exact"), ct = t.column("trials");
    v.require(t.rows.size() == 12, "expected 12 Monte Carlo rows");
    double worst_z = 0.0;
    for (const auto& row : t.rows) {
        const double emp = std::stod(row[ce]), ex = std::stod(row[cx]), trials = std::stod(row[ct]);
        const double se = std::sqrt(ex * (1 - ex) / trials);
        const double diff = std::abs(emp - ex);
        v.require(diff <= 4 * se + 1e-12, "MC disagreement at n=" + row[0] + ", m=" + row[1]);
        if (se > 0) worst_z = std::max(worst_z, diff / se);
    }
    v.detail << " worst MC deviation " << format_double(worst_z) << " SE";
    return v;
}

std::vector<ScanRecord> scan_to_1e8() {
    static const std::vector<ScanRecord> records = scan(default_sieve(), 100'000'000, kLn);
    return records;
}

Outcome c7_bound() {
    Outcome v;
    const auto t0 = Clock::now();
    const auto records = scan_to_1e8();
    const double secs = seconds_since(t0);
    double max_ratio = 0.0;
    std::uint64_t argmax = 0;
    for (const auto& r : records) {
        if (r.ratio > max_ratio) {
            max_ratio = r.ratio;
            argmax = r.n;
        }
        if (r.n >= 1000) v.require(r.bound_ok, "bound fails at n=" + std::to_string(r.n));
    }
    v.require(max_ratio < 1.0, "max ratio " + format_double(max_ratio));
    v.require(secs <= 600.0, "runtime " + format_double(secs) + " s");
    v.detail << " " << records.size() << " checkpoints, max ratio " << format_double(max_ratio) << " at n=" << argmax
             << ", " << format_double(secs) << " s";
    return v;
}

Outcome c8_window_variant() {
    Outcome v;
    std::size_t checked = 0;
    for (const auto& r : scan_to_1e8()) {
        if (r.n < 1000) continue;
        ++checked;
        const double m = r.li_n;
        v.require(std::abs(double(r.pi_n) - r.li_n) < 2 * std::log(m) * std::sqrt(m),
                  "window fails at n=" + std::to_string(r.n));
    }
    v.detail << " " << checked << " checkpoints";
    return v;
}

Outcome c9_sign() {
    Outcome v;
    const auto crossings = sign_change_search(default_sieve(), 100'000'000);
    if (!crossings.empty()) {
        std::string ns;
        for (const auto& c : crossings) ns += " " + std::to_string(c.n);
        v.require(false, "sign changes found at" + ns);
    }

    std::vector<DeltaSample> samples;
    for (const auto& r : scan_to_1e8()) samples.push_back({r.n, r.delta});
    v.require(detect_sign_changes(samples).empty(), "sign change among scan checkpoints");
    auto injected = samples;
    injected[injected.size() / 2].delta = -injected[injected.size() / 2].delta;
    v.require(detect_sign_changes(injected).size() == 2, "injected flip not detected");

    std::size_t intervals = 0;
    for (std::uint64_t n0 = 10'000; 2 * n0 <= 100'000'000; n0 *= 2) {
        const auto r = interval_compare(default_sieve(), n0, 2 * n0);
        ++intervals;
        v.require(r.excess < 0.0, "excess(" + std::to_string(n0) + ", " + std::to_string(2 * n0) +
                                      ") = " + format_double(r.excess));
    }
    v.detail << " " << intervals << " doubling intervals";
    return v;
}

Outcome c10_determinism() {
    Outcome v;
    const std::vector<std::string> commands = {
        "sieve --lo 1000000 --hi 1002000",
        "pi --limit 1e7 --table",
        "li --n 123456789 --format json",
        "scan-error --limit 1e7 --thm4",
        "scan-error --limit 1e7 --format json",
        "pbin-check --k 4,6",
        "concentration --n 100,1000 --p 0.1,0.5 --trials 5000 --seed 5",
        "concentration --n 300 --mean 60 --vectors 4 --trials 2000 --seed 8",
    };
    const auto dir = std::filesystem::temp_directory_path() / "primelab_acceptance_det";
    std::filesystem::create_directories(dir);
    const auto scan_csv = (dir / "scan.csv").string();
    cli("scan-error --limit 1e6 -o " + scan_csv + " " + cache_flag());
    std::vector<std::string> all = commands;
    all.push_back("report --inputs " + scan_csv);
    for (const auto& c : all) {
        // Each run gets its own cold cache so cache state cannot mask differences.
        std::string outputs[3];
        int codes[3];
        const char* jobs[3] = {"1", "8", "8"};
        for (int i = 0; i < 3; ++i) {
            const auto cache = dir / ("cache" + std::to_string(i));
            std::filesystem::remove_all(cache);
            const auto r = cli(c + " --jobs " + jobs[i] + " --cache-dir " + cache.string());
            outputs[i] = r.out;
            codes[i] = r.code;
        }
        v.require(!outputs[0].empty(), "'" + c + "' produced no output");
        v.require(outputs[0] == outputs[1] && codes[0] == codes[1], "'" + c + "' differs between --jobs 1 and 8");
        v.require(outputs[1] == outputs[2], "'" + c + "' differs between repeated runs");
    }
    std::filesystem::remove_all(dir);
    v.detail << " " << all.size() << " commands";
    return v;
}

struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"C1", "sieve matches trial division and monolithic sieve", c1_sieve},
        {"C2", "logarithmic integral matches Simpson oracle; additivity", c2_quadrature},
        {"C3", "Poisson-binomial pmf matches 2^k enumeration", c3_pbin_oracle},
        {"C4", "equal-probability extremality check or witness with exit 3", c4_extremal},
        {"C5", "curvature roots and sign of the second difference", c5_curvature},
        {"C6", "binomial window probabilities >= 0.99 and Monte Carlo agreement", c6_window},
        {"C7", "|pi - Li| < ln(n) sqrt(Li) up to 1e8, max ratio < 1", c7_bound},
        {"C8", "|pi - Li| < 2 ln(m) sqrt(m), m = Li(n), up to 1e8", c8_window_variant},
        {"C9", "no sign change of pi - Li; negative interval excess", c9_sign},
        {"C10", "byte-identical CLI output across job counts and runs", c10_determinism},
    };
    std::set<std::string> wanted(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& c : criteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        Outcome v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << v.detail.str() << std::endl;
        failures += !v.pass;
    }
    return failures == 0 ? 0 : 1;
}
