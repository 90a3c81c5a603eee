#include "primelab/pbin.hpp"

#include "primelab/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <omp.h>

namespace primelab {
namespace {

// First q+1 entries of the Poisson-binomial distribution.
std::vector<double> truncated_distribution(std::span<const double> probs, std::size_t q) {
    std::vector<double> dist(q + 1, 0.0);
    dist[0] = 1.0;
    std::size_t filled = 0;
    for (const double p : probs) {
        const double r = 1.0 - p;
        filled = std::min(filled + 1, q);
        for (std::size_t j = filled; j > 0; --j) dist[j] = dist[j] * r + dist[j - 1] * p;
        dist[0] *= r;
    }
    return dist;
}

double pmf_unchecked(std::span<const double> probs, std::size_t q) {
    if (q > probs.size()) return 0.0;
    return truncated_distribution(probs, q)[q];
}

double log_choose(std::size_t k, std::size_t q) {
    return std::lgamma(static_cast<double>(k) + 1.0) - std::lgamma(static_cast<double>(q) + 1.0) -
           std::lgamma(static_cast<double>(k - q) + 1.0);
}

// Euclidean projection onto {sum x = m, 0 <= x <= 1}.
void project_to_slice(std::vector<double>& y, double m) {
    double lo = *std::min_element(y.begin(), y.end()) - 1.0;
    double hi = *std::max_element(y.begin(), y.end());
    auto mass = [&](double tau) {
        double s = 0.0;
        for (double v : y) s += std::clamp(v - tau, 0.0, 1.0);
        return s;
    };
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (mass(mid) > m ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    for (double& v : y) v = std::clamp(v - tau, 0.0, 1.0);
}

std::vector<double> pmf_gradient(std::span<const double> x, std::size_t q) {
    std::vector<double> g(x.size());
    std::vector<double> others;
    others.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        others.assign(x.begin(), x.end());
        others.erase(others.begin() + static_cast<std::ptrdiff_t>(i));
        const auto d = truncated_distribution(others, q);
        const double at_q = q <= others.size() ? d[q] : 0.0;
        g[i] = (q > 0 ? d[q - 1] : 0.0) - at_q;
    }
    return g;
}

struct Candidate {
    double value;
    std::vector<double> point;
};

Candidate ascend(std::vector<double> x, double m, std::size_t q) {
    double fx = pmf_unchecked(x, q);
    double step = 0.1;
    for (int it = 0; it < 2000 && step > 1e-14; ++it) {
        const auto g = pmf_gradient(x, q);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + step * g[i];
        project_to_slice(y, m);
        const double fy = pmf_unchecked(y, q);
        if (fy > fx) {
            x = std::move(y);
            fx = fy;
            step *= 1.5;
        } else {
            step *= 0.5;
        }
    }
    return {fx, std::move(x)};
}

// Visits nonincreasing level vectors j_1 >= ... >= j_{k-1} in [0, grid] whose
// completion p_k = m - sum j / grid lies in [0, 1]; emits the full k-vector.
class GridWalker {
public:
    GridWalker(std::size_t k, double m, std::size_t grid) : k_(k), m_(m), grid_(grid), levels_(k - 1) {}

    void run(const std::function<void(const std::vector<double>&)>& emit) {
        emit_ = &emit;
        recurse(0, grid_, 0);
    }

private:
    void recurse(std::size_t depth, std::size_t max_level, std::size_t sum) {
        const double g = static_cast<double>(grid_);
        if (depth == k_ - 1) {
            double last = m_ - static_cast<double>(sum) / g;
            if (last < -1e-12 || last > 1.0 + 1e-12) return;
            last = std::clamp(last, 0.0, 1.0);
            point_.resize(k_);
            for (std::size_t i = 0; i + 1 < k_; ++i) point_[i] = static_cast<double>(levels_[i]) / g;
            point_[k_ - 1] = last;
            (*emit_)(point_);
            return;
        }
        const std::size_t remaining = k_ - 1 - depth;
        for (std::size_t j = max_level + 1; j-- > 0;) {
            const double s_min = static_cast<double>(sum + j);
            if (s_min / g > m_ + 1e-12) continue;
            const double s_max = static_cast<double>(sum + j * remaining);
            if (s_max / g < m_ - 1.0 - 1e-12) break;
            levels_[depth] = j;
            recurse(depth + 1, j, sum + j);
        }
    }

    std::size_t k_;
    double m_;
    std::size_t grid_;
    std::vector<std::size_t> levels_;
    std::vector<double> point_;
    const std::function<void(const std::vector<double>&)>* emit_ = nullptr;
};

} // namespace

PBParams::PBParams(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DomainError("PBParams needs k >= 1");
    for (const double p : probs_) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability outside [0, 1]");
        m_ += p;
    }
}

bool PBParams::is_equal() const noexcept {
    return std::all_of(probs_.begin(), probs_.end(), [&](double p) { return p == probs_.front(); });
}

TailRegion classify(const TailQuery& query, double m) {
    if (!(query.A > 1.0)) return TailRegion::not_applicable;
    const double half = query.A * std::sqrt(m);
    const double q = static_cast<double>(query.q);
    const bool lower = q < m - half;
    const bool upper = q > m + half;
    switch (query.side) {
    case TailSide::lower: return lower ? TailRegion::lower : TailRegion::not_applicable;
    case TailSide::upper: return upper ? TailRegion::upper : TailRegion::not_applicable;
    case TailSide::either: break;
    }
    if (lower) return TailRegion::lower;
    if (upper) return TailRegion::upper;
    return TailRegion::not_applicable;
}

const char* to_string(TailRegion region) {
    switch (region) {
    case TailRegion::lower: return "lower";
    case TailRegion::upper: return "upper";
    case TailRegion::not_applicable: return "na";
    }
    return "na";
}

std::vector<double> pb_distribution(std::span<const double> probs) {
    return truncated_distribution(probs, probs.size());
}

double pb_pmf(const PBParams& params, std::size_t q) {
    if (q > params.k()) throw IndexError("q outside [0, k]");
    return pmf_unchecked(params.probs(), q);
}

double pb_pmf_exact(const PBParams& params, std::size_t q) {
    using boost::multiprecision::cpp_rational;
    if (params.k() > 20) throw SizeError("exact rational mode is limited to k <= 20");
    if (q > params.k()) throw IndexError("q outside [0, k]");
    std::vector<cpp_rational> dist(q + 1, cpp_rational(0));
    dist[0] = 1;
    std::size_t filled = 0;
    for (const double pd : params.probs()) {
        const cpp_rational p(pd); // exact binary value of the double
        const cpp_rational r = cpp_rational(1) - p;
        filled = std::min(filled + 1, q);
        for (std::size_t j = filled; j > 0; --j) dist[j] = dist[j] * r + dist[j - 1] * p;
        dist[0] *= r;
    }
    return static_cast<double>(dist[q]);
}

double binomial_pmf(std::size_t k, double p, std::size_t q) {
    if (q > k) throw IndexError("q outside [0, k]");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p outside [0, 1]");
    if (p == 0.0) return q == 0 ? 1.0 : 0.0;
    if (p == 1.0) return q == k ? 1.0 : 0.0;
    const double lp = log_choose(k, q) + static_cast<double>(q) * std::log(p) +
                      static_cast<double>(k - q) * std::log1p(-p);
    return std::exp(lp);
}

ExtremalReport check_extremal(const PBParams& params, const TailQuery& query) {
    if (query.q > params.k()) throw IndexError("q outside [0, k]");
    ExtremalReport rep;
    rep.query = query;
    rep.region = classify(query, params.m());
    rep.h_value = pb_pmf(params, query.q);
    rep.binomial_value = binomial_pmf(params.k(), std::clamp(params.p(), 0.0, 1.0), query.q);
    rep.points_examined = 1;
    rep.equal_is_max = rep.h_value <= rep.binomial_value + 1e-12 * rep.binomial_value;
    if (rep.region == TailRegion::not_applicable) {
        rep.verdict = ExtremalVerdict::not_applicable;
    } else if (rep.equal_is_max) {
        rep.verdict = ExtremalVerdict::satisfied;
    } else {
        rep.verdict = ExtremalVerdict::violated;
        rep.witness = params;
    }
    return rep;
}

double stationarity_residual(const PBParams& params, std::size_t q) {
    if (q > params.k()) throw IndexError("q outside [0, k]");
    for (const double p : params.probs())
        if (!(p > 0.0 && p < 1.0)) throw DomainError("stationarity residual needs 0 < p_i < 1");
    constexpr double step = 1e-6;
    std::vector<double> x(params.probs().begin(), params.probs().end());
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double keep = x[i];
        x[i] = keep + step;
        const double up = pmf_unchecked(x, q);
        x[i] = keep - step;
        const double down = pmf_unchecked(x, q);
        x[i] = keep;
        g[i] = (up - down) / (2 * step);
    }
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double worst = 0.0;
    for (double v : g) worst = std::max(worst, std::abs(v - mean));
    return worst;
}

double curvature_expression_real(double k, double p, double q) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("curvature expression needs 0 < p < 1");
    const double a = (1.0 - p) / p;
    return -((q - 1.0) / (k - q)) * a + 2.0 - ((k - q - 1.0) / q) / a;
}

double curvature_expression(std::size_t k, double p, std::size_t q) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("curvature expression needs 0 < p < 1");
    if (q < 1 || q + 1 > k) throw DomainError("curvature expression needs 1 <= q <= k-1");
    const double kd = static_cast<double>(k), qd = static_cast<double>(q);
    if (q == 1) return 2.0 - ((kd - qd - 1.0) / qd) * (p / (1.0 - p));
    if (q == k - 1) return -((qd - 1.0) / (kd - qd)) * ((1.0 - p) / p) + 2.0;
    return curvature_expression_real(kd, p, qd);
}

double curvature_scale(std::size_t k, double p, std::size_t q) {
    if (q < 1 || q + 1 > k) throw DomainError("curvature scale needs 1 <= q <= k-1");
    return 2.0 * binomial_pmf(k - 2, p, q - 1);
}

double restricted_second_difference(std::size_t k, double p, std::size_t q, double step) {
    if (k < 2) throw DomainError("restricted second difference needs k >= 2");
    std::vector<double> x(k, p);
    auto at = [&](double t) {
        x.front() = p + t;
        x.back() = p - t;
        return pmf_unchecked(x, q);
    };
    const double up = at(step), mid = at(0.0), down = at(-step);
    return (up - 2.0 * mid + down) / (step * step);
}

QRoots q_roots(std::size_t k, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("q_roots needs 0 < p < 1");
    const double a = (1.0 - p) / p;
    const double m = static_cast<double>(k) * p;
    const double shift = (1.0 - a) / (2.0 * (1.0 + a));
    const double radius = std::sqrt(a / (1.0 + a) * m + shift * shift);
    return {m - shift - radius, m - shift + radius};
}

ExtremalReport extremal_search(std::size_t k, double m, std::size_t q, const SearchOptions& opts) {
    if (k < 1) throw DomainError("extremal search needs k >= 1");
    if (k > opts.max_k) throw SizeError("exhaustive grid search is limited to k <= " + std::to_string(opts.max_k));
    if (!(m >= 0.0 && m <= static_cast<double>(k))) throw DomainError("mean m outside [0, k]");
    if (q > k) throw IndexError("q outside [0, k]");
    if (opts.grid < 1) throw DomainError("grid resolution must be positive");

    ExtremalReport rep;
    rep.query = {q, opts.A, TailSide::either};
    rep.region = classify(rep.query, m);
    const double p = std::clamp(m / static_cast<double>(k), 0.0, 1.0);
    const double equal_value = binomial_pmf(k, p, q);
    rep.binomial_value = equal_value;

    // Chunks are evaluated in parallel and reduced in enumeration order.
    constexpr std::size_t chunk = 1 << 15;
    std::vector<double> buffer;
    buffer.reserve(chunk * k);
    std::vector<double> values;
    std::vector<Candidate> top; // best first; ties keep the earlier point
    const std::size_t keep = std::max<std::size_t>(opts.polish_starts, 1);
    const int jobs = opts.jobs > 0 ? opts.jobs : omp_get_max_threads();

    auto flush = [&] {
        const std::size_t n = buffer.size() / k;
        if (n == 0) return;
        values.assign(n, 0.0);
#pragma omp parallel for num_threads(jobs) schedule(static) if (n > 256)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const auto off = static_cast<std::size_t>(i) * k;
            values[static_cast<std::size_t>(i)] = pmf_unchecked(std::span<const double>(buffer).subspan(off, k), q);
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double v = values[i];
            if (top.size() == keep && !(v > top.back().value)) continue;
            auto pos = std::find_if(top.begin(), top.end(), [&](const Candidate& c) { return v > c.value; });
            top.insert(pos, Candidate{v, std::vector<double>(buffer.begin() + static_cast<std::ptrdiff_t>(i * k),
                                                             buffer.begin() + static_cast<std::ptrdiff_t>((i + 1) * k))});
            if (top.size() > keep) top.pop_back();
        }
        rep.points_examined += n;
        buffer.clear();
    };

    GridWalker walker(k, m, opts.grid);
    walker.run([&](const std::vector<double>& pt) {
        buffer.insert(buffer.end(), pt.begin(), pt.end());
        if (buffer.size() >= chunk * k) flush();
    });
    flush();

    Candidate best{equal_value, std::vector<double>(k, p)};
    if (!top.empty() && top.front().value > best.value) best = top.front();
    if (opts.polish) {
        for (const auto& c : top) {
            Candidate polished = ascend(c.point, m, q);
            if (polished.value > best.value) best = std::move(polished);
        }
    }

    rep.equal_is_max = !(best.value > equal_value * (1.0 + opts.tolerance));
    if (rep.equal_is_max) {
        rep.h_value = equal_value;
    } else {
        rep.h_value = best.value;
        rep.witness = PBParams(best.point);
    }
    if (rep.region == TailRegion::not_applicable)
        rep.verdict = ExtremalVerdict::not_applicable;
    else
        rep.verdict = rep.equal_is_max ? ExtremalVerdict::satisfied : ExtremalVerdict::violated;
    return rep;
}

} // namespace primelab
