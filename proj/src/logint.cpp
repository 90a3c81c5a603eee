#include "primelab/logint.hpp"

#include "primelab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

namespace primelab {
namespace {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double integrand(double u) { return std::exp(u) / u; }

struct Panel {
    double lo, hi, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gauss_kronrod(double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    const double fc = integrand(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f = integrand(c - dx) + integrand(c + dx);
        kron += kWgk[j] * f;
        if (j % 2 == 1) gauss += kWg[j / 2] * f;
    }
    return {lo, hi, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace

QuadratureResult integrate_inverse_log(double a, double b, const QuadratureOptions& opts) {
    if (!(a > 1.0) || !(b >= a) || !std::isfinite(b))
        throw DomainError("integrate_inverse_log needs 1 < a <= b < inf");
    if (a == b) return {0.0, 0.0, 0};

    const double ua = std::log(a), ub = std::log(b);
    // Seed with unit-width panels in u; e^u varies by a factor e per panel.
    const int seeds = std::max(1, static_cast<int>(std::ceil(ub - ua)));
    std::priority_queue<Panel> heap;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < seeds; ++i) {
        const double lo = ua + (ub - ua) * i / seeds;
        const double hi = i + 1 == seeds ? ub : ua + (ub - ua) * (i + 1) / seeds;
        Panel p = gauss_kronrod(lo, hi);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    std::size_t count = heap.size();
    while (err > opts.rel_tol * std::abs(total)) {
        if (count >= opts.max_intervals) break;
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        Panel left = gauss_kronrod(worst.lo, mid), right = gauss_kronrod(mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // Recompute the sums from the panels to shed accumulated update roundoff.
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.lo < y.lo; });
    total = 0.0;
    err = 0.0;
    for (const auto& p : panels) {
        total += p.value;
        err += p.error;
    }
    err += 64 * std::numeric_limits<double>::epsilon() * std::abs(total);
    if (err > opts.max_rel_error * std::max(1.0, std::abs(total)))
        throw NumericalError("li quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return {total, err, panels.size()};
}

LiValue li(double n, const QuadratureOptions& opts) {
    if (!(n >= 2.0)) throw DomainError("li needs n >= 2");
    if (n == 2.0) return {2.0, 0.0, 0.0};
    const auto r = integrate_inverse_log(2.0, n, opts);
    return {n, r.value, r.abs_error};
}

QuadratureResult li_interval_detail(double n0, double n1, const QuadratureOptions& opts) {
    if (!(n0 >= 2.0)) throw DomainError("li_interval needs n0 >= 2");
    if (!(n1 >= n0)) throw DomainError("li_interval needs n1 >= n0");
    return integrate_inverse_log(n0, n1, opts);
}

double li_interval(double n0, double n1, const QuadratureOptions& opts) {
    return li_interval_detail(n0, n1, opts).value;
}

LiValue LiCache::get(double n) {
    {
        std::lock_guard lock(mu_);
        if (auto it = values_.find(n); it != values_.end()) return it->second;
    }
    const LiValue v = li(n, opts_);
    std::lock_guard lock(mu_);
    values_.emplace(n, v);
    return v;
}

std::size_t LiCache::size() const {
    std::lock_guard lock(mu_);
    return values_.size();
}

} // namespace primelab
