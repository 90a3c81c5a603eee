#pragma once

// Poisson-binomial probabilities and the tail-extremality checks built on
// them: is the equal-probability vector (p, ..., p) the maximiser of
// P(exactly q successes) over {sum p_i = m} when q is far from m?

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace primelab {

// Success probabilities p_1..p_k with m = sum p_i and p = m / k.
class PBParams {
public:
    // Throws DomainError if empty or any p_i outside [0, 1].
    explicit PBParams(std::vector<double> probs);

    std::span<const double> probs() const noexcept { return probs_; }
    std::size_t k() const noexcept { return probs_.size(); }
    double m() const noexcept { return m_; }
    double p() const noexcept { return m_ / static_cast<double>(probs_.size()); }
    bool is_equal() const noexcept;

    friend bool operator==(const PBParams& a, const PBParams& b) { return a.probs_ == b.probs_; }

private:
    std::vector<double> probs_;
    double m_ = 0.0;
};

enum class TailSide { lower, upper, either };
enum class TailRegion { lower, upper, not_applicable };

// Success count q with the window constant A; the lower tail is q < m - A sqrt(m),
// the upper tail q > m + A sqrt(m).
struct TailQuery {
    std::size_t q = 0;
    double A = 2.0;
    TailSide side = TailSide::either;
};

// Region q falls in for mean m. A <= 1 is outside the hypothesis and always
// yields not_applicable.
TailRegion classify(const TailQuery& query, double m);
const char* to_string(TailRegion region);

enum class ExtremalVerdict { satisfied, violated, not_applicable };

struct ExtremalReport {
    TailQuery query;
    TailRegion region = TailRegion::not_applicable;
    double h_value = 0.0;        // P(q successes) at the checked (or best found) vector
    double binomial_value = 0.0; // same probability at the equal-probability vector
    ExtremalVerdict verdict = ExtremalVerdict::not_applicable;
    bool equal_is_max = true;    // extremal_search only
    std::size_t points_examined = 0;
    std::optional<PBParams> witness;

    bool satisfied() const noexcept { return verdict == ExtremalVerdict::satisfied; }
};

// Full distribution P(S = 0..k) by the forward convolution recurrence. No
// validation: values outside [0, 1] are evaluated as the multilinear polynomial.
std::vector<double> pb_distribution(std::span<const double> probs);

// P(S = q); IndexError if q > k.
double pb_pmf(const PBParams& params, std::size_t q);

// Same probability in exact rational arithmetic, rounded once at the end.
// SizeError for k > 20.
double pb_pmf_exact(const PBParams& params, std::size_t q);

// C(k, q) p^q (1-p)^(k-q), evaluated in log space.
double binomial_pmf(std::size_t k, double p, std::size_t q);

// Compares P(q) at params with the binomial value at the same mean. Never
// throws on a failed inequality; records the params as witness instead.
ExtremalReport check_extremal(const PBParams& params, const TailQuery& query);

// max_i |dh/dp_i - mean_j dh/dp_j| by central differences (step 1e-6).
// DomainError unless every p_i lies strictly inside (0, 1).
double stationarity_residual(const PBParams& params, std::size_t q);

// Sign of this expression decides whether (p, ..., p) is a local maximum of
// P(q) on the constraint plane. General form for 2 <= q <= k-2, reduced forms
// for q = 1 and q = k-1. DomainError for p in {0, 1} or q outside [1, k-1].
double curvature_expression(std::size_t k, double p, std::size_t q);

// General form with real-valued q (used to check the closed-form roots).
double curvature_expression_real(double k, double p, double q);

// Positive factor linking curvature_expression to the second derivative:
// d2h = 2 C(k-2, q-1) p^(q-1) (1-p)^(k-q-1) * curvature_expression.
double curvature_scale(std::size_t k, double p, std::size_t q);

// Second central difference of t -> P(q) at (p + t, p, ..., p, p - t), i.e. along
// a direction inside the constraint plane.
double restricted_second_difference(std::size_t k, double p, std::size_t q, double step = 1e-3);

struct QRoots {
    double q_minus = 0.0;
    double q_plus = 0.0;
};

// Real roots in q of curvature_expression_real(k, p, q) = 0.
QRoots q_roots(std::size_t k, double p);

struct SearchOptions {
    std::size_t grid = 12;       // probabilities quantised to multiples of 1/grid
    double A = 2.0;
    double tolerance = 1e-9;     // relative slack for "equal point attains the max"
    bool polish = true;          // projected-gradient ascent from the best grid points
    std::size_t polish_starts = 4;
    std::size_t max_k = 12;
    int jobs = 0;
};

// Maximises P(q) over {sum p_i = m, 0 <= p_i <= 1}. SizeError when k > max_k.
ExtremalReport extremal_search(std::size_t k, double m, std::size_t q, const SearchOptions& opts = {});

} // namespace primelab
