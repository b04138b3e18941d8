#ifndef SIMI_ANALYTICS_HPP
#define SIMI_ANALYTICS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "simi/dynamics.hpp"
#include "simi/random.hpp"
#include "simi/stats.hpp"

namespace simi {

// ---------------------------------------------------------------------------
// Branching-process extinction
// ---------------------------------------------------------------------------

struct BGWResult {
    double extinction_prob = 1;
    double survival_prob = 0;
    double mean_offspring = 0;
    std::uint64_t iterations = 0;
};

/// Extinction probability of the BGW process whose offspring is A with
/// probability p and 0 with probability 1-p: the smallest fixed point of
/// s -> (1-p) + p E[s^A], reached by iterating from s = 0.
inline BGWResult bgw_extinction(const OffspringSpec& offspring, double p, double tol = 1e-12,
                                std::uint64_t max_iter = 2000000) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
    BGWResult res;
    res.mean_offspring = p * offspring.mean();
    // mean <= 1 forces extinction a.s. unless the effective offspring is
    // degenerate at 1; the fixed-point iteration only converges polynomially
    // at criticality, so answer exactly instead.
    const bool degenerate_one =
        p == 1.0 && offspring.p_zero() == 0.0 && offspring.mean() == 1.0;
    if (res.mean_offspring <= 1.0 && !degenerate_one) {
        res.extinction_prob = 1.0;
        res.survival_prob = 0.0;
        return res;
    }
    double s = 0.0;
    for (std::uint64_t i = 0; i < max_iter; ++i) {
        const double next = (1.0 - p) + p * offspring.pgf(s);
        ++res.iterations;
        if (std::abs(next - s) <= tol) {
            s = next;
            break;
        }
        s = next;
    }
    res.extinction_prob = std::min(1.0, s);
    res.survival_prob = 1.0 - res.extinction_prob;
    return res;
}

/// p_c(G, A) >= min{1, 1/E[A]} on any infinite graph; 1/inf := 0.
inline double offspring_mean_bound(const OffspringSpec& offspring) {
    const double m = offspring.mean();
    if (m <= 0) return 1.0;
    if (!std::isfinite(m)) return 0.0;
    return std::min(1.0, 1.0 / m);
}

/// p_c(G, A) >= 1/(Delta - 1) when degrees are bounded by Delta.
inline double degree_bound(int max_degree) {
    if (max_degree < 2) throw std::invalid_argument("degree bound requires Delta >= 2");
    return 1.0 / static_cast<double>(max_degree - 1);
}

// ---------------------------------------------------------------------------
// Decorated-clique escape probabilities
// ---------------------------------------------------------------------------

/// Probability that a parasite born on a uniformly-susceptible-or-immune
/// clique vertex (not the exit) leaves the decoration K_{n+1} before dying,
/// given exactly l immune hosts among the n interior vertices.
inline double escape_prob_interior(int n, int l) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (l < 0 || l > n) throw std::invalid_argument("l must be in [0, n]");
    const double nn = n, ll = l;
    return 3.0 * (nn - ll) / (nn * ((nn + 4.0) * ll + 3.0));
}

/// Same escape probability for a parasite born on the exit vertex (x, 0).
inline double escape_prob_exit(int n, int l) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (l < 0 || l > n) throw std::invalid_argument("l must be in [0, n]");
    const double nn = n, ll = l;
    return 3.0 * (ll + 1.0) / ((nn + 4.0) * ll + 3.0);
}

/// Mean offspring E[xi_1] of the clique-exploration branching process on the
/// decorated tree: the binomial average over the immune count of
/// 3 * exit-escape + 2n * interior-escape, with log-space binomial weights.
inline double decorated_offspring_mean(int n, double p) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("p must be in (0,1)");
    double total = 0;
    const double lp = std::log(p), lq = std::log1p(-p);
    for (int l = 0; l <= n; ++l) {
        const double logw = std::lgamma(n + 1.0) - std::lgamma(l + 1.0) - std::lgamma(n - l + 1.0) +
                            (n - l) * lp + l * lq;
        const double w = std::exp(logw);
        total += w * (3.0 * escape_prob_exit(n, l) + 2.0 * n * escape_prob_interior(n, l));
    }
    return total;
}

/// The paper's closed upper bound on E[xi_1], for cross-checks.
inline double decorated_offspring_mean_bound(int n, double p) {
    const double pn = std::pow(p, n);
    return 3.0 * (pn + 6.0 / (n + 4.0)) + 2.0 * n * (pn + 6.0 / ((n + 4.0) * n * (1.0 - p)));
}

// ---------------------------------------------------------------------------
// Thinned immunity reduction
// ---------------------------------------------------------------------------

struct ThinnedParameters {
    // susceptibility predicate: U_x <= p AND A_x >= 1
    double effective_susceptibility = 0;  // P(U <= p, A >= 1) = p P(A >= 1)
    OffspringSpec conditioned;            // A | A >= 1
    bool modified = false;                // false when P(A=0) = 0
};

inline ThinnedParameters thinned_parameters(const OffspringSpec& offspring, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
    const double pz = offspring.p_zero();
    if (pz >= 1.0) throw std::invalid_argument("offspring is almost surely 0");
    ThinnedParameters out{p * (1.0 - pz), offspring.conditioned_positive(), pz > 0.0};
    return out;
}

// ---------------------------------------------------------------------------
// Estimation utilities
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0;
    double hi = 1;
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double level) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (successes > trials) throw std::invalid_argument("successes must be <= trials");
    if (level <= 0 || level >= 1) throw std::invalid_argument("level must be in (0,1)");
    const double z = inverse_normal_cdf(0.5 + level / 2.0);
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2 * n)) / denom;
    const double half = z * std::sqrt(phat * (1 - phat) / n + z2 / (4 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct SweepRow {
    double p = 0;
    std::uint64_t trials = 0;
    std::uint64_t survivors = 0;
    std::uint64_t censored_time = 0;
    std::uint64_t censored_population = 0;
    std::uint64_t censored_radius = 0;
    double frequency = 0;
    Interval ci;
};

/// Survival frequency at one p.  Trials use trial indices [0, trials) on the
/// given master seed, so rows at different p on the same seed are
/// seed-matched (shared HostField per trial).
inline SweepRow survival_at(const GraphSpec& spec, const OffspringSpec& offspring, double p,
                            std::uint64_t trials, const StopRule& stop, std::uint64_t seed,
                            double level = 0.95, EngineKind kind = EngineKind::VertexWise,
                            const EngineOptions& opt = {}) {
    SweepRow row;
    row.p = p;
    row.trials = trials;
    const auto o = origin(spec);
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, offspring);
        const TrialOutcome out = run_trial(field, p, {o}, stop, kind, opt);
        if (out.survived()) ++row.survivors;
        switch (out.status) {
            case TrialStatus::CensoredTime: ++row.censored_time; break;
            case TrialStatus::CensoredPopulation: ++row.censored_population; break;
            case TrialStatus::CensoredRadius: ++row.censored_radius; break;
            case TrialStatus::Extinct: break;
        }
    }
    row.frequency = static_cast<double>(row.survivors) / static_cast<double>(trials);
    row.ci = wilson_interval(row.survivors, trials, level);
    return row;
}

struct PcBand {
    double p_minus = 0;  // largest tested p whose survival CI includes 0
    double p_plus = 1;   // smallest tested p whose survival CI excludes 0
    bool all_zero = false;      // no survivors anywhere in the bracket
    bool all_positive = false;  // CI excludes 0 already at the bracket bottom
    bool nonmonotone_flag = false;
    std::vector<SweepRow> rows;  // sorted by p
};

/// Adaptive bisection of the survival frequency in p.  "CI includes 0" is
/// equivalent to zero observed survivors under the Wilson interval.
inline PcBand estimate_pc(const GraphSpec& spec, const OffspringSpec& offspring,
                          std::uint64_t trials_per_point, const StopRule& stop, double p_lo,
                          double p_hi, double resolution, std::uint64_t seed, double level = 0.95,
                          EngineKind kind = EngineKind::VertexWise) {
    if (!(p_lo < p_hi)) throw std::invalid_argument("need p_lo < p_hi");
    if (resolution <= 0 || p_hi - p_lo < resolution)
        throw std::invalid_argument("bracket narrower than resolution");
    PcBand band;
    auto eval = [&](double p) -> const SweepRow& {
        band.rows.push_back(survival_at(spec, offspring, p, trials_per_point, stop, seed, level, kind));
        return band.rows.back();
    };
    const bool lo_pos = eval(p_lo).survivors > 0;
    const bool hi_pos = eval(p_hi).survivors > 0;
    if (!hi_pos) {
        band.all_zero = true;
        band.p_minus = band.p_plus = p_hi;
    } else if (lo_pos) {
        band.all_positive = true;
        band.p_minus = band.p_plus = p_lo;
    } else {
        double lo = p_lo, hi = p_hi;
        while (hi - lo > resolution) {
            const double mid = 0.5 * (lo + hi);
            if (eval(mid).survivors > 0)
                hi = mid;
            else
                lo = mid;
        }
        band.p_minus = lo;
        band.p_plus = hi;
    }
    std::sort(band.rows.begin(), band.rows.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.p < b.p; });
    for (std::size_t i = 0; i + 1 < band.rows.size(); ++i)
        if (band.rows[i].survivors > 0 && band.rows[i + 1].survivors == 0) band.nonmonotone_flag = true;
    return band;
}

}  // namespace simi

#endif  // SIMI_ANALYTICS_HPP
