#ifndef SIMI_STATS_HPP
#define SIMI_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace simi {

// Acklam's rational approximation with one Halley refinement step.
inline double inverse_normal_cdf(double u) {
    if (u <= 0.0 || u >= 1.0) throw std::invalid_argument("quantile argument must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01, -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (u < plow) {
        double q = std::sqrt(-2 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    } else if (u <= 1 - plow) {
        double q = u - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    } else {
        double q = std::sqrt(-2 * std::log(1 - u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - u;
    double g = e * std::sqrt(2 * M_PI) * std::exp(x * x / 2);
    return x - g / (1 + x * g / 2);
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double sum = 1.0 / a, term = sum;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q domain error");
    if (x == 0) return 1.0;
    if (x < a + 1) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

/// P(X > stat) for a chi-squared variable with `dof` degrees of freedom.
inline double chi_square_pvalue(double stat, int dof) {
    if (dof < 1) throw std::invalid_argument("dof must be >= 1");
    return gamma_q(dof / 2.0, stat / 2.0);
}

struct ChiSquareReport {
    double statistic = 0;
    int dof = 0;
    double pvalue = 1;
    std::size_t cells = 0;
};

/// Two-sample chi-square homogeneity test over matched count vectors.
/// Adjacent cells are merged until every pooled expected count is >= 5.
inline ChiSquareReport chi_square_homogeneity(std::vector<double> c1, std::vector<double> c2) {
    if (c1.size() != c2.size() || c1.empty()) throw std::invalid_argument("mismatched count vectors");
    // merge low-expectation cells into the previous one
    std::vector<double> a, b;
    for (std::size_t i = 0; i < c1.size(); ++i) {
        if (!a.empty() && (a.back() + b.back()) < 5.0) {
            a.back() += c1[i];
            b.back() += c2[i];
        } else {
            a.push_back(c1[i]);
            b.push_back(c2[i]);
        }
    }
    while (a.size() > 1 && (a.back() + b.back()) < 5.0) {
        a[a.size() - 2] += a.back();
        b[b.size() - 2] += b.back();
        a.pop_back();
        b.pop_back();
    }
    double n1 = 0, n2 = 0;
    for (double v : a) n1 += v;
    for (double v : b) n2 += v;
    if (n1 <= 0 || n2 <= 0) throw std::invalid_argument("empty sample");
    ChiSquareReport rep;
    rep.cells = a.size();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double pooled = (a[i] + b[i]) / (n1 + n2);
        const double e1 = pooled * n1, e2 = pooled * n2;
        if (pooled == 0) continue;
        rep.statistic += (a[i] - e1) * (a[i] - e1) / e1 + (b[i] - e2) * (b[i] - e2) / e2;
    }
    rep.dof = static_cast<int>(rep.cells) - 1;
    if (rep.dof < 1) rep.dof = 1;
    rep.pvalue = chi_square_pvalue(rep.statistic, rep.dof);
    return rep;
}

/// Kolmogorov-Smirnov distance between an empirical sample of positive
/// integers and the geometric law on {1,2,...} with success probability q:
/// P(X <= k) = 1 - (1-q)^k.
inline double ks_distance_geometric(const std::vector<std::uint64_t>& sample, double q) {
    if (sample.empty()) throw std::invalid_argument("empty sample");
    if (q <= 0 || q > 1) throw std::invalid_argument("q must be in (0,1]");
    std::vector<std::uint64_t> s = sample;
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double dist = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        const double below = static_cast<double>(i) / n;  // F_hat on [prev value, k-1]
        const double at = static_cast<double>(j) / n;     // F_hat(k)
        const double model = 1.0 - std::pow(1.0 - q, static_cast<double>(s[i]));
        const double model_prev = 1.0 - std::pow(1.0 - q, static_cast<double>(s[i]) - 1.0);
        dist = std::max({dist, std::abs(at - model), std::abs(below - model_prev)});
        i = j;
    }
    return dist;
}

struct SampleStats {
    double mean = 0;
    double variance = 0;
    std::size_t n = 0;
    double stderr_mean() const { return n > 1 ? std::sqrt(variance / static_cast<double>(n)) : 0.0; }
};

inline SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.n = xs.size();
    if (s.n == 0) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(s.n);
    for (double x : xs) s.variance += (x - s.mean) * (x - s.mean);
    if (s.n > 1) s.variance /= static_cast<double>(s.n - 1);
    return s;
}

}  // namespace simi

#endif  // SIMI_STATS_HPP
