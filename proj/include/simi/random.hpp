#ifndef SIMI_RANDOM_HPP
#define SIMI_RANDOM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simi/graph.hpp"

namespace simi {

// ---------------------------------------------------------------------------
// Offspring distribution
// ---------------------------------------------------------------------------

/// Offspring law A with exact mean, P(A=0) and probability generating
/// function.  FinitePMF entries are (value, weight) pairs sorted by value.
struct OffspringSpec {
    enum class Kind { Deterministic, Poisson, Geometric, FinitePMF };

    Kind kind = Kind::Deterministic;
    double param = 1.0;  // k, lambda, or success probability q
    std::vector<std::pair<std::uint32_t, double>> pmf;

    static OffspringSpec deterministic(std::uint32_t k) {
        return {Kind::Deterministic, static_cast<double>(k), {}};
    }
    static OffspringSpec poisson(double lambda) {
        if (lambda < 0) throw std::invalid_argument("poisson rate must be >= 0");
        return {Kind::Poisson, lambda, {}};
    }
    /// P(A=k) = q (1-q)^k on {0,1,2,...}.
    static OffspringSpec geometric(double q) {
        if (q <= 0 || q > 1) throw std::invalid_argument("geometric parameter must be in (0,1]");
        return {Kind::Geometric, q, {}};
    }
    static OffspringSpec finite_pmf(std::vector<std::pair<std::uint32_t, double>> entries) {
        double total = 0;
        for (auto& [v, w] : entries) {
            if (w < 0) throw std::invalid_argument("pmf weights must be nonnegative");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("pmf weights must sum to 1");
        std::sort(entries.begin(), entries.end());
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i].first == entries[i - 1].first)
                throw std::invalid_argument("duplicate pmf value");
        return {Kind::FinitePMF, 0.0, std::move(entries)};
    }

    double mean() const {
        switch (kind) {
            case Kind::Deterministic: return param;
            case Kind::Poisson: return param;
            case Kind::Geometric: return (1.0 - param) / param;
            case Kind::FinitePMF: {
                double m = 0;
                for (auto& [v, w] : pmf) m += static_cast<double>(v) * w;
                return m;
            }
        }
        throw std::logic_error("unreachable");
    }

    double p_zero() const {
        switch (kind) {
            case Kind::Deterministic: return param == 0 ? 1.0 : 0.0;
            case Kind::Poisson: return std::exp(-param);
            case Kind::Geometric: return param;
            case Kind::FinitePMF: {
                for (auto& [v, w] : pmf)
                    if (v == 0) return w;
                return 0.0;
            }
        }
        throw std::logic_error("unreachable");
    }

    bool always_positive() const { return p_zero() == 0.0; }

    /// E[s^A] for s in [0,1].
    double pgf(double s) const {
        switch (kind) {
            case Kind::Deterministic: return std::pow(s, param);
            case Kind::Poisson: return std::exp(param * (s - 1.0));
            case Kind::Geometric: return param / (1.0 - (1.0 - param) * s);
            case Kind::FinitePMF: {
                double g = 0;
                for (auto& [v, w] : pmf) g += w * std::pow(s, static_cast<double>(v));
                return g;
            }
        }
        throw std::logic_error("unreachable");
    }

    /// Inversion sampling: the quantile of `u` in (0,1).  Deterministic in u.
    std::uint64_t sample(double u) const {
        switch (kind) {
            case Kind::Deterministic: return static_cast<std::uint64_t>(param);
            case Kind::Poisson: {
                // exact CDF walk; adequate at desk-scale rates
                double prob = std::exp(-param);
                double cdf = prob;
                std::uint64_t k = 0;
                while (u > cdf && k < 100000) {
                    ++k;
                    prob *= param / static_cast<double>(k);
                    cdf += prob;
                }
                return k;
            }
            case Kind::Geometric: {
                if (param == 1.0) return 0;
                double g = std::floor(std::log1p(-u) / std::log1p(-param));
                return g < 0 ? 0 : static_cast<std::uint64_t>(g);
            }
            case Kind::FinitePMF: {
                double cdf = 0;
                for (auto& [v, w] : pmf) {
                    cdf += w;
                    if (u <= cdf) return v;
                }
                return pmf.empty() ? 0 : pmf.back().first;
            }
        }
        throw std::logic_error("unreachable");
    }

    /// A | A >= 1.  Poisson/Geometric tails are truncated at negligible mass
    /// and renormalized into a FinitePMF.
    OffspringSpec conditioned_positive() const {
        const double pz = p_zero();
        if (pz >= 1.0) throw std::invalid_argument("offspring is almost surely 0; cannot condition on A >= 1");
        if (pz == 0.0) return *this;
        std::vector<std::pair<std::uint32_t, double>> entries;
        switch (kind) {
            case Kind::FinitePMF: {
                for (auto& [v, w] : pmf)
                    if (v >= 1 && w > 0) entries.emplace_back(v, w / (1.0 - pz));
                break;
            }
            case Kind::Poisson:
            case Kind::Geometric: {
                double cdf = 0;
                for (std::uint32_t v = 1; v < 4096; ++v) {
                    double w = kind == Kind::Poisson
                                   ? std::exp(-param + v * std::log(param) - std::lgamma(v + 1.0))
                                   : param * std::pow(1.0 - param, static_cast<double>(v));
                    if (w > 0) entries.emplace_back(v, w);
                    cdf += w;
                    if (1.0 - pz - cdf < 1e-14 && v > 1) break;
                }
                double total = 0;
                for (auto& [v, w] : entries) total += w;
                for (auto& [v, w] : entries) w /= total;
                break;
            }
            case Kind::Deterministic: throw std::logic_error("unreachable");
        }
        return finite_pmf(std::move(entries));
    }

    std::string describe() const {
        switch (kind) {
            case Kind::Deterministic: return "deterministic(" + std::to_string(static_cast<int>(param)) + ")";
            case Kind::Poisson: return "poisson(" + std::to_string(param) + ")";
            case Kind::Geometric: return "geometric(" + std::to_string(param) + ")";
            case Kind::FinitePMF: {
                std::string s = "pmf{";
                for (std::size_t i = 0; i < pmf.size(); ++i) {
                    if (i) s += ",";
                    s += std::to_string(pmf[i].first) + ":" + std::to_string(pmf[i].second);
                }
                return s + "}";
            }
        }
        return "?";
    }

    bool operator==(const OffspringSpec&) const = default;
};

// ---------------------------------------------------------------------------
// Counter-based keyed generator
// ---------------------------------------------------------------------------

namespace detail {

// Stafford mix13 variant of the splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace detail

enum class Domain : std::uint64_t {
    Immunity = 0x11,
    Offspring = 0x22,
    Walk = 0x33,
    Jump = 0x44,
};

/// Every random object of the probability space is a pure function of
/// (master seed, trial index, domain tag, vertex key, counters).  No
/// sequential state, so query order cannot matter.
class HostField {
public:
    HostField(std::uint64_t master_seed, std::uint64_t trial_index,
              GraphSpec spec, OffspringSpec offspring)
        : spec_(std::move(spec)), offspring_(std::move(offspring)), master_seed_(master_seed),
          trial_(trial_index) {
        base_ = detail::mix64(detail::mix64(master_seed) ^ detail::mix64(trial_index * 0xd1342543de82ef95ull + 1));
    }

    const GraphSpec& graph() const { return spec_; }
    const OffspringSpec& offspring_spec() const { return offspring_; }
    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t trial_index() const { return trial_; }

    /// U_x, 53-bit uniform in (0,1).
    double uniform(const VertexKey& v) const {
        return to_unit(draw(Domain::Immunity, v, 0, 0));
    }

    /// Susceptible iff U_x <= p.
    bool susceptible(const VertexKey& v, double p) const {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
        return uniform(v) <= p;
    }

    /// A_x.
    std::uint64_t offspring(const VertexKey& v) const {
        return offspring_.sample(to_unit(draw(Domain::Offspring, v, 0, 0)));
    }

    /// Step `age` of the walk Y^{birth,index}: uniform over the neighbours of
    /// `current`.  The whole trajectory is a function of (seed, label).
    VertexKey walk_step(const VertexKey& birth, std::uint32_t index, std::uint64_t age,
                        const VertexKey& current) const {
        const auto deg = static_cast<std::uint64_t>(degree_of(spec_, current));
        return neighbor_at(spec_, current, static_cast<int>(draw(Domain::Walk, birth, index, age) % deg));
    }

    /// D^x_k: uniform over the neighbours of x, keyed by the cumulative jump
    /// count k >= 1 at x.
    VertexKey jump_direction(const VertexKey& x, std::uint64_t k) const {
        if (k < 1) throw std::invalid_argument("jump counter starts at 1");
        const auto deg = static_cast<std::uint64_t>(degree_of(spec_, x));
        return neighbor_at(spec_, x, static_cast<int>(draw(Domain::Jump, x, 0, k) % deg));
    }

    std::uint64_t raw(Domain d, const VertexKey& v, std::uint64_t c1, std::uint64_t c2) const {
        return draw(d, v, c1, c2);
    }

private:
    std::uint64_t draw(Domain d, const VertexKey& v, std::uint64_t c1, std::uint64_t c2) const {
        std::uint64_t h = base_;
        h = detail::mix64(h ^ (static_cast<std::uint64_t>(d) * 0xff51afd7ed558ccdull));
        h = detail::mix64(h ^ key_fingerprint(v));
        h = detail::mix64(h ^ (c1 * 0xc4ceb9fe1a85ec53ull + 0x165667b19e3779f9ull));
        h = detail::mix64(h ^ (c2 * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
        return detail::mix64(h);
    }

    static double to_unit(std::uint64_t x) {
        return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
    }

    GraphSpec spec_;
    OffspringSpec offspring_;
    std::uint64_t master_seed_ = 0;
    std::uint64_t trial_ = 0;
    std::uint64_t base_ = 0;
};

}  // namespace simi

#endif  // SIMI_RANDOM_HPP
