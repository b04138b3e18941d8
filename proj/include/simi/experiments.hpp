#ifndef SIMI_EXPERIMENTS_HPP
#define SIMI_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "simi/analytics.hpp"
#include "simi/dynamics.hpp"
#include "simi/graph.hpp"
#include "simi/random.hpp"
#include "simi/stats.hpp"

namespace simi {

// ---------------------------------------------------------------------------
// Survival sweep
// ---------------------------------------------------------------------------

struct SweepPlan {
    GraphSpec graph;
    OffspringSpec offspring;
    std::vector<double> p_grid;
    std::uint64_t trials = 1000;
    StopRule stop;
    std::uint64_t seed = 1;
    double level = 0.95;
    EngineKind engine = EngineKind::VertexWise;
};

/// One row per p; rows at different p share HostFields per trial index
/// (seed-matched sweep).
inline std::vector<SweepRow> survival_sweep(const SweepPlan& plan) {
    if (plan.p_grid.empty()) throw std::invalid_argument("p grid must be non-empty");
    std::vector<SweepRow> rows;
    for (double p : plan.p_grid)
        rows.push_back(survival_at(plan.graph, plan.offspring, p, plan.trials, plan.stop, plan.seed,
                                   plan.level, plan.engine));
    return rows;
}

// ---------------------------------------------------------------------------
// Vertex-wise coupling audit
// ---------------------------------------------------------------------------

struct CouplingViolation {
    std::uint64_t trial = 0;
    std::uint64_t step = 0;
    VertexKey vertex;
};

struct CouplingReport {
    std::uint64_t trials = 0;
    std::uint64_t steps_checked = 0;
    std::vector<CouplingViolation> violations;
};

/// Runs the vertex-wise engine at p and p' on the same HostField per trial
/// and checks the inclusion I_n^p subset I_n^{p'} after every step.
inline CouplingReport coupling_audit(const GraphSpec& spec, const OffspringSpec& offspring, double p,
                                     double p_prime, std::uint64_t trials, std::uint64_t horizon,
                                     std::uint64_t seed, std::uint64_t max_parasites = 200000) {
    if (p > p_prime) throw std::invalid_argument("need p <= p_prime");
    CouplingReport rep;
    rep.trials = trials;
    const auto o = origin(spec);
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, offspring);
        VertexWiseEngine lo(field, p, {o});
        VertexWiseEngine hi(field, p_prime, {o});
        for (std::uint64_t n = 0; n < horizon; ++n) {
            if (lo.alive_count() == 0 && hi.alive_count() == 0) break;
            if (lo.alive_count() > max_parasites || hi.alive_count() > max_parasites) break;
            lo.step();
            hi.step();
            ++rep.steps_checked;
            for (const auto& v : lo.infected()) {
                if (!hi.infected().count(v)) {
                    rep.violations.push_back({t, n + 1, v});
                }
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Parasite-wise non-monotonicity witness search
// ---------------------------------------------------------------------------

struct NonmonoWitness {
    std::uint64_t trial = 0;
    bool set_violation = false;   // vertex infected at p, never at p' within horizon
    bool outlive_violation = false;  // p-run alive at horizon while p'-run extinct
};

struct NonmonoReport {
    std::uint64_t trials = 0;
    std::vector<NonmonoWitness> witnesses;
};

/// For each trial, runs the parasite-wise engine at both p values on shared
/// randomness and looks for a failure of the stepwise inclusion
/// I_n^p subset I_n^{p'}: a vertex the low-p run infects strictly earlier
/// than the high-p run (or that the high-p run misses while still running),
/// or the low-p run surviving past the high-p run's extinction.  Witnesses
/// are only counted when the high-p run demonstrably had the chance, i.e.
/// it was still running at the low infection time.
inline NonmonoReport parasitewise_nonmonotone_search(const GraphSpec& spec,
                                                     const OffspringSpec& offspring, double p,
                                                     double p_prime, std::uint64_t trials,
                                                     std::uint64_t horizon, std::uint64_t ball_radius,
                                                     std::uint64_t seed,
                                                     std::uint64_t max_parasites = 20000) {
    if (p > p_prime) throw std::invalid_argument("need p <= p_prime");
    NonmonoReport rep;
    rep.trials = trials;
    const auto o = origin(spec);
    const StopRule stop{horizon, max_parasites, kNoLimit};
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, offspring);
        std::unordered_map<VertexKey, std::uint64_t, VertexHash> t_lo, t_hi;
        EngineOptions lo_opt, hi_opt;
        lo_opt.infection_times = &t_lo;
        hi_opt.infection_times = &t_hi;
        ParasiteWiseEngine lo(field, p, {o}, lo_opt);
        const TrialOutcome lo_out = detail::drive(lo, stop);
        // The origin is infected in both runs from the start: if the low run
        // died without infecting anything else, no witness is possible.
        if (lo_out.status == TrialStatus::Extinct && lo.infected().size() == 1) continue;
        ParasiteWiseEngine hi(field, p_prime, {o}, hi_opt);
        const TrialOutcome hi_out = detail::drive(hi, stop);
        // steps after which the high run's infected set stops being
        // meaningful: censoring cuts it short, extinction does not
        const std::uint64_t hi_known =
            hi_out.status == TrialStatus::Extinct ? horizon : hi_out.steps;
        NonmonoWitness w;
        w.trial = t;
        for (const auto& [v, tl] : t_lo) {
            if (tl > hi_known || graph_distance(spec, o, v) > ball_radius) continue;
            const auto it = t_hi.find(v);
            if (it == t_hi.end() || it->second > tl) {
                w.set_violation = true;
                break;
            }
        }
        if (lo_out.status == TrialStatus::CensoredTime && hi_out.status == TrialStatus::Extinct)
            w.outlive_violation = true;
        if (w.set_violation || w.outlive_violation) rep.witnesses.push_back(w);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Engine distributional equivalence
// ---------------------------------------------------------------------------

struct EquivalenceReport {
    ChiSquareReport chi;
    std::uint64_t trials_per_engine = 0;
    std::vector<double> counts_vertexwise;
    std::vector<double> counts_parasitewise;
};

/// Chi-square homogeneity test of the joint distribution of
/// (extinct-by-horizon, bucketed total infected) across the two engines,
/// with independent seeds per engine.
inline EquivalenceReport construction_equivalence(const GraphSpec& spec,
                                                  const OffspringSpec& offspring, double p,
                                                  std::uint64_t horizon, std::uint64_t trials,
                                                  std::uint64_t seed,
                                                  std::uint64_t max_parasites = 1000000) {
    static const std::uint64_t edges[] = {1, 2, 3, 4, 5, 7, 10, 15, 23, 35, 55, 90, 150, 400, kNoLimit};
    const std::size_t nb = std::size(edges);
    auto bucket_of = [&](std::uint64_t total) {
        for (std::size_t i = 0; i < nb; ++i)
            if (total <= edges[i]) return i;
        return nb - 1;
    };
    EquivalenceReport rep;
    rep.trials_per_engine = trials;
    rep.counts_vertexwise.assign(2 * nb, 0.0);
    rep.counts_parasitewise.assign(2 * nb, 0.0);
    const auto o = origin(spec);
    const StopRule stop{horizon, max_parasites, kNoLimit};
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField f1(seed, t, spec, offspring);
        const TrialOutcome a = run_trial(f1, p, {o}, stop, EngineKind::VertexWise);
        rep.counts_vertexwise[(a.survived() ? nb : 0) + bucket_of(a.total_infected)] += 1;
        HostField f2(seed, trials + t, spec, offspring);
        const TrialOutcome b = run_trial(f2, p, {o}, stop, EngineKind::ParasiteWise);
        rep.counts_parasitewise[(b.survived() ? nb : 0) + bucket_of(b.total_infected)] += 1;
    }
    rep.chi = chi_square_homogeneity(rep.counts_vertexwise, rep.counts_parasitewise);
    return rep;
}

// ---------------------------------------------------------------------------
// Geometric lifetime census (single-parasite law)
// ---------------------------------------------------------------------------

struct LifetimeCensus {
    std::vector<std::uint64_t> fresh_counts;  // fresh vertices examined, incl. the killing one
    std::uint64_t excluded = 0;               // walk cap reached
    double ks_distance = 0;                   // against Geometric(1-p) on {1,2,...}
    SampleStats stats;
};

/// Distribution of the number of distinct fresh vertices a lone parasite
/// examines before dying, which is geometric with parameter 1-p.
inline LifetimeCensus geometric_lifetime_census(const GraphSpec& spec, double p,
                                                std::uint64_t trials, std::uint64_t walk_cap,
                                                std::uint64_t seed) {
    if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("p must be in (0,1)");
    LifetimeCensus census;
    const auto o = origin(spec);
    const OffspringSpec one = OffspringSpec::deterministic(1);
    VertexSet ignore{o};
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, one);
        const auto life = lifetime_and_visited(field, p, o, 1, ignore, walk_cap);
        if (!life.bounded) {
            ++census.excluded;
            continue;
        }
        // visited \ {origin} are the susceptible fresh vertices; +1 for the
        // immune one that killed the walk
        census.fresh_counts.push_back(life.visited.size() - 1 + 1);
    }
    if (!census.fresh_counts.empty()) {
        census.ks_distance = ks_distance_geometric(census.fresh_counts, 1.0 - p);
        std::vector<double> xs(census.fresh_counts.begin(), census.fresh_counts.end());
        census.stats = summarize(xs);
    }
    return census;
}

// ---------------------------------------------------------------------------
// Recurrence census
// ---------------------------------------------------------------------------

struct RecurrenceRow {
    std::uint64_t horizon = 0;
    double mean_visits = 0;
    double tail_over_50 = 0;  // fraction of trials with more than 50 visits
};

struct RecurrenceReport {
    std::vector<RecurrenceRow> rows;  // one per horizon, ascending
    std::uint64_t trials = 0;
    std::uint64_t truncated = 0;  // population cap hit before the last horizon
};

/// Origin-visit counts per trial at a list of ascending horizons.
inline RecurrenceReport recurrence_census(const GraphSpec& spec, const OffspringSpec& offspring,
                                          double p, std::uint64_t trials,
                                          std::vector<std::uint64_t> horizons, std::uint64_t seed,
                                          std::uint64_t max_parasites = 100000) {
    if (horizons.empty()) throw std::invalid_argument("need at least one horizon");
    std::sort(horizons.begin(), horizons.end());
    RecurrenceReport rep;
    rep.trials = trials;
    const auto o = origin(spec);
    std::vector<std::vector<std::uint64_t>> visits(horizons.size());
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, offspring);
        VertexWiseEngine eng(field, p, {o});
        bool truncated = false;
        std::size_t h = 0;
        for (std::uint64_t n = 0; n < horizons.back(); ++n) {
            if (eng.alive_count() == 0) break;
            if (eng.alive_count() > max_parasites) {
                truncated = true;
                break;
            }
            eng.step();
            while (h < horizons.size() && eng.steps_done() == horizons[h]) {
                visits[h].push_back(eng.origin_visits());
                ++h;
            }
        }
        // extinct or truncated before later horizons: the count is frozen
        for (; h < horizons.size(); ++h) visits[h].push_back(eng.origin_visits());
        if (truncated) ++rep.truncated;
    }
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        RecurrenceRow row;
        row.horizon = horizons[h];
        double sum = 0, over = 0;
        for (auto v : visits[h]) {
            sum += static_cast<double>(v);
            if (v > 50) over += 1;
        }
        row.mean_visits = sum / static_cast<double>(trials);
        row.tail_over_50 = over / static_cast<double>(trials);
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Tree asymptotics
// ---------------------------------------------------------------------------

struct TreeAsymptoticsRow {
    int degree = 0;
    PcBand band;
    double mean_bound = 0;
    double degree_bound_value = 0;
};

inline std::vector<TreeAsymptoticsRow> tree_asymptotics(const OffspringSpec& offspring,
                                                        const std::vector<int>& degrees,
                                                        std::uint64_t trials_per_point,
                                                        const StopRule& stop, double p_lo,
                                                        double p_hi, double resolution,
                                                        std::uint64_t seed) {
    std::vector<TreeAsymptoticsRow> rows;
    for (int d : degrees) {
        if (d < 3) throw std::invalid_argument("tree degree must be >= 3");
        TreeAsymptoticsRow row;
        row.degree = d;
        GraphSpec spec{Family::RegularTree, 0, d, 0};
        row.band = estimate_pc(spec, offspring, trials_per_point, stop, p_lo, p_hi, resolution, seed);
        row.mean_bound = offspring_mean_bound(offspring);
        row.degree_bound_value = degree_bound(d);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Decorated-tree non-monotonicity campaign
// ---------------------------------------------------------------------------

struct NonmonotonicityReport {
    double p_probe = 0;
    std::vector<std::pair<int, double>> analytic_means;  // (n, E[xi_1])
    SweepRow decorated;   // survival on the decorated tree with the largest n
    SweepRow base_tree;   // T_3 at the same p
    SweepRow wide_tree;   // T_{d0} at the same p
    int d0 = 16;
};

/// Decoration campaign with offspring fixed at Deterministic(3): analytic
/// subcriticality certificates per n, simulated extinction on the decorated
/// tree, and the survival ordering against T_3 and a wide tree.
inline NonmonotonicityReport nonmonotonicity_campaign(const std::vector<int>& n_list, double p_probe,
                                                      std::uint64_t decorated_trials,
                                                      std::uint64_t tree_trials, int d0,
                                                      const StopRule& stop, std::uint64_t seed) {
    NonmonotonicityReport rep;
    rep.p_probe = p_probe;
    rep.d0 = d0;
    const OffspringSpec off = OffspringSpec::deterministic(3);
    for (int n : n_list) rep.analytic_means.emplace_back(n, decorated_offspring_mean(n, p_probe));
    const int n_big = *std::max_element(n_list.begin(), n_list.end());
    rep.decorated = survival_at(GraphSpec{Family::DecoratedTree, 0, 0, n_big}, off, p_probe,
                                decorated_trials, stop, seed);
    rep.base_tree = survival_at(GraphSpec{Family::RegularTree, 0, 3, 0}, off, p_probe, tree_trials,
                                stop, seed);
    rep.wide_tree = survival_at(GraphSpec{Family::RegularTree, 0, d0, 0}, off, p_probe, tree_trials,
                                stop, seed);
    return rep;
}

// ---------------------------------------------------------------------------
// Cube-coverage theta probe
// ---------------------------------------------------------------------------

struct ThetaProbeResult {
    std::uint64_t cube_side = 0;       // N
    std::uint64_t steps = 0;           // R(N)
    std::uint64_t trials_accepted = 0; // trials with A_0 >= 2
    std::uint64_t trials_rejected = 0;
    double theta_hat = 0;              // fraction with the full cube infected by R(N)
    double inscribed_radius_hat = 0;   // mean inscribed radius / R(N)
};

/// Frog-regime probe of theta(N): p = 1, initial count A_0 - 1 at the
/// origin, conditioned on A_0 >= 2 by rejection.
inline ThetaProbeResult theta_probe(const OffspringSpec& offspring, std::uint64_t cube_side,
                                    double r_guess, double eps, std::uint64_t trials,
                                    std::uint64_t seed, int dim = 2) {
    if (!offspring.always_positive())
        throw std::invalid_argument("theta probe requires A >= 1 almost surely");
    if (eps <= 0 || eps >= 1) throw std::invalid_argument("eps must be in (0,1)");
    if (r_guess <= 0) throw std::invalid_argument("r_guess must be positive");
    if (r_guess * (1.0 - eps) >= 1.0)
        throw std::invalid_argument("r_guess(1-eps) >= 1: R(N) < N makes the cube unreachable");
    ThetaProbeResult res;
    res.cube_side = cube_side;
    res.steps = static_cast<std::uint64_t>(
        std::ceil(static_cast<double>(cube_side) / (r_guess * (1.0 - eps))));
    const GraphSpec spec{Family::Lattice, dim, 0, 0};
    const auto o = origin(spec);
    std::uint64_t hits = 0;
    double rhat_sum = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        HostField field(seed, t, spec, offspring);
        const std::uint64_t a0 = field.offspring(o);
        if (a0 < 2) {
            ++res.trials_rejected;
            continue;
        }
        ++res.trials_accepted;
        EngineOptions opt;
        opt.initial_count_override = a0 - 1;
        ParasiteWiseEngine eng(field, 1.0, {o}, opt);
        for (std::uint64_t n = 0; n < res.steps && eng.alive_count() > 0; ++n) eng.step();
        // inscribed radius: largest k with the whole cube B_inf(0,k) infected
        std::uint64_t k = 0;
        auto cube_full = [&](std::uint64_t r) {
            std::vector<std::int32_t> coord(dim, -static_cast<std::int32_t>(r));
            while (true) {
                if (!eng.infected().count(lattice_vertex(coord))) return false;
                int i = 0;
                for (; i < dim; ++i) {
                    if (coord[i] < static_cast<std::int32_t>(r)) {
                        ++coord[i];
                        break;
                    }
                    coord[i] = -static_cast<std::int32_t>(r);
                }
                if (i == dim) return true;
            }
        };
        while (k < res.steps && cube_full(k + 1)) ++k;
        rhat_sum += static_cast<double>(k) / static_cast<double>(res.steps);
        if (k >= cube_side) ++hits;
    }
    if (res.trials_accepted > 0) {
        res.theta_hat = static_cast<double>(hits) / static_cast<double>(res.trials_accepted);
        res.inscribed_radius_hat = rhat_sum / static_cast<double>(res.trials_accepted);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Site-percolation crossing baseline
// ---------------------------------------------------------------------------

struct CrossingRow {
    std::uint64_t box = 0;
    double p = 0;
    double crossing_prob = 0;
};

struct PercolationBaseline {
    std::vector<CrossingRow> rows;
    double pc_estimate = 0;  // crossing of the curves for the two largest boxes
};

/// Left-right crossing probabilities of open sites (U_x <= p) in an L x L
/// box, and a threshold estimate from the intersection of the crossing
/// curves of the two largest box sizes.
inline PercolationBaseline site_percolation_baseline(const std::vector<double>& p_grid,
                                                     std::vector<std::uint64_t> sizes,
                                                     std::uint64_t trials, std::uint64_t seed) {
    if (p_grid.empty() || sizes.empty()) throw std::invalid_argument("empty grid");
    std::sort(sizes.begin(), sizes.end());
    const GraphSpec spec{Family::Lattice, 2, 0, 0};
    const OffspringSpec one = OffspringSpec::deterministic(1);
    PercolationBaseline out;
    for (std::uint64_t L : sizes) {
        std::vector<double> crossings(p_grid.size(), 0.0);
        for (std::uint64_t t = 0; t < trials; ++t) {
            HostField field(seed + L, t, spec, one);
            std::vector<double> u(L * L);
            for (std::uint64_t y = 0; y < L; ++y)
                for (std::uint64_t x = 0; x < L; ++x)
                    u[y * L + x] = field.uniform(lattice_vertex({static_cast<std::int32_t>(x),
                                                                 static_cast<std::int32_t>(y)}));
            for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
                const double p = p_grid[pi];
                // BFS from the left edge through open sites
                std::vector<char> open(L * L), seen(L * L, 0);
                for (std::size_t i = 0; i < u.size(); ++i) open[i] = u[i] <= p;
                std::vector<std::uint64_t> stack;
                for (std::uint64_t y = 0; y < L; ++y)
                    if (open[y * L]) {
                        seen[y * L] = 1;
                        stack.push_back(y * L);
                    }
                bool crossed = false;
                while (!stack.empty() && !crossed) {
                    const std::uint64_t idx = stack.back();
                    stack.pop_back();
                    const std::uint64_t x = idx % L, y = idx / L;
                    if (x + 1 == L) {
                        crossed = true;
                        break;
                    }
                    const std::uint64_t nbr[4] = {x + 1 < L ? idx + 1 : idx, x > 0 ? idx - 1 : idx,
                                                  y + 1 < L ? idx + L : idx, y > 0 ? idx - L : idx};
                    for (auto j : nbr)
                        if (j != idx && open[j] && !seen[j]) {
                            seen[j] = 1;
                            stack.push_back(j);
                        }
                }
                if (crossed) crossings[pi] += 1;
            }
        }
        for (std::size_t pi = 0; pi < p_grid.size(); ++pi)
            out.rows.push_back({L, p_grid[pi], crossings[pi] / static_cast<double>(trials)});
    }
    // curve intersection of the two largest sizes
    if (sizes.size() >= 2 && p_grid.size() >= 2) {
        const std::uint64_t big = sizes.back(), small = sizes[sizes.size() - 2];
        auto curve = [&](std::uint64_t L, std::size_t pi) {
            for (const auto& r : out.rows)
                if (r.box == L && r.p == p_grid[pi]) return r.crossing_prob;
            return 0.0;
        };
        double est = 0;
        bool found = false;
        for (std::size_t pi = 0; pi + 1 < p_grid.size(); ++pi) {
            const double d0 = curve(big, pi) - curve(small, pi);
            const double d1 = curve(big, pi + 1) - curve(small, pi + 1);
            if (d0 <= 0 && d1 >= 0 && (d1 - d0) > 0) {
                est = p_grid[pi] + (p_grid[pi + 1] - p_grid[pi]) * (-d0) / (d1 - d0);
                found = true;
                break;
            }
        }
        if (!found) {
            // fall back to where the largest-box curve crosses 1/2
            for (std::size_t pi = 0; pi + 1 < p_grid.size(); ++pi) {
                const double c0 = curve(big, pi), c1 = curve(big, pi + 1);
                if (c0 <= 0.5 && c1 >= 0.5 && c1 > c0) {
                    est = p_grid[pi] + (p_grid[pi + 1] - p_grid[pi]) * (0.5 - c0) / (c1 - c0);
                    found = true;
                    break;
                }
            }
        }
        out.pc_estimate = est;
    }
    return out;
}

}  // namespace simi

#endif  // SIMI_EXPERIMENTS_HPP
