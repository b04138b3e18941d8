// Acceptance suite: one line per criterion, PASS/FAIL, nonzero exit when any
// criterion fails.  Every tuned threshold is pinned here and recorded in
// acceptance_manifest.json next to the binary's working directory before the
// checks run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "simi/analytics.hpp"
#include "simi/experiments.hpp"
#include "simi/io.hpp"
#include "oracles.hpp"

using namespace simi;

namespace {

int failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail) {
    std::printf("criterion %2d %-34s %s  (%s)\n", idx, what, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Pilot-calibrated constants.  Values were fixed from calibration runs on
// master seeds 1-5 before being enforced and are recorded in the manifest.
struct Pins {
    // 3: geometric lifetime census
    std::uint64_t census_trials = 20000;
    double census_ks_max = 0.015;
    // 4: vertex-wise coupling audit
    std::uint64_t audit_pairs = 1000;
    std::uint64_t audit_horizon = 200;
    std::uint64_t audit_cap = 2000;
    // 5: parasite-wise witness search
    std::uint64_t witness_seeds = 100000;
    std::uint64_t witness_horizon = 40;
    std::uint64_t witness_ball = 20;
    std::uint64_t witness_cap = 20000;
    // 8: lattice phase transition
    double freq_floor_high_p = 0.8;
    std::uint64_t low_p_trials = 2000;
    std::uint64_t high_p_trials = 200;
    // 9: tree asymptotics
    std::uint64_t tree_trials = 300;
    double tree_lo = 0.4, tree_hi = 0.95, tree_res = 0.02;
    StopRule tree_stop{1000, 2000, kNoLimit};
    // 10: decorated tree
    std::uint64_t decorated_trials = 2000;
    StopRule decorated_stop{20000, 50000, kNoLimit};
    std::uint64_t wide_tree_trials = 200;
    StopRule wide_tree_stop{500, 2000, kNoLimit};
    // 11: engine equivalence
    std::uint64_t equiv_trials = 20000;
    double equiv_pvalue_min = 0.01;
    // 12: recurrence proxy
    std::uint64_t recur_trials = 2000;
    std::uint64_t recur_cap = 2000;
    double recur_rel_max = 0.05;
    // master seed for every run below
    std::uint64_t seed = 1;
};

void write_pins_manifest(const Pins& k) {
    nlohmann::json j{
        {"version", kArtifactVersion},
        {"written", utc_now()},
        {"master_seed", k.seed},
        {"census", {{"trials", k.census_trials}, {"ks_max", k.census_ks_max}}},
        {"audit", {{"pairs", k.audit_pairs}, {"horizon", k.audit_horizon}, {"cap", k.audit_cap}}},
        {"witness",
         {{"seeds", k.witness_seeds},
          {"horizon", k.witness_horizon},
          {"ball", k.witness_ball},
          {"cap", k.witness_cap}}},
        {"lattice_transition",
         {{"freq_floor", k.freq_floor_high_p},
          {"low_p_trials", k.low_p_trials},
          {"high_p_trials", k.high_p_trials}}},
        {"tree_asymptotics",
         {{"trials", k.tree_trials},
          {"bracket", {k.tree_lo, k.tree_hi}},
          {"resolution", k.tree_res},
          {"max_steps", k.tree_stop.max_steps},
          {"max_parasites", k.tree_stop.max_parasites}}},
        {"decorated",
         {{"trials", k.decorated_trials},
          {"max_steps", k.decorated_stop.max_steps},
          {"max_parasites", k.decorated_stop.max_parasites},
          {"wide_tree_trials", k.wide_tree_trials}}},
        {"equivalence", {{"trials", k.equiv_trials}, {"pvalue_min", k.equiv_pvalue_min}}},
        {"recurrence",
         {{"trials", k.recur_trials}, {"cap", k.recur_cap}, {"rel_diff_max", k.recur_rel_max}}},
    };
    std::ofstream out("acceptance_manifest.json");
    out << j.dump(2) << '\n';
}

const GraphSpec kLat{Family::Lattice, 2, 0, 0};

}  // namespace

int main() {
    const Pins k;
    write_pins_manifest(k);
    char buf[256];

    {  // 1: branching survival exactness
        const auto t0 = std::chrono::steady_clock::now();
        const auto det2 = OffspringSpec::deterministic(2);
        const double s34 = bgw_extinction(det2, 0.75).survival_prob;
        bool ok = std::abs(s34 - 2.0 / 3.0) < 1e-10;
        double worst = 0;
        for (double p = 0.05; p <= 0.5 + 1e-12; p += 0.05)
            worst = std::max(worst, bgw_extinction(det2, p).survival_prob);
        ok = ok && worst < 1e-9;
        std::snprintf(buf, sizeof buf, "survival(3/4)=%.12f subcritical max=%.2e %.1fs", s34,
                      worst, seconds_since(t0));
        report(1, "branching survival exactness", ok, buf);
    }

    {  // 2: clique escape formulas and the decorated mean
        const auto t0 = std::chrono::steady_clock::now();
        double worst = 0;
        for (int n = 1; n <= 30; ++n)
            for (int l = 0; l <= n; ++l) {
                const auto ref = oracles::clique_escape_solve(n, l);
                worst = std::max(worst, std::abs(escape_prob_interior(n, l) - ref.interior));
                worst = std::max(worst, std::abs(escape_prob_exit(n, l) - ref.exit));
            }
        const auto [mc, se] = oracles::mc_decorated_mean(20, 0.8, 100000, k.seed);
        const double exact = decorated_offspring_mean(20, 0.8);
        const bool ok = worst < 1e-10 && std::abs(mc - exact) < 3.0 * se;
        std::snprintf(buf, sizeof buf, "formula err=%.1e mean=%.4f mc=%.4f (se %.4f) %.1fs",
                      worst, exact, mc, se, seconds_since(t0));
        report(2, "clique escape probabilities", ok, buf);
    }

    {  // 3: geometric lifetime law
        const auto t0 = std::chrono::steady_clock::now();
        const auto census = geometric_lifetime_census(kLat, 0.6, k.census_trials, 1000000, k.seed);
        const double se = census.stats.stderr_mean();
        const bool ok = census.excluded == 0 && census.ks_distance < k.census_ks_max &&
                        std::abs(census.stats.mean - 2.5) < 3.0 * se;
        std::snprintf(buf, sizeof buf, "ks=%.4f mean=%.3f (se %.4f) %.1fs", census.ks_distance,
                      census.stats.mean, se, seconds_since(t0));
        report(3, "geometric lifetime law", ok, buf);
    }

    {  // 4: vertex-wise coupling audit, including an offspring law with P(A=0)>0
        const auto t0 = std::chrono::steady_clock::now();
        std::uint64_t bad = 0, steps = 0;
        for (const auto& spec : {kLat, GraphSpec{Family::RegularTree, 0, 3, 0}}) {
            for (const auto& off : {OffspringSpec::deterministic(2),
                                    OffspringSpec::finite_pmf({{0, 0.3}, {2, 0.7}})}) {
                const auto rep = coupling_audit(spec, off, 0.3, 0.7, k.audit_pairs,
                                                k.audit_horizon, k.seed, k.audit_cap);
                bad += rep.violations.size();
                steps += rep.steps_checked;
            }
        }
        std::snprintf(buf, sizeof buf, "violations=%llu over %llu steps %.1fs",
                      static_cast<unsigned long long>(bad),
                      static_cast<unsigned long long>(steps), seconds_since(t0));
        report(4, "vertex-wise coupling", bad == 0, buf);
    }

    {  // 5: stepwise inclusion fails for the zero-capable law, holds for Det(2)
        const auto t0 = std::chrono::steady_clock::now();
        const auto zero = parasitewise_nonmonotone_search(
            kLat, OffspringSpec::finite_pmf({{0, 0.3}, {3, 0.7}}), 0.25, 0.75, k.witness_seeds,
            k.witness_horizon, k.witness_ball, k.seed, k.witness_cap);
        const auto det = parasitewise_nonmonotone_search(
            kLat, OffspringSpec::deterministic(2), 0.25, 0.75, k.witness_seeds, k.witness_horizon,
            k.witness_ball, k.seed, k.witness_cap);
        const bool ok = !zero.witnesses.empty() && det.witnesses.empty();
        std::snprintf(buf, sizeof buf, "witnesses: pmf=%zu det2=%zu %.1fs", zero.witnesses.size(),
                      det.witnesses.size(), seconds_since(t0));
        report(5, "parasite-wise witness search", ok, buf);
    }

    {  // 6: subcritical extinction on a wide tree
        const auto t0 = std::chrono::steady_clock::now();
        const GraphSpec tree{Family::RegularTree, 0, 10, 0};
        const auto row = survival_at(tree, OffspringSpec::deterministic(2), 0.4, 10000,
                                     StopRule{500, 1000000, kNoLimit}, k.seed);
        std::snprintf(buf, sizeof buf, "survivors=%llu/10000 %.1fs",
                      static_cast<unsigned long long>(row.survivors), seconds_since(t0));
        report(6, "subcritical extinction", row.survivors == 0, buf);
    }

    {  // 7: the line dies even at p just below 1
        const auto t0 = std::chrono::steady_clock::now();
        const GraphSpec line{Family::Line, 0, 0, 0};
        const auto row = survival_at(line, OffspringSpec::deterministic(5), 0.99, 1000,
                                     StopRule{}, k.seed);
        std::snprintf(buf, sizeof buf, "survivors=%llu/1000 %.1fs",
                      static_cast<unsigned long long>(row.survivors), seconds_since(t0));
        report(7, "line has no phase transition", row.survivors == 0, buf);
    }

    {  // 8: planar lattice phase transition
        const auto t0 = std::chrono::steady_clock::now();
        const auto off = OffspringSpec::deterministic(3);
        const auto low = survival_at(kLat, off, 0.2, k.low_p_trials,
                                     StopRule{2000, 2000, kNoLimit}, k.seed);
        const auto high = survival_at(kLat, off, 0.98, k.high_p_trials,
                                      StopRule{2000, 2000, kNoLimit}, k.seed);
        const bool ok = low.survivors == 0 && high.ci.lo > 0.0 &&
                        high.frequency >= k.freq_floor_high_p;
        std::snprintf(buf, sizeof buf, "low=%llu/%llu high_freq=%.3f ci_lo=%.3f %.1fs",
                      static_cast<unsigned long long>(low.survivors),
                      static_cast<unsigned long long>(k.low_p_trials), high.frequency, high.ci.lo,
                      seconds_since(t0));
        report(8, "lattice phase transition", ok, buf);
    }

    {  // 9: high-degree trees approach the branching bound
        const auto t0 = std::chrono::steady_clock::now();
        const auto rows = tree_asymptotics(OffspringSpec::deterministic(2), {4, 8, 16, 32},
                                           k.tree_trials, k.tree_stop, k.tree_lo, k.tree_hi,
                                           k.tree_res, k.seed);
        bool ok = rows.size() == 4;
        double prev_mid = 2.0;
        std::string mids;
        for (const auto& r : rows) {
            const double mid = 0.5 * (r.band.p_minus + r.band.p_plus);
            const double width = r.band.p_plus - r.band.p_minus;
            ok = ok && mid <= prev_mid + 1e-12;
            ok = ok && r.band.p_minus >= 0.5 - width;
            prev_mid = mid;
            mids += (mids.empty() ? "" : ",") + std::to_string(mid).substr(0, 5);
        }
        const auto& last = rows.back().band;
        ok = ok && last.p_minus >= 0.5 && last.p_plus <= 0.7;
        std::snprintf(buf, sizeof buf, "mids=%s d32=[%.3f,%.3f] %.0fs", mids.c_str(),
                      last.p_minus, last.p_plus, seconds_since(t0));
        report(9, "tree asymptotics", ok, buf);
    }

    {  // 10: clique decoration pushes the critical point above a wide tree's
        const auto t0 = std::chrono::steady_clock::now();
        const double mean200 = decorated_offspring_mean(200, 0.9);
        const auto rep = nonmonotonicity_campaign({200}, 0.9, k.decorated_trials,
                                                  k.wide_tree_trials, 16, k.decorated_stop, k.seed);
        const auto wide = survival_at(GraphSpec{Family::RegularTree, 0, 16, 0},
                                      OffspringSpec::deterministic(3), 0.9, k.wide_tree_trials,
                                      k.wide_tree_stop, k.seed);
        const bool ok = mean200 < 1.0 && rep.decorated.survivors == 0 && wide.ci.lo > 0.0;
        std::snprintf(buf, sizeof buf, "mean=%.4f decorated=%llu/%llu wide_ci_lo=%.3f %.0fs",
                      mean200, static_cast<unsigned long long>(rep.decorated.survivors),
                      static_cast<unsigned long long>(k.decorated_trials), wide.ci.lo,
                      seconds_since(t0));
        report(10, "decoration raises the threshold", ok, buf);
    }

    {  // 11: both constructions give the same law
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = construction_equivalence(kLat, OffspringSpec::deterministic(2), 0.5, 30,
                                                  k.equiv_trials, k.seed);
        const bool ok = rep.chi.pvalue > k.equiv_pvalue_min;
        std::snprintf(buf, sizeof buf, "chi2=%.2f dof=%d p=%.3f %.1fs", rep.chi.statistic,
                      rep.chi.dof, rep.chi.pvalue, seconds_since(t0));
        report(11, "construction equivalence", ok, buf);
    }

    {  // 12: origin visits saturate between horizons (transience proxy)
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = recurrence_census(kLat, OffspringSpec::deterministic(2), 0.9,
                                           k.recur_trials, {1000, 10000}, k.seed, k.recur_cap);
        const double a = rep.rows[0].mean_visits, b = rep.rows[1].mean_visits;
        const double rel = std::abs(b - a) / std::max(a, 1e-12);
        const bool ok = rel < k.recur_rel_max;
        std::snprintf(buf, sizeof buf, "visits %0.2f -> %0.2f rel=%.4f %.0fs", a, b, rel,
                      seconds_since(t0));
        report(12, "transience proxy", ok, buf);
    }

    {  // 13: identical config and seed give byte-identical trial records
        const auto t0 = std::chrono::steady_clock::now();
        auto render = [&] {
            std::string lines;
            for (std::uint64_t t = 0; t < 500; ++t) {
                HostField field(k.seed, t, kLat, OffspringSpec::deterministic(2));
                const auto out = run_trial(field, 0.6, {origin(kLat)},
                                           StopRule{200, 5000, kNoLimit}, EngineKind::VertexWise);
                lines += trial_record(out, 0.6).dump();
                lines += '\n';
            }
            return lines;
        };
        const std::string first = render(), second = render();
        RunConfig cfg;
        cfg.experiment = "simulate";
        cfg.p_grid = {0.6};
        const bool ok = first == second && config_hash(cfg) == config_hash(cfg);
        std::snprintf(buf, sizeof buf, "%zu bytes, rerun identical=%s %.1fs", first.size(),
                      first == second ? "yes" : "no", seconds_since(t0));
        report(13, "byte-identical reruns", ok, buf);
    }

    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
