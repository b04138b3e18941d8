// Command-line front end: simulation campaigns, critical-parameter
// estimation, and the exact-analytics calculators.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "simi/analytics.hpp"
#include "simi/dynamics.hpp"
#include "simi/experiments.hpp"
#include "simi/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// "lattice:2", "tree:3", "line", "decorated:200"
simi::GraphSpec parse_graph_arg(const std::string& s) {
    const auto colon = s.find(':');
    const std::string name = s.substr(0, colon);
    const int arg = colon == std::string::npos ? 0 : std::stoi(s.substr(colon + 1));
    simi::GraphSpec g;
    if (name == "line") {
        g = {simi::Family::Line, 0, 0, 0};
    } else if (name == "lattice") {
        g = {simi::Family::Lattice, colon == std::string::npos ? 2 : arg, 0, 0};
    } else if (name == "tree") {
        g = {simi::Family::RegularTree, 0, arg, 0};
    } else if (name == "decorated") {
        g = {simi::Family::DecoratedTree, 0, 0, arg};
    } else {
        throw simi::ConfigError("unknown graph '" + s + "' (want line, lattice:d, tree:d, decorated:n)");
    }
    g.validate();
    return g;
}

// "det:3", "poisson:1.5", "geom:0.4", "pmf:0=0.3,3=0.7"
simi::OffspringSpec parse_offspring_arg(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw simi::ConfigError("offspring needs kind:args, got '" + s + "'");
    const std::string kind = s.substr(0, colon), rest = s.substr(colon + 1);
    if (kind == "det") return simi::OffspringSpec::deterministic(std::stoul(rest));
    if (kind == "poisson") return simi::OffspringSpec::poisson(std::stod(rest));
    if (kind == "geom") return simi::OffspringSpec::geometric(std::stod(rest));
    if (kind == "pmf") {
        std::vector<std::pair<std::uint32_t, double>> pmf;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw simi::ConfigError("pmf entry '" + item + "' needs k=w");
            pmf.emplace_back(std::stoul(item.substr(0, eq)), std::stod(item.substr(eq + 1)));
        }
        return simi::OffspringSpec::finite_pmf(pmf);
    }
    throw simi::ConfigError("unknown offspring kind '" + kind + "'");
}

template <typename T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(conv(item));
    return out;
}

double to_double(const std::string& s) { return std::stod(s); }
std::uint64_t to_u64(const std::string& s) { return std::stoull(s); }
int to_int(const std::string& s) { return std::stoi(s); }

struct CommonOpts {
    std::string graph = "lattice:2";
    std::string offspring = "det:2";
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    std::uint64_t max_steps = 20000;
    std::uint64_t max_parasites = 100000;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o, const std::string& default_out) {
    o.out_dir = default_out;
    cmd->add_option("--graph", o.graph, "line | lattice:d | tree:d | decorated:n");
    cmd->add_option("--offspring", o.offspring, "det:k | poisson:m | geom:q | pmf:k=w,...");
    cmd->add_option("--trials", o.trials);
    cmd->add_option("--seed", o.seed);
    cmd->add_option("--max-steps", o.max_steps);
    cmd->add_option("--max-parasites", o.max_parasites);
    cmd->add_option("--out", o.out_dir, "output directory");
}

simi::RunConfig to_config(const CommonOpts& o, const std::string& experiment,
                          std::vector<double> p_grid) {
    simi::RunConfig cfg;
    cfg.experiment = experiment;
    cfg.graph = parse_graph_arg(o.graph);
    cfg.offspring = parse_offspring_arg(o.offspring);
    cfg.p_grid = std::move(p_grid);
    cfg.trials = o.trials;
    cfg.stop = simi::StopRule{o.max_steps, o.max_parasites, simi::kNoLimit};
    cfg.seed = o.seed;
    cfg.output_dir = o.out_dir;
    return cfg;
}

struct RunWriter {
    explicit RunWriter(const simi::RunConfig& cfg) : manifest_{cfg, {}, simi::utc_now(), ""} {
        fs::create_directories(cfg.output_dir);
    }
    fs::path path(const std::string& name) {
        manifest_.outputs.push_back(name);
        return fs::path(manifest_.config.output_dir) / name;
    }
    void finish() {
        manifest_.finished_utc = simi::utc_now();
        simi::write_manifest(manifest_,
                             fs::path(manifest_.config.output_dir) / "manifest.json");
    }
    simi::Manifest manifest_;
};

void write_sweep_csv(simi::CsvWriter& csv, const std::vector<simi::SweepRow>& rows) {
    for (const auto& r : rows)
        csv.row({simi::fmt_double(r.p), std::to_string(r.trials), std::to_string(r.survivors),
                 simi::fmt_double(r.frequency), simi::fmt_double(r.ci.lo),
                 simi::fmt_double(r.ci.hi), std::to_string(r.censored_time),
                 std::to_string(r.censored_population)});
}

const std::vector<std::string> kSweepHeader = {"p",         "trials", "survivors",
                                               "frequency", "ci_lo",  "ci_hi",
                                               "censored_time", "censored_population"};

int cmd_simulate(const CommonOpts& o, const std::string& config_path, double p,
                 const std::string& engine_name) {
    simi::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw simi::ConfigError("cannot read config file " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = simi::parse_config(ss.str());
    } else {
        cfg = to_config(o, "simulate", {p});
    }
    if (cfg.p_grid.size() != 1) throw simi::ConfigError("simulate wants a single p");
    const simi::EngineKind kind = engine_name == "parasite" ? simi::EngineKind::ParasiteWise
                                                            : simi::EngineKind::VertexWise;
    RunWriter w(cfg);
    std::ofstream jsonl(w.path("trials.jsonl"));
    std::uint64_t survivors = 0;
    const auto org = simi::origin(cfg.graph);
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
        simi::HostField field(cfg.seed, t, cfg.graph, cfg.offspring);
        const auto out = simi::run_trial(field, cfg.p_grid[0], {org}, cfg.stop, kind);
        if (out.survived()) ++survivors;
        jsonl << simi::trial_record(out, cfg.p_grid[0]).dump() << '\n';
    }
    jsonl.close();
    {
        simi::CsvWriter csv(w.path("summary.csv"), kSweepHeader);
        const auto row = simi::survival_at(cfg.graph, cfg.offspring, cfg.p_grid[0], cfg.trials,
                                           cfg.stop, cfg.seed, 0.95, kind);
        write_sweep_csv(csv, {row});
    }
    w.finish();
    std::printf("simulate: p=%g trials=%llu survivors=%llu freq=%g\n", cfg.p_grid[0],
                (unsigned long long)cfg.trials, (unsigned long long)survivors,
                double(survivors) / double(cfg.trials));
    return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& config_path, const std::string& grid_arg) {
    simi::RunConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw simi::ConfigError("cannot read config file " + config_path);
        std::stringstream ss;
        ss << in.rdbuf();
        cfg = simi::parse_config(ss.str());
    } else {
        cfg = to_config(o, "sweep", parse_list<double>(grid_arg, to_double));
    }
    simi::SweepPlan plan{cfg.graph, cfg.offspring, cfg.p_grid, cfg.trials, cfg.stop, cfg.seed};
    const auto rows = simi::survival_sweep(plan);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("sweep.csv"), kSweepHeader);
        write_sweep_csv(csv, rows);
    }
    w.finish();
    std::printf("sweep: %zu p-values, trials=%llu, freq range [%g, %g]\n", rows.size(),
                (unsigned long long)cfg.trials, rows.front().frequency, rows.back().frequency);
    return 0;
}

int cmd_estimate_pc(const CommonOpts& o, double lo, double hi, double resolution) {
    const simi::RunConfig cfg = to_config(o, "estimate-pc", {lo, hi});
    const auto band = simi::estimate_pc(cfg.graph, cfg.offspring, cfg.trials, cfg.stop, lo, hi,
                                        resolution, cfg.seed);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("probes.csv"), kSweepHeader);
        write_sweep_csv(csv, band.rows);
    }
    {
        std::ofstream out(w.path("pc.json"));
        out << json{{"p_minus", band.p_minus},
                    {"p_plus", band.p_plus},
                    {"all_zero", band.all_zero},
                    {"all_positive", band.all_positive}}
                   .dump(2)
            << '\n';
    }
    w.finish();
    std::printf("estimate-pc: band [%g, %g]%s\n", band.p_minus, band.p_plus,
                band.all_zero ? " (no survival found)" : band.all_positive ? " (always survived)" : "");
    return 0;
}

int cmd_couple_audit(const CommonOpts& o, double p, double pp, std::uint64_t horizon) {
    const simi::RunConfig cfg = to_config(o, "couple-audit", {p, pp});
    const auto rep = simi::coupling_audit(cfg.graph, cfg.offspring, p, pp, cfg.trials, horizon,
                                          cfg.seed, cfg.stop.max_parasites);
    RunWriter w(cfg);
    {
        std::ofstream out(w.path("audit.json"));
        json viols = json::array();
        for (const auto& v : rep.violations)
            viols.push_back({{"trial", v.trial}, {"step", v.step}, {"vertex", key_to_string(v.vertex)}});
        out << json{{"trials", rep.trials}, {"steps_checked", rep.steps_checked},
                    {"violations", viols}}
                   .dump(2)
            << '\n';
    }
    w.finish();
    std::printf("couple-audit: %llu trials, %llu steps checked, %zu violations\n",
                (unsigned long long)rep.trials, (unsigned long long)rep.steps_checked,
                rep.violations.size());
    return rep.violations.empty() ? 0 : 1;
}

int cmd_nonmono_search(const CommonOpts& o, double p, double pp, std::uint64_t horizon,
                       std::uint64_t ball) {
    const simi::RunConfig cfg = to_config(o, "nonmono-search", {p, pp});
    const auto rep = simi::parasitewise_nonmonotone_search(cfg.graph, cfg.offspring, p, pp,
                                                           cfg.trials, horizon, ball, cfg.seed,
                                                           cfg.stop.max_parasites);
    RunWriter w(cfg);
    {
        std::ofstream out(w.path("witnesses.jsonl"));
        for (const auto& wit : rep.witnesses)
            out << json{{"trial", wit.trial},
                        {"set_violation", wit.set_violation},
                        {"outlive_violation", wit.outlive_violation}}
                       .dump()
                << '\n';
    }
    w.finish();
    std::printf("nonmono-search: %zu witnesses in %llu seeds\n", rep.witnesses.size(),
                (unsigned long long)rep.trials);
    return 0;
}

int cmd_equiv_test(const CommonOpts& o, double p, std::uint64_t horizon) {
    const simi::RunConfig cfg = to_config(o, "equiv-test", {p});
    const auto rep = simi::construction_equivalence(cfg.graph, cfg.offspring, p, horizon, cfg.trials,
                                                    cfg.seed, cfg.stop.max_parasites);
    RunWriter w(cfg);
    {
        std::ofstream out(w.path("equiv.json"));
        out << json{{"chi2", rep.chi.statistic},
                    {"dof", rep.chi.dof},
                    {"p_value", rep.chi.pvalue},
                    {"counts_vertexwise", rep.counts_vertexwise},
                    {"counts_parasitewise", rep.counts_parasitewise}}
                   .dump(2)
            << '\n';
    }
    w.finish();
    std::printf("equiv-test: chi2=%.3f dof=%llu p-value=%.4f\n", rep.chi.statistic,
                (unsigned long long)rep.chi.dof, rep.chi.pvalue);
    return 0;
}

int cmd_lifetime_census(const CommonOpts& o, double p, std::uint64_t cap) {
    const simi::RunConfig cfg = to_config(o, "lifetime-census", {p});
    const auto census = simi::geometric_lifetime_census(cfg.graph, p, cfg.trials, cap, cfg.seed);
    RunWriter w(cfg);
    {
        std::map<std::uint64_t, std::uint64_t> hist;
        for (auto v : census.fresh_counts) ++hist[v];
        simi::CsvWriter csv(w.path("census.csv"), {"fresh_vertices", "count"});
        for (const auto& [k, c] : hist) csv.row({std::to_string(k), std::to_string(c)});
    }
    w.finish();
    std::printf("lifetime-census: mean=%.4f (geometric mean %.4f), ks=%.5f, excluded=%llu\n",
                census.stats.mean, 1.0 / (1.0 - p), census.ks_distance,
                (unsigned long long)census.excluded);
    return 0;
}

int cmd_recurrence(const CommonOpts& o, double p, const std::string& horizons_arg) {
    const simi::RunConfig cfg = to_config(o, "recurrence", {p});
    const auto horizons = parse_list<std::uint64_t>(horizons_arg, to_u64);
    const auto rep = simi::recurrence_census(cfg.graph, cfg.offspring, p, cfg.trials, horizons,
                                             cfg.seed, cfg.stop.max_parasites);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("recurrence.csv"), {"horizon", "mean_visits", "tail_over_50"});
        for (const auto& r : rep.rows)
            csv.row({std::to_string(r.horizon), simi::fmt_double(r.mean_visits),
                     simi::fmt_double(r.tail_over_50)});
    }
    w.finish();
    std::printf("recurrence: mean origin visits");
    for (const auto& r : rep.rows)
        std::printf(" @%llu=%.3f", (unsigned long long)r.horizon, r.mean_visits);
    std::printf(" (truncated %llu)\n", (unsigned long long)rep.truncated);
    return 0;
}

int cmd_tree_asymptotics(const CommonOpts& o, const std::string& degrees_arg, double lo, double hi,
                         double resolution) {
    const simi::RunConfig cfg = to_config(o, "tree-asymptotics", {lo, hi});
    const auto degrees = parse_list<int>(degrees_arg, to_int);
    const auto rows = simi::tree_asymptotics(cfg.offspring, degrees, cfg.trials, cfg.stop, lo, hi,
                                             resolution, cfg.seed);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("trees.csv"),
                            {"degree", "p_minus", "p_plus", "mean_bound", "degree_bound"});
        for (const auto& r : rows)
            csv.row({std::to_string(r.degree), simi::fmt_double(r.band.p_minus),
                     simi::fmt_double(r.band.p_plus), simi::fmt_double(r.mean_bound),
                     simi::fmt_double(r.degree_bound_value)});
    }
    w.finish();
    std::printf("tree-asymptotics:");
    for (const auto& r : rows)
        std::printf(" d=%d:[%.3f,%.3f]", r.degree, r.band.p_minus, r.band.p_plus);
    std::printf("\n");
    return 0;
}

int cmd_decorated(const CommonOpts& o, const std::string& n_list_arg, double p, int d0,
                  std::uint64_t tree_trials) {
    const simi::RunConfig cfg = to_config(o, "decorated", {p});
    const auto ns = parse_list<int>(n_list_arg, to_int);
    const auto rep = simi::nonmonotonicity_campaign(ns, p, cfg.trials, tree_trials, d0, cfg.stop,
                                                    cfg.seed);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("decorated.csv"), {"n", "offspring_mean"});
        for (const auto& [n, m] : rep.analytic_means)
            csv.row({std::to_string(n), simi::fmt_double(m)});
    }
    {
        std::ofstream out(w.path("campaign.json"));
        out << json{{"p", rep.p_probe},
                    {"decorated_freq", rep.decorated.frequency},
                    {"base_tree_freq", rep.base_tree.frequency},
                    {"wide_tree_freq", rep.wide_tree.frequency},
                    {"wide_tree_ci_lo", rep.wide_tree.ci.lo},
                    {"d0", rep.d0}}
                   .dump(2)
            << '\n';
    }
    w.finish();
    std::printf("decorated: mean(n=%d)=%.4f, decorated freq=%.4f, T3 freq=%.4f, T%d freq=%.4f\n",
                rep.analytic_means.back().first, rep.analytic_means.back().second,
                rep.decorated.frequency, rep.base_tree.frequency, rep.d0,
                rep.wide_tree.frequency);
    return 0;
}

int cmd_theta_probe(const CommonOpts& o, std::uint64_t n, double r, double eps, int dim) {
    const simi::RunConfig cfg = to_config(o, "theta-probe", {1.0});
    const auto res = simi::theta_probe(cfg.offspring, n, r, eps, cfg.trials, cfg.seed, dim);
    RunWriter w(cfg);
    {
        std::ofstream out(w.path("theta.json"));
        out << json{{"cube_side", res.cube_side},
                    {"steps", res.steps},
                    {"accepted", res.trials_accepted},
                    {"rejected", res.trials_rejected},
                    {"theta_hat", res.theta_hat},
                    {"inscribed_radius_hat", res.inscribed_radius_hat}}
                   .dump(2)
            << '\n';
    }
    w.finish();
    std::printf("theta-probe: N=%llu R=%llu theta=%.4f r_hat=%.4f (accepted %llu)\n",
                (unsigned long long)res.cube_side, (unsigned long long)res.steps, res.theta_hat,
                res.inscribed_radius_hat, (unsigned long long)res.trials_accepted);
    return 0;
}

int cmd_percolation(const CommonOpts& o, const std::string& grid_arg, const std::string& sizes_arg) {
    const auto grid = parse_list<double>(grid_arg, to_double);
    const simi::RunConfig cfg = to_config(o, "percolation", grid);
    const auto sizes = parse_list<std::uint64_t>(sizes_arg, to_u64);
    const auto rep = simi::site_percolation_baseline(grid, sizes, cfg.trials, cfg.seed);
    RunWriter w(cfg);
    {
        simi::CsvWriter csv(w.path("crossing.csv"), {"box", "p", "crossing_prob"});
        for (const auto& r : rep.rows)
            csv.row({std::to_string(r.box), simi::fmt_double(r.p),
                     simi::fmt_double(r.crossing_prob)});
    }
    w.finish();
    std::printf("percolation: threshold estimate %.4f from %zu boxes\n", rep.pc_estimate,
                sizes.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo and exact analytics for spatial infection with host immunity"};
    app.require_subcommand(1);

    CommonOpts sim_o, sweep_o, pc_o, couple_o, nonmono_o, equiv_o, census_o, rec_o, tree_o, dec_o,
        theta_o, perc_o;
    std::string sim_config, sweep_config, sim_engine = "vertex";
    double sim_p = 0.5;
    auto* sim = app.add_subcommand("simulate", "run one batch of trials at a single p");
    add_common(sim, sim_o, "out/simulate");
    sim->add_option("--config", sim_config, "JSON run config (overrides flags)");
    sim->add_option("--p", sim_p);
    sim->add_option("--engine", sim_engine)->check(CLI::IsMember({"vertex", "parasite"}));

    std::string sweep_grid = "0.1,0.3,0.5,0.7,0.9", sweep_cfg;
    auto* sw = app.add_subcommand("sweep", "seed-matched survival sweep over a p grid");
    add_common(sw, sweep_o, "out/sweep");
    sw->add_option("--config", sweep_cfg, "JSON run config (overrides flags)");
    sw->add_option("--p-grid", sweep_grid);

    double pc_lo = 0.05, pc_hi = 0.95, pc_res = 0.02;
    auto* pc = app.add_subcommand("estimate-pc", "bisection band for the critical parameter");
    add_common(pc, pc_o, "out/estimate-pc");
    pc->add_option("--lo", pc_lo);
    pc->add_option("--hi", pc_hi);
    pc->add_option("--resolution", pc_res);

    double cp = 0.3, cpp = 0.7;
    std::uint64_t c_horizon = 200;
    auto* ca = app.add_subcommand("couple-audit", "vertex-wise inclusion audit at p <= p'");
    add_common(ca, couple_o, "out/couple-audit");
    ca->add_option("--p", cp);
    ca->add_option("--p-prime", cpp);
    ca->add_option("--horizon", c_horizon);

    double np = 0.25, npp = 0.75;
    std::uint64_t n_horizon = 40, n_ball = 20;
    auto* nm = app.add_subcommand("nonmono-search", "parasite-wise witness search at p <= p'");
    add_common(nm, nonmono_o, "out/nonmono-search");
    nm->add_option("--p", np);
    nm->add_option("--p-prime", npp);
    nm->add_option("--horizon", n_horizon);
    nm->add_option("--ball", n_ball);

    double ep = 0.5;
    std::uint64_t e_horizon = 30;
    auto* eq = app.add_subcommand("equiv-test", "distributional comparison of the two engines");
    add_common(eq, equiv_o, "out/equiv-test");
    eq->add_option("--p", ep);
    eq->add_option("--horizon", e_horizon);

    double lp = 0.6;
    std::uint64_t l_cap = 100000;
    auto* lc = app.add_subcommand("lifetime-census", "single-parasite fresh-vertex census");
    add_common(lc, census_o, "out/lifetime-census");
    lc->add_option("--p", lp);
    lc->add_option("--cap", l_cap);

    double rp = 0.9;
    std::string r_horizons = "1000,10000";
    auto* rc = app.add_subcommand("recurrence", "origin-visit counts at increasing horizons");
    add_common(rc, rec_o, "out/recurrence");
    rc->add_option("--p", rp);
    rc->add_option("--horizons", r_horizons);

    std::string t_degrees = "4,8,16,32";
    double t_lo = 0.3, t_hi = 0.95, t_res = 0.02;
    auto* ta = app.add_subcommand("tree-asymptotics", "critical bands across tree degrees");
    add_common(ta, tree_o, "out/tree-asymptotics");
    ta->add_option("--degrees", t_degrees);
    ta->add_option("--lo", t_lo);
    ta->add_option("--hi", t_hi);
    ta->add_option("--resolution", t_res);

    std::string d_ns = "10,50,200";
    double dp = 0.9;
    int d_d0 = 16;
    std::uint64_t d_tree_trials = 2000;
    auto* dc = app.add_subcommand("decorated", "decorated-tree non-monotonicity campaign");
    add_common(dc, dec_o, "out/decorated");
    dc->add_option("--n-list", d_ns);
    dc->add_option("--p", dp);
    dc->add_option("--d0", d_d0);
    dc->add_option("--tree-trials", d_tree_trials);

    std::uint64_t th_n = 10;
    double th_r = 0.3, th_eps = 0.2;
    int th_dim = 2;
    auto* th = app.add_subcommand("theta-probe", "frog-regime cube coverage probe at p=1");
    add_common(th, theta_o, "out/theta-probe");
    th->add_option("--n", th_n);
    th->add_option("--r", th_r);
    th->add_option("--eps", th_eps);
    th->add_option("--dim", th_dim);

    std::string p_grid = "0.50,0.54,0.56,0.58,0.59,0.60,0.62,0.66,0.70", p_sizes = "32,64,128";
    auto* pe = app.add_subcommand("percolation", "site-percolation crossing baseline");
    add_common(pe, perc_o, "out/percolation");
    pe->add_option("--p-grid", p_grid);
    pe->add_option("--sizes", p_sizes);

    auto* an = app.add_subcommand("analytics", "closed-form calculators");
    an->require_subcommand(1);
    int a_n = 10, a_l = 5, a_deg = 3;
    double a_p = 0.5;
    std::string a_off = "det:2";
    auto* esc = an->add_subcommand("escape", "clique escape probabilities");
    esc->add_option("--n", a_n)->required();
    esc->add_option("--l", a_l)->required();
    auto* bgw = an->add_subcommand("bgw", "branching-process extinction probability");
    bgw->add_option("--offspring", a_off);
    bgw->add_option("--p", a_p);
    auto* bounds = an->add_subcommand("bounds", "critical-parameter bounds");
    bounds->add_option("--offspring", a_off);
    bounds->add_option("--degree", a_deg);
    auto* dmean = an->add_subcommand("decorated-mean", "decorated-tree offspring mean");
    dmean->add_option("--n", a_n)->required();
    dmean->add_option("--p", a_p)->required();
    auto* thin = an->add_subcommand("thinning", "reduction to almost-surely-positive offspring");
    thin->add_option("--offspring", a_off);
    thin->add_option("--p", a_p);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_o, sim_config, sim_p, sim_engine);
        if (sw->parsed()) return cmd_sweep(sweep_o, sweep_cfg, sweep_grid);
        if (pc->parsed()) return cmd_estimate_pc(pc_o, pc_lo, pc_hi, pc_res);
        if (ca->parsed()) return cmd_couple_audit(couple_o, cp, cpp, c_horizon);
        if (nm->parsed()) return cmd_nonmono_search(nonmono_o, np, npp, n_horizon, n_ball);
        if (eq->parsed()) return cmd_equiv_test(equiv_o, ep, e_horizon);
        if (lc->parsed()) return cmd_lifetime_census(census_o, lp, l_cap);
        if (rc->parsed()) return cmd_recurrence(rec_o, rp, r_horizons);
        if (ta->parsed()) return cmd_tree_asymptotics(tree_o, t_degrees, t_lo, t_hi, t_res);
        if (dc->parsed()) return cmd_decorated(dec_o, d_ns, dp, d_d0, d_tree_trials);
        if (th->parsed()) return cmd_theta_probe(theta_o, th_n, th_r, th_eps, th_dim);
        if (pe->parsed()) return cmd_percolation(perc_o, p_grid, p_sizes);
        if (an->parsed()) {
            json out;
            if (esc->parsed()) {
                out = {{"interior", simi::escape_prob_interior(a_n, a_l)},
                       {"exit", simi::escape_prob_exit(a_n, a_l)}};
            } else if (bgw->parsed()) {
                const auto r = simi::bgw_extinction(parse_offspring_arg(a_off), a_p);
                out = {{"extinction", r.extinction_prob},
                       {"survival", r.survival_prob},
                       {"mean_offspring", r.mean_offspring}};
            } else if (bounds->parsed()) {
                const auto off = parse_offspring_arg(a_off);
                out = {{"mean_bound", simi::offspring_mean_bound(off)},
                       {"degree_bound", simi::degree_bound(a_deg)}};
            } else if (dmean->parsed()) {
                out = {{"mean", simi::decorated_offspring_mean(a_n, a_p)},
                       {"upper_bound", simi::decorated_offspring_mean_bound(a_n, a_p)}};
            } else if (thin->parsed()) {
                const auto t = simi::thinned_parameters(parse_offspring_arg(a_off), a_p);
                out = {{"effective_susceptibility", t.effective_susceptibility},
                       {"conditioned", t.conditioned.describe()}};
            }
            std::cout << out.dump() << '\n';
            return 0;
        }
    } catch (const simi::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
