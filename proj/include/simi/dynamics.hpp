#ifndef SIMI_DYNAMICS_HPP
#define SIMI_DYNAMICS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "simi/graph.hpp"
#include "simi/random.hpp"

namespace simi {

using VertexSet = std::unordered_set<VertexKey, VertexHash>;

constexpr std::uint64_t kNoLimit = std::numeric_limits<std::uint64_t>::max();

struct StopRule {
    std::uint64_t max_steps = 20000;
    std::uint64_t max_parasites = 100000;  // ceiling on simultaneously alive parasites
    std::uint64_t max_radius = kNoLimit;

    void validate() const {
        if (max_steps == kNoLimit && max_parasites == kNoLimit && max_radius == kNoLimit)
            throw std::invalid_argument("stop rule must have at least one finite bound");
    }

    bool operator==(const StopRule&) const = default;
};

enum class TrialStatus { Extinct, CensoredTime, CensoredPopulation, CensoredRadius };

inline const char* status_name(TrialStatus s) {
    switch (s) {
        case TrialStatus::Extinct: return "extinct";
        case TrialStatus::CensoredTime: return "censored_time";
        case TrialStatus::CensoredPopulation: return "censored_population";
        case TrialStatus::CensoredRadius: return "censored_radius";
    }
    return "?";
}

struct TrialOutcome {
    TrialStatus status = TrialStatus::Extinct;
    std::uint64_t extinction_time = 0;  // meaningful when status == Extinct
    std::uint64_t steps = 0;            // steps actually executed
    std::uint64_t total_infected = 0;
    std::uint64_t peak_alive = 0;
    std::uint64_t total_created = 0;
    std::uint64_t origin_visits = 0;  // parasite arrivals at the origin after time 0
    std::uint64_t max_radius = 0;
    double wallclock_s = 0;
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;

    bool survived() const { return status != TrialStatus::Extinct; }
};

/// Per-step population accounting, for conservation checks and traces.
struct StepLedger {
    std::uint64_t step = 0;
    std::uint64_t alive_before = 0;
    std::uint64_t alive_after = 0;
    std::uint64_t deaths_immune = 0;
    std::uint64_t deaths_infection = 0;  // attacker consumed at an infection
    std::uint64_t births = 0;
    std::uint64_t infections = 0;
};

struct EngineOptions {
    // Single-parasite mode: every infection yields no offspring and consumes
    // the attacker; isolates the geometric visited-set law.
    bool single_parasite = false;
    // Thinned immunity: a host also counts as immune when A_x = 0.
    bool require_offspring = false;
    // Replaces A_x as the initial parasite count on every initial vertex
    // (the frog-start convention places A_0 - 1).
    std::optional<std::uint64_t> initial_count_override;
    std::vector<StepLedger>* ledger = nullptr;
    // When set, records the step at which each vertex became infected
    // (0 for initial vertices).
    std::unordered_map<VertexKey, std::uint64_t, VertexHash>* infection_times = nullptr;
};

namespace detail {

inline std::uint64_t radius_from(const GraphSpec& spec, const std::vector<VertexKey>& anchors,
                                 const VertexKey& v) {
    std::uint64_t best = kNoLimit;
    for (const auto& a : anchors) best = std::min(best, graph_distance(spec, a, v));
    return best;
}

/// True when no parasite can ever reach a vertex that is not already
/// revealed immune: the live region is fenced in, so every parasite dies in
/// finite time almost surely and no further infection can happen.
inline bool enclosed(const GraphSpec& spec, const std::vector<VertexKey>& sources,
                     const std::unordered_set<VertexKey, VertexHash>& infected,
                     const std::unordered_map<VertexKey, bool, VertexHash>& revealed) {
    std::unordered_set<VertexKey, VertexHash> seen;
    std::vector<VertexKey> stack;
    for (const auto& s : sources)
        if (seen.insert(s).second) stack.push_back(s);
    while (!stack.empty()) {
        const VertexKey v = std::move(stack.back());
        stack.pop_back();
        const int deg = degree_of(spec, v);
        for (int i = 0; i < deg; ++i) {
            VertexKey w = neighbor_at(spec, v, i);
            if (infected.count(w)) {
                if (seen.insert(w).second) stack.push_back(std::move(w));
                continue;
            }
            const auto it = revealed.find(w);
            if (it == revealed.end() || it->second) return false;
        }
    }
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parasite-wise construction
// ---------------------------------------------------------------------------

/// Each parasite carries a label (birth vertex, index) and follows the walk
/// keyed by that label.  Within a step, labels are processed in ascending
/// (birth key, index) order; labels created during a step first move in the
/// next one.
class ParasiteWiseEngine {
public:
    struct Parasite {
        VertexKey birth;
        std::uint32_t index;
        std::uint64_t age;
        VertexKey pos;
    };

    ParasiteWiseEngine(const HostField& field, double p, std::vector<VertexKey> initial,
                       EngineOptions opt = {})
        : field_(field), spec_(field.graph()), p_(p), opt_(opt) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
        if (initial.empty()) throw std::invalid_argument("initial infected set must be non-empty");
        std::sort(initial.begin(), initial.end());
        initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
        for (const auto& x : initial) validate_key(spec_, x);
        origin_ = initial.front();
        anchors_ = initial;
        for (const auto& x : initial) {
            infected_.insert(x);
            if (opt_.infection_times) opt_.infection_times->emplace(x, 0);
            ++total_infected_;
            std::uint64_t m = opt_.initial_count_override ? *opt_.initial_count_override : field_.offspring(x);
            for (std::uint64_t i = 1; i <= m; ++i)
                alive_.push_back(Parasite{x, static_cast<std::uint32_t>(i), 0, x});
            total_created_ += m;
        }
        sort_parasites(alive_);
        peak_alive_ = alive_.size();
    }

    /// Advance one synchronous step.  Returns the ledger for the step.
    StepLedger step() {
        StepLedger led;
        led.step = ++steps_;
        led.alive_before = alive_.size();

        std::vector<Parasite> spawned;
        std::size_t w = 0;
        for (std::size_t r = 0; r < alive_.size(); ++r) {
            Parasite par = std::move(alive_[r]);
            ++par.age;
            par.pos = field_.walk_step(par.birth, par.index, par.age, par.pos);
            note_arrival(par.pos);
            bool dies = false;
            if (!infected_.count(par.pos)) {
                if (reveal_susceptible(par.pos)) {
                    infected_.insert(par.pos);
                    if (opt_.infection_times) opt_.infection_times->emplace(par.pos, steps_);
                    ++total_infected_;
                    ++led.infections;
                    const std::uint64_t a = opt_.single_parasite ? 0 : field_.offspring(par.pos);
                    if (a == 0) {
                        dies = true;
                        ++led.deaths_infection;
                    } else {
                        for (std::uint64_t j = 1; j + 1 <= a; ++j)
                            spawned.push_back(Parasite{par.pos, static_cast<std::uint32_t>(j), 0, par.pos});
                        led.births += a - 1;
                        total_created_ += a - 1;
                    }
                } else {
                    dies = true;
                    ++led.deaths_immune;
                }
            }
            if (!dies) alive_[w++] = std::move(par);
        }
        alive_.resize(w);
        if (!spawned.empty()) {
            sort_parasites(spawned);
            const std::size_t mid = alive_.size();
            alive_.insert(alive_.end(), std::make_move_iterator(spawned.begin()),
                          std::make_move_iterator(spawned.end()));
            std::inplace_merge(alive_.begin(), alive_.begin() + mid, alive_.end(), less);
        }
        led.alive_after = alive_.size();
        peak_alive_ = std::max<std::uint64_t>(peak_alive_, alive_.size());
        if (opt_.ledger) opt_.ledger->push_back(led);
        return led;
    }

    std::uint64_t alive_count() const { return alive_.size(); }
    std::uint64_t steps_done() const { return steps_; }
    std::uint64_t total_infected() const { return total_infected_; }
    std::uint64_t total_created() const { return total_created_; }
    std::uint64_t peak_alive() const { return peak_alive_; }
    std::uint64_t origin_visits() const { return origin_visits_; }
    std::uint64_t max_radius() const { return max_radius_; }
    const VertexSet& infected() const { return infected_; }
    const std::vector<Parasite>& parasites() const { return alive_; }

    bool no_escape() const {
        std::vector<VertexKey> sources;
        sources.reserve(alive_.size());
        for (const auto& par : alive_) sources.push_back(par.pos);
        return detail::enclosed(spec_, sources, infected_, revealed_);
    }

private:
    static bool less(const Parasite& a, const Parasite& b) {
        if (a.birth != b.birth) return a.birth < b.birth;
        return a.index < b.index;
    }
    static void sort_parasites(std::vector<Parasite>& v) { std::sort(v.begin(), v.end(), less); }

    bool reveal_susceptible(const VertexKey& v) {
        auto it = revealed_.find(v);
        if (it != revealed_.end()) return it->second;
        bool s = field_.susceptible(v, p_);
        if (s && opt_.require_offspring && field_.offspring(v) == 0) s = false;
        revealed_.emplace(v, s);
        return s;
    }

    void note_arrival(const VertexKey& pos) {
        if (pos == origin_) ++origin_visits_;
        const std::uint64_t r = detail::radius_from(spec_, anchors_, pos);
        max_radius_ = std::max(max_radius_, r);
    }

    const HostField& field_;
    GraphSpec spec_;
    double p_;
    EngineOptions opt_;
    VertexKey origin_;
    std::vector<VertexKey> anchors_;
    std::vector<Parasite> alive_;
    VertexSet infected_;
    std::unordered_map<VertexKey, bool, VertexHash> revealed_;
    std::uint64_t steps_ = 0;
    std::uint64_t total_infected_ = 0;
    std::uint64_t total_created_ = 0;
    std::uint64_t peak_alive_ = 0;
    std::uint64_t origin_visits_ = 0;
    std::uint64_t max_radius_ = 0;
};

// ---------------------------------------------------------------------------
// Vertex-wise construction
// ---------------------------------------------------------------------------

/// Each vertex carries a direction sequence D^x consumed by whichever
/// parasites occupy it, with a per-vertex jump counter.  Jumps within a step
/// are resolved in ascending (source vertex, slot) order.
class VertexWiseEngine {
public:
    VertexWiseEngine(const HostField& field, double p, std::vector<VertexKey> initial,
                     EngineOptions opt = {})
        : field_(field), spec_(field.graph()), p_(p), opt_(opt) {
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
        if (initial.empty()) throw std::invalid_argument("initial infected set must be non-empty");
        std::sort(initial.begin(), initial.end());
        initial.erase(std::unique(initial.begin(), initial.end()), initial.end());
        for (const auto& x : initial) validate_key(spec_, x);
        origin_ = initial.front();
        anchors_ = initial;
        for (const auto& x : initial) {
            infected_.insert(x);
            if (opt_.infection_times) opt_.infection_times->emplace(x, 0);
            ++total_infected_;
            std::uint64_t m = opt_.initial_count_override ? *opt_.initial_count_override : field_.offspring(x);
            if (m > 0) counts_[x] = m;
            alive_ += m;
            total_created_ += m;
        }
        peak_alive_ = alive_;
    }

    StepLedger step() {
        StepLedger led;
        led.step = ++steps_;
        led.alive_before = alive_;

        std::map<VertexKey, std::uint64_t> next;
        for (auto& [x, cnt] : counts_) {
            std::uint64_t& used = njumps_[x];
            for (std::uint64_t slot = 1; slot <= cnt; ++slot) {
                VertexKey y = field_.jump_direction(x, used + slot);
                note_arrival(y);
                if (infected_.count(y)) {
                    next[y] += 1;  // relocation
                    continue;
                }
                if (reveal_susceptible(y)) {
                    infected_.insert(y);
                    if (opt_.infection_times) opt_.infection_times->emplace(y, steps_);
                    ++total_infected_;
                    ++led.infections;
                    ++led.deaths_infection;  // first arrival is consumed
                    const std::uint64_t a = opt_.single_parasite ? 0 : field_.offspring(y);
                    if (a > 0) next[y] += a;
                    led.births += a;
                    total_created_ += a;
                } else {
                    ++led.deaths_immune;
                }
            }
            used += cnt;
        }
        counts_.swap(next);
        alive_ = 0;
        for (auto& [x, c] : counts_) alive_ += c;
        led.alive_after = alive_;
        peak_alive_ = std::max(peak_alive_, alive_);
        if (opt_.ledger) opt_.ledger->push_back(led);
        return led;
    }

    std::uint64_t alive_count() const { return alive_; }
    std::uint64_t steps_done() const { return steps_; }
    std::uint64_t total_infected() const { return total_infected_; }
    std::uint64_t total_created() const { return total_created_; }
    std::uint64_t peak_alive() const { return peak_alive_; }
    std::uint64_t origin_visits() const { return origin_visits_; }
    std::uint64_t max_radius() const { return max_radius_; }
    const VertexSet& infected() const { return infected_; }
    const std::map<VertexKey, std::uint64_t>& counts() const { return counts_; }

    bool no_escape() const {
        std::vector<VertexKey> sources;
        sources.reserve(counts_.size());
        for (const auto& [x, c] : counts_)
            if (c > 0) sources.push_back(x);
        return detail::enclosed(spec_, sources, infected_, revealed_);
    }

private:
    bool reveal_susceptible(const VertexKey& v) {
        auto it = revealed_.find(v);
        if (it != revealed_.end()) return it->second;
        bool s = field_.susceptible(v, p_);
        if (s && opt_.require_offspring && field_.offspring(v) == 0) s = false;
        revealed_.emplace(v, s);
        return s;
    }

    void note_arrival(const VertexKey& pos) {
        if (pos == origin_) ++origin_visits_;
        const std::uint64_t r = detail::radius_from(spec_, anchors_, pos);
        max_radius_ = std::max(max_radius_, r);
    }

    const HostField& field_;
    GraphSpec spec_;
    double p_;
    EngineOptions opt_;
    VertexKey origin_;
    std::vector<VertexKey> anchors_;
    std::map<VertexKey, std::uint64_t> counts_;  // sorted: canonical jump order
    std::map<VertexKey, std::uint64_t> njumps_;
    VertexSet infected_;
    std::unordered_map<VertexKey, bool, VertexHash> revealed_;
    std::uint64_t alive_ = 0;
    std::uint64_t steps_ = 0;
    std::uint64_t total_infected_ = 0;
    std::uint64_t total_created_ = 0;
    std::uint64_t peak_alive_ = 0;
    std::uint64_t origin_visits_ = 0;
    std::uint64_t max_radius_ = 0;
};

// ---------------------------------------------------------------------------
// Trial driver
// ---------------------------------------------------------------------------

enum class EngineKind { ParasiteWise, VertexWise };

namespace detail {

// Fenced-in populations are declared extinct once no infection has happened
// for this many steps and a reachability check proves escape impossible.
inline constexpr std::uint64_t kEnclosureCheckInterval = 32;

template <class Engine>
TrialOutcome drive(Engine& eng, const StopRule& stop) {
    stop.validate();
    TrialOutcome out;
    std::uint64_t stagnant = 0;
    while (true) {
        if (eng.alive_count() == 0) {
            out.status = TrialStatus::Extinct;
            out.extinction_time = eng.steps_done();
            break;
        }
        if (stagnant >= kEnclosureCheckInterval && stagnant % kEnclosureCheckInterval == 0 &&
            eng.no_escape()) {
            // every remaining parasite is confined to dead territory with a
            // revealed-immune boundary: extinction is almost surely certain
            out.status = TrialStatus::Extinct;
            out.extinction_time = eng.steps_done();
            break;
        }
        if (eng.steps_done() >= stop.max_steps) {
            out.status = TrialStatus::CensoredTime;
            break;
        }
        if (eng.alive_count() > stop.max_parasites) {
            out.status = TrialStatus::CensoredPopulation;
            break;
        }
        if (eng.max_radius() > stop.max_radius) {
            out.status = TrialStatus::CensoredRadius;
            break;
        }
        const StepLedger led = eng.step();
        stagnant = led.infections > 0 ? 0 : stagnant + 1;
    }
    out.steps = eng.steps_done();
    out.total_infected = eng.total_infected();
    out.peak_alive = eng.peak_alive();
    out.total_created = eng.total_created();
    out.origin_visits = eng.origin_visits();
    out.max_radius = eng.max_radius();
    return out;
}

}  // namespace detail

inline TrialOutcome run_trial(const HostField& field, double p, const std::vector<VertexKey>& initial,
                              const StopRule& stop, EngineKind kind, const EngineOptions& opt = {}) {
    TrialOutcome out;
    if (kind == EngineKind::ParasiteWise) {
        ParasiteWiseEngine eng(field, p, initial, opt);
        out = detail::drive(eng, stop);
    } else {
        VertexWiseEngine eng(field, p, initial, opt);
        out = detail::drive(eng, stop);
    }
    out.seed = field.master_seed();
    out.trial = field.trial_index();
    return out;
}

// ---------------------------------------------------------------------------
// Lifetime and visited set of a single labelled parasite
// ---------------------------------------------------------------------------

struct LifetimeResult {
    bool bounded = false;       // false: step cap reached before death
    std::uint64_t lifetime = 0; // first n with Y_n outside `ignore` and immune
    std::vector<VertexKey> visited;  // distinct positions strictly before the death time
};

/// tau^p_{x,i}(ignore) and V^p_{x,i}(ignore) for the walk labelled (x, i).
inline LifetimeResult lifetime_and_visited(const HostField& field, double p, const VertexKey& x,
                                           std::uint32_t index, const VertexSet& ignore,
                                           std::uint64_t step_cap) {
    validate_key(field.graph(), x);
    LifetimeResult res;
    VertexSet seen;
    VertexKey pos = x;
    for (std::uint64_t n = 0;; ++n) {
        if (!ignore.count(pos) && !field.susceptible(pos, p)) {
            res.bounded = true;
            res.lifetime = n;
            return res;
        }
        if (seen.insert(pos).second) res.visited.push_back(pos);
        if (n >= step_cap) return res;  // unbounded flag, partial visited set
        pos = field.walk_step(x, index, n + 1, pos);
    }
}

// ---------------------------------------------------------------------------
// Eventually-infected closure (A >= 1 only)
// ---------------------------------------------------------------------------

struct ClosureResult {
    std::vector<VertexKey> infected;  // I_infinity restricted to the radius cap
    bool truncated = false;           // a walk cap or expansion cap was hit
};

/// Breadth-first closure over infection paths: a vertex is eventually
/// infected iff it is initial or reachable through a chain of visited sets,
/// with label budgets A_x for initial vertices and A_x - 1 elsewhere.
inline ClosureResult eventually_infected(const HostField& field, double p,
                                         const std::vector<VertexKey>& initial,
                                         std::uint64_t radius_cap,
                                         std::uint64_t walk_step_cap = 200000,
                                         std::uint64_t expansion_cap = 1000000) {
    if (!field.offspring_spec().always_positive())
        throw std::invalid_argument("eventually_infected requires A >= 1 almost surely");
    if (initial.empty()) throw std::invalid_argument("initial infected set must be non-empty");
    const GraphSpec& spec = field.graph();
    for (const auto& x : initial) validate_key(spec, x);

    VertexSet initial_set(initial.begin(), initial.end());
    VertexSet discovered = initial_set;
    std::vector<VertexKey> frontier(discovered.begin(), discovered.end());
    std::sort(frontier.begin(), frontier.end());
    ClosureResult res;
    std::uint64_t expanded = 0;
    while (!frontier.empty()) {
        std::vector<VertexKey> next_frontier;
        for (const auto& x : frontier) {
            const std::uint64_t a = field.offspring(x);
            const std::uint64_t budget = initial_set.count(x) ? a : (a == 0 ? 0 : a - 1);
            for (std::uint64_t i = 1; i <= budget; ++i) {
                auto life = lifetime_and_visited(field, p, x, static_cast<std::uint32_t>(i),
                                                 initial_set, walk_step_cap);
                if (!life.bounded) res.truncated = true;
                for (const auto& v : life.visited) {
                    if (discovered.insert(v).second) next_frontier.push_back(v);
                }
                if (++expanded > expansion_cap) {
                    res.truncated = true;
                    next_frontier.clear();
                    frontier.clear();
                    break;
                }
            }
            if (expanded > expansion_cap) break;
        }
        std::sort(next_frontier.begin(), next_frontier.end());
        frontier.swap(next_frontier);
    }
    for (const auto& v : discovered) {
        if (detail::radius_from(spec, initial, v) <= radius_cap) res.infected.push_back(v);
    }
    std::sort(res.infected.begin(), res.infected.end());
    return res;
}

}  // namespace simi

#endif  // SIMI_DYNAMICS_HPP
