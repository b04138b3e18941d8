// Independent reference implementations used only by the tests.  These are
// deliberately written with different methods from the library code: BFS
// instead of closed-form metrics, dense linear solves instead of series, and
// bisection instead of fixed-point iteration.

#ifndef SIMI_TESTS_ORACLES_HPP
#define SIMI_TESTS_ORACLES_HPP

#include <cstdint>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "simi/graph.hpp"
#include "simi/random.hpp"

namespace oracles {

/// Breadth-first graph distance, materializing neighbourhoods.
inline std::uint64_t bfs_distance(const simi::GraphSpec& spec, const simi::VertexKey& a,
                                  const simi::VertexKey& b, std::uint64_t cap = 64) {
    if (a == b) return 0;
    std::unordered_map<simi::VertexKey, std::uint64_t, simi::VertexHash> dist;
    std::queue<simi::VertexKey> q;
    dist[a] = 0;
    q.push(a);
    while (!q.empty()) {
        const simi::VertexKey v = q.front();
        q.pop();
        const std::uint64_t d = dist[v];
        if (d >= cap) continue;
        const int deg = simi::degree_of(spec, v);
        for (int i = 0; i < deg; ++i) {
            simi::VertexKey w = simi::neighbor_at(spec, v, i);
            if (w == b) return d + 1;
            if (dist.emplace(w, d + 1).second) q.push(std::move(w));
        }
    }
    throw std::runtime_error("bfs cap exceeded");
}

struct EscapeSolve {
    double interior = 0;  // averaged over a uniform start among the n clique seats
    double exit = 0;      // start at the hub vertex
};

/// Escape probabilities from a clique of n hosts glued to a hub with 3 tree
/// edges, with hosts 1..l immune, by dense Gaussian elimination on the
/// hitting system.  The walker dies on immune hosts and escapes through a
/// tree edge; susceptible hosts are transparent.
inline EscapeSolve clique_escape_solve(int n, int l) {
    if (n < 1 || l < 0 || l > n) throw std::invalid_argument("need 0 <= l <= n");
    // unknowns h(0..n): escape probability from seat v; immune seats have h=0
    // h(0)   = 3/(n+3) + sum_{k=1..n} h(k)/(n+3)
    // h(k)   = (1/n) (h(0) + sum_{j!=k, j>=1} h(j))        for susceptible k
    const int m = n + 1;
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    A[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) A[0][k] = -1.0 / (n + 3.0);
    A[0][m] = 3.0 / (n + 3.0);
    for (int k = 1; k <= n; ++k) {
        A[k][k] = 1.0;
        if (k <= l) continue;  // immune: h(k) = 0
        A[k][0] = -1.0 / n;
        for (int j = 1; j <= n; ++j)
            if (j != k && j > l) A[k][j] = -1.0 / n;
    }
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        for (int r = 0; r < m; ++r) {
            if (r == col || A[r][col] == 0.0) continue;
            const double f = A[r][col] / A[col][col];
            for (int c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> h(m);
    for (int i = 0; i < m; ++i) h[i] = A[i][m] / A[i][i];
    EscapeSolve out;
    out.exit = h[0];
    double sum = 0;
    for (int k = 1; k <= n; ++k) sum += k <= l ? 0.0 : h[k];
    out.interior = sum / n;
    return out;
}

/// Smallest root of s = (1-p) + p E[s^A] in [0,1] by bisection on
/// g(s) = f(s) - s, which is positive at 0 and changes sign at the smallest
/// fixed point when supercritical.
inline double bgw_extinction_bisect(const simi::OffspringSpec& off, double p) {
    auto f = [&](double s) { return (1.0 - p) + p * off.pgf(s) - s; };
    const double mean = p * off.mean();
    if (mean <= 1.0) return 1.0;
    // f(0) > 0, f(1) = 0 with f'(1) = mean - 1 > 0, so f < 0 just below 1
    double lo = 0.0, hi = 1.0 - 1e-13;
    if (f(hi) >= 0.0) return 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Monte Carlo version of the expected number of walkers escaping the
/// decorated clique: 3 walkers start on the hub, 2 on each of the n seats,
/// immunity is Bernoulli(1-p) per seat.  Returns (mean, standard error).
inline std::pair<double, double> mc_decorated_mean(int n, double p, std::uint64_t trials,
                                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto walk_escapes = [&](int start, const std::vector<char>& immune) {
        // seats are 1..n, hub is 0; returns true if the walker leaves through
        // one of the hub's 3 tree edges before standing on an immune seat
        int pos = start;
        while (true) {
            if (pos != 0 && immune[pos]) return false;
            if (pos == 0) {
                const int pick = std::uniform_int_distribution<int>(0, n + 2)(rng);
                if (pick < 3) return true;
                pos = pick - 2;  // seat 1..n
            } else {
                const int pick = std::uniform_int_distribution<int>(0, n - 1)(rng);
                // neighbours of seat pos: hub and every other seat
                pos = pick == 0 ? 0 : (pick <= pos - 1 ? pick : pick + 1);
            }
        }
    };
    double sum = 0, sumsq = 0;
    std::vector<char> immune(n + 1, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (int k = 1; k <= n; ++k) immune[k] = unif(rng) < 1.0 - p;
        int xi = 0;
        for (int i = 0; i < 3; ++i) xi += walk_escapes(0, immune);
        for (int k = 1; k <= n; ++k)
            for (int i = 0; i < 2; ++i) xi += walk_escapes(k, immune);
        sum += xi;
        sumsq += double(xi) * xi;
    }
    const double mean = sum / double(trials);
    const double var = (sumsq - sum * mean) / double(trials - 1);
    return {mean, std::sqrt(var / double(trials))};
}

}  // namespace oracles

#endif
