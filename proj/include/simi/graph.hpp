#ifndef SIMI_GRAPH_HPP
#define SIMI_GRAPH_HPP

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace simi {

enum class Family : std::uint8_t { Line = 0, Lattice = 1, RegularTree = 2, DecoratedTree = 3 };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Line: return "line";
        case Family::Lattice: return "lattice";
        case Family::RegularTree: return "regular_tree";
        case Family::DecoratedTree: return "decorated_tree";
    }
    return "?";
}

/// Topology parameters for one of the four supported graph families.
/// Lattice: Z^dim.  RegularTree: the degree-`degree` tree.  DecoratedTree:
/// T_3 with a complete graph on `clique + 1` vertices glued at every tree
/// vertex.  Line: Z.
struct GraphSpec {
    Family family = Family::Lattice;
    int dim = 2;     // Lattice only, >= 1
    int degree = 3;  // RegularTree only, >= 3
    int clique = 1;  // DecoratedTree only, >= 1

    void validate() const {
        switch (family) {
            case Family::Line: break;
            case Family::Lattice:
                if (dim < 1) throw std::invalid_argument("lattice dimension must be >= 1");
                break;
            case Family::RegularTree:
                if (degree < 3) throw std::invalid_argument("tree degree must be >= 3");
                break;
            case Family::DecoratedTree:
                if (clique < 1) throw std::invalid_argument("decoration size must be >= 1");
                break;
        }
    }

    bool operator==(const GraphSpec&) const = default;
};

/// Canonical vertex encoding.  `data` holds integer coordinates (Lattice,
/// Line) or the symbol path from the tree root (RegularTree, DecoratedTree
/// base vertex).  `clique` is the decoration index for DecoratedTree
/// (0 = base vertex) and -1 for every other family.
struct VertexKey {
    Family family = Family::Lattice;
    std::vector<std::int32_t> data;
    std::int32_t clique = -1;

    auto operator<=>(const VertexKey&) const = default;
};

inline VertexKey line_vertex(std::int32_t x) { return VertexKey{Family::Line, {x}, -1}; }

inline VertexKey lattice_vertex(std::vector<std::int32_t> coords) {
    return VertexKey{Family::Lattice, std::move(coords), -1};
}

inline VertexKey tree_vertex(std::vector<std::int32_t> path) {
    return VertexKey{Family::RegularTree, std::move(path), -1};
}

inline VertexKey decorated_vertex(std::vector<std::int32_t> path, std::int32_t k) {
    return VertexKey{Family::DecoratedTree, std::move(path), k};
}

/// The distinguished vertex of each family.
inline VertexKey origin(const GraphSpec& spec) {
    switch (spec.family) {
        case Family::Line: return line_vertex(0);
        case Family::Lattice: return lattice_vertex(std::vector<std::int32_t>(spec.dim, 0));
        case Family::RegularTree: return tree_vertex({});
        case Family::DecoratedTree: return decorated_vertex({}, 0);
    }
    throw std::logic_error("unreachable");
}

inline void validate_key(const GraphSpec& spec, const VertexKey& v) {
    if (v.family != spec.family) throw std::invalid_argument("vertex key family does not match graph spec");
    switch (spec.family) {
        case Family::Line:
            if (v.data.size() != 1 || v.clique != -1) throw std::invalid_argument("malformed line vertex");
            break;
        case Family::Lattice:
            if (static_cast<int>(v.data.size()) != spec.dim || v.clique != -1)
                throw std::invalid_argument("malformed lattice vertex");
            break;
        case Family::RegularTree: {
            if (v.clique != -1) throw std::invalid_argument("malformed tree vertex");
            for (std::size_t i = 0; i < v.data.size(); ++i) {
                const int limit = (i == 0) ? spec.degree : spec.degree - 1;
                if (v.data[i] < 0 || v.data[i] >= limit) throw std::invalid_argument("tree path symbol out of range");
            }
            break;
        }
        case Family::DecoratedTree: {
            if (v.clique < 0 || v.clique > spec.clique) throw std::invalid_argument("clique index out of range");
            for (std::size_t i = 0; i < v.data.size(); ++i) {
                const int limit = (i == 0) ? 3 : 2;
                if (v.data[i] < 0 || v.data[i] >= limit) throw std::invalid_argument("tree path symbol out of range");
            }
            break;
        }
    }
}

inline int degree_of(const GraphSpec& spec, const VertexKey& v) {
    switch (spec.family) {
        case Family::Line: return 2;
        case Family::Lattice: return 2 * spec.dim;
        case Family::RegularTree: return spec.degree;
        case Family::DecoratedTree: return v.clique == 0 ? 3 + spec.clique : spec.clique;
    }
    throw std::logic_error("unreachable");
}

inline int max_degree(const GraphSpec& spec) {
    switch (spec.family) {
        case Family::Line: return 2;
        case Family::Lattice: return 2 * spec.dim;
        case Family::RegularTree: return spec.degree;
        case Family::DecoratedTree: return 3 + spec.clique;
    }
    throw std::logic_error("unreachable");
}

namespace detail {

// Tree neighbour at position `idx` in canonical order: parent first (absent
// at the root), then children by ascending symbol.
inline VertexKey tree_neighbor_at(const VertexKey& v, int idx) {
    if (!v.data.empty()) {
        if (idx == 0) {
            VertexKey parent = v;
            parent.data.pop_back();
            return parent;
        }
        --idx;
    }
    VertexKey child = v;
    child.data.push_back(idx);
    return child;
}

}  // namespace detail

/// The `idx`-th neighbour of `v` in the canonical order, without
/// materializing the full list.  `0 <= idx < degree_of(spec, v)`.
inline VertexKey neighbor_at(const GraphSpec& spec, const VertexKey& v, int idx) {
    switch (spec.family) {
        case Family::Line:
            return line_vertex(idx == 0 ? v.data[0] + 1 : v.data[0] - 1);
        case Family::Lattice: {
            VertexKey out = v;
            out.data[idx / 2] += (idx % 2 == 0) ? 1 : -1;
            return out;
        }
        case Family::RegularTree:
            return detail::tree_neighbor_at(v, idx);
        case Family::DecoratedTree: {
            if (v.clique == 0) {
                if (idx < 3) {
                    VertexKey base{Family::DecoratedTree, v.data, -1};
                    VertexKey out = detail::tree_neighbor_at(base, idx);
                    out.clique = 0;
                    return out;
                }
                return decorated_vertex(v.data, idx - 2);
            }
            const int k = idx < v.clique ? idx : idx + 1;
            return decorated_vertex(v.data, k);
        }
    }
    throw std::logic_error("unreachable");
}

/// Neighbours of `v`, in a deterministic canonical order: Lattice uses
/// +e1,-e1,...,+ed,-ed; trees list the parent first then children by symbol;
/// DecoratedTree lists base-tree neighbours (index 0 only) then clique
/// indices ascending.  Symmetric: u in neighbors(v) iff v in neighbors(u).
inline std::vector<VertexKey> neighbors(const GraphSpec& spec, const VertexKey& v) {
    validate_key(spec, v);
    const int deg = degree_of(spec, v);
    std::vector<VertexKey> out;
    out.reserve(deg);
    for (int i = 0; i < deg; ++i) out.push_back(neighbor_at(spec, v, i));
    return out;
}

namespace detail {

inline int tree_path_distance(const std::vector<std::int32_t>& a, const std::vector<std::int32_t>& b) {
    std::size_t lcp = 0;
    while (lcp < a.size() && lcp < b.size() && a[lcp] == b[lcp]) ++lcp;
    return static_cast<int>(a.size() - lcp) + static_cast<int>(b.size() - lcp);
}

}  // namespace detail

/// Exact graph distance for all supported families.
inline std::uint64_t graph_distance(const GraphSpec& spec, const VertexKey& u, const VertexKey& v) {
    validate_key(spec, u);
    validate_key(spec, v);
    switch (spec.family) {
        case Family::Line:
            return static_cast<std::uint64_t>(std::abs(static_cast<long>(u.data[0]) - v.data[0]));
        case Family::Lattice: {
            std::uint64_t d = 0;
            for (int i = 0; i < spec.dim; ++i)
                d += static_cast<std::uint64_t>(std::abs(static_cast<long>(u.data[i]) - v.data[i]));
            return d;
        }
        case Family::RegularTree:
            return static_cast<std::uint64_t>(detail::tree_path_distance(u.data, v.data));
        case Family::DecoratedTree: {
            if (u.data == v.data) return u.clique == v.clique ? 0u : 1u;
            std::uint64_t d = static_cast<std::uint64_t>(detail::tree_path_distance(u.data, v.data));
            if (u.clique != 0) d += 1;
            if (v.clique != 0) d += 1;
            return d;
        }
    }
    throw std::logic_error("unreachable");
}

/// Kept under the spec'd name: the value is exact for every family, so the
/// "lower bound" is tight.
inline std::uint64_t graph_distance_lower_bound(const GraphSpec& spec, const VertexKey& u, const VertexKey& v) {
    return graph_distance(spec, u, v);
}

/// Sup-norm distance from the origin on Lattice; used by the cube-coverage
/// probe.  Only meaningful for Lattice/Line keys.
inline std::int64_t sup_norm(const VertexKey& v) {
    std::int64_t m = 0;
    for (auto c : v.data) m = std::max<std::int64_t>(m, std::abs(static_cast<std::int64_t>(c)));
    return m;
}

// FNV-1a over the canonical serialization; used for hash containers and for
// keyed random derivation.
inline std::uint64_t key_fingerprint(const VertexKey& v) {
    std::uint64_t h = 1469598103934665603ull;
    auto absorb = [&h](std::uint64_t word) {
        for (int i = 0; i < 8; ++i) {
            h ^= (word >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    absorb(static_cast<std::uint64_t>(v.family));
    absorb(v.data.size());
    for (auto c : v.data) absorb(static_cast<std::uint64_t>(static_cast<std::uint32_t>(c)));
    absorb(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v.clique)));
    return h;
}

struct VertexHash {
    std::size_t operator()(const VertexKey& v) const { return static_cast<std::size_t>(key_fingerprint(v)); }
};

inline std::string key_to_string(const VertexKey& v) {
    std::string s;
    switch (v.family) {
        case Family::Line:
        case Family::Lattice: {
            s = "(";
            for (std::size_t i = 0; i < v.data.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(v.data[i]);
            }
            s += ")";
            break;
        }
        case Family::RegularTree:
        case Family::DecoratedTree: {
            if (v.data.empty()) {
                s = "root";
            } else {
                for (std::size_t i = 0; i < v.data.size(); ++i) {
                    if (i) s += ".";
                    s += std::to_string(v.data[i]);
                }
            }
            if (v.family == Family::DecoratedTree) s += ":" + std::to_string(v.clique);
            break;
        }
    }
    return s;
}

}  // namespace simi

#endif  // SIMI_GRAPH_HPP
