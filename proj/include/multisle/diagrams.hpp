#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "multisle/specfun.hpp"

namespace multisle {

// ---------------------------------------------------------------------------
// Non-crossing perfect matchings of 2N polygon vertices.  partner[v] is the
// 0-based vertex matched to v; sigma is the 1-based canonical index.
//
// Canonical order: the rainbow diagram (arcs j <-> 2N-j+1) is pinned at
// sigma = N-1 for N >= 2, and for N = 3, 4 the remaining base diagrams of the
// hexagon/octagon weight families are pinned at sigma = 1 (and sigma = 2 for
// N = 4); every other diagram fills the free slots in ascending
// lexicographic order of its partner sequence.  The full table ships in the
// README.
// ---------------------------------------------------------------------------

struct PolygonDiagram {
    std::vector<int> partner;
    int sigma = 0;

    int n_pairs() const { return static_cast<int>(partner.size()) / 2; }

    bool operator==(const PolygonDiagram& o) const { return partner == o.partner; }

    // Arcs as sorted (lo, hi) pairs, ordered by lo; 0-based.
    std::vector<std::pair<int, int>> arcs() const {
        std::vector<std::pair<int, int>> out;
        for (int v = 0; v < static_cast<int>(partner.size()); ++v)
            if (partner[v] > v)
                out.emplace_back(v, partner[v]);
        return out;
    }
};

inline PolygonDiagram make_diagram(int n_pairs,
                                   std::vector<std::pair<int, int>> arcs_1based) {
    PolygonDiagram d;
    d.partner.assign(2 * n_pairs, -1);
    for (auto [a, b] : arcs_1based) {
        d.partner[a - 1] = b - 1;
        d.partner[b - 1] = a - 1;
    }
    return d;
}

inline PolygonDiagram rainbow_diagram(int n_pairs) {
    PolygonDiagram d;
    d.partner.assign(2 * n_pairs, -1);
    for (int j = 0; j < n_pairs; ++j) {
        d.partner[j] = 2 * n_pairs - 1 - j;
        d.partner[2 * n_pairs - 1 - j] = j;
    }
    return d;
}

inline PolygonDiagram hex_pi1_diagram() {
    return make_diagram(3, {{1, 6}, {2, 3}, {4, 5}});
}
inline PolygonDiagram oct_pi1_diagram() {
    return make_diagram(4, {{1, 8}, {2, 3}, {4, 5}, {6, 7}});
}
inline PolygonDiagram oct_pi2_diagram() {
    return make_diagram(4, {{1, 8}, {2, 7}, {3, 4}, {5, 6}});
}

inline PolygonDiagram rotate_diagram(const PolygonDiagram& d, int steps) {
    const int m = static_cast<int>(d.partner.size());
    PolygonDiagram out;
    out.partner.assign(m, -1);
    const int s = ((steps % m) + m) % m;
    for (int v = 0; v < m; ++v)
        out.partner[(v + s) % m] = (d.partner[v] + s) % m;
    return out;
}

namespace detail {

inline void enumerate_matchings(std::vector<int>& partner, int first_free,
                                std::vector<PolygonDiagram>& out) {
    const int m = static_cast<int>(partner.size());
    while (first_free < m && partner[first_free] >= 0)
        ++first_free;
    if (first_free == m) {
        PolygonDiagram d;
        d.partner = partner;
        out.push_back(std::move(d));
        return;
    }
    // Pair the first free vertex with each choice leaving both sides even
    // and unobstructed (non-crossing).
    for (int w = first_free + 1; w < m; w += 2) {
        bool free_between = true;
        for (int v = first_free + 1; v < w; ++v)
            if (partner[v] >= 0) { free_between = false; break; }
        if (!free_between)
            continue;
        partner[first_free] = w;
        partner[w] = first_free;
        enumerate_matchings(partner, first_free + 1, out);
        partner[first_free] = -1;
        partner[w] = -1;
    }
}

} // namespace detail

inline std::vector<PolygonDiagram> enumerate_diagrams(int n_pairs) {
    if (n_pairs < 1 || n_pairs > 8)
        throw std::domain_error("enumerate_diagrams: N must lie in 1..8");
    std::vector<PolygonDiagram> all;
    std::vector<int> partner(2 * n_pairs, -1);
    detail::enumerate_matchings(partner, 0, all);

    const int count = static_cast<int>(catalan(n_pairs));
    std::vector<PolygonDiagram> slots(count);
    std::vector<bool> used(count, false), taken(all.size(), false);
    auto pin = [&](const PolygonDiagram& d, int sigma) {
        for (size_t i = 0; i < all.size(); ++i)
            if (!taken[i] && all[i] == d) {
                slots[sigma - 1] = all[i];
                slots[sigma - 1].sigma = sigma;
                used[sigma - 1] = true;
                taken[i] = true;
                return;
            }
    };
    if (n_pairs >= 2)
        pin(rainbow_diagram(n_pairs), n_pairs - 1);
    if (n_pairs == 3)
        pin(hex_pi1_diagram(), 1);
    if (n_pairs == 4) {
        pin(oct_pi1_diagram(), 1);
        pin(oct_pi2_diagram(), 2);
    }
    std::vector<PolygonDiagram> rest;
    for (size_t i = 0; i < all.size(); ++i)
        if (!taken[i])
            rest.push_back(all[i]);
    std::sort(rest.begin(), rest.end(),
              [](const PolygonDiagram& a, const PolygonDiagram& b) {
                  return a.partner < b.partner;
              });
    size_t r = 0;
    for (int s = 0; s < count; ++s)
        if (!used[s]) {
            slots[s] = rest[r++];
            slots[s].sigma = s + 1;
        }
    return slots;
}

inline std::optional<int> diagram_sigma(const PolygonDiagram& d) {
    const auto table = enumerate_diagrams(d.n_pairs());
    for (const auto& e : table)
        if (e == d)
            return e.sigma;
    return std::nullopt;
}

// Steps such that rot^steps(base) == target, if any.
inline std::optional<int> rotation_steps(const PolygonDiagram& base,
                                         const PolygonDiagram& target) {
    const int m = static_cast<int>(base.partner.size());
    for (int s = 0; s < m; ++s)
        if (rotate_diagram(base, s) == target)
            return s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Allowable limit sequences.  Every non-crossing matching reduces by
// repeatedly collapsing an arc joining vertices adjacent in the current
// (reduced) configuration; an innermost arc is always adjacent.  The returned
// list holds, per step, the 0-based position i of the arc's left endpoint in
// the configuration current at that step (collapse x_{i+1} -> x_i).
// ---------------------------------------------------------------------------

struct LimitSequence {
    std::vector<int> collapse_at;
    PolygonDiagram source;
};

inline LimitSequence collapse_sequence(const PolygonDiagram& d) {
    LimitSequence seq;
    seq.source = d;
    std::vector<int> vertices(d.partner.size());
    for (size_t v = 0; v < d.partner.size(); ++v)
        vertices[v] = static_cast<int>(v);
    std::vector<int> partner = d.partner;
    while (vertices.size() > 0) {
        bool found = false;
        for (size_t pos = 0; pos + 1 < vertices.size(); ++pos) {
            if (partner[vertices[pos]] == vertices[pos + 1]) {
                seq.collapse_at.push_back(static_cast<int>(pos));
                vertices.erase(vertices.begin() + pos, vertices.begin() + pos + 2);
                found = true;
                break;
            }
        }
        if (!found)
            throw std::logic_error("collapse_sequence: no adjacent arc found");
    }
    return seq;
}

// Vertex nesting depth of each arc (1 = outermost within its group).
inline int arc_depth(const PolygonDiagram& d, int lo) {
    int depth = 1;
    const int hi = d.partner[lo];
    for (int v = 0; v < lo; ++v)
        if (d.partner[v] > hi)
            ++depth;
    return depth;
}

} // namespace multisle
