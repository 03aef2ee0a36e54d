#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdm/error.hpp"
#include "mdm/pod_weights.hpp"
#include "mdm/setkit.hpp"

namespace mdm {

struct Unit {};

/// U = { u : w(u) > T } together with its dimension statistics.
///
/// counts[l] and tau[l] are indexed by cardinality; counts[0] = 1 counts the
/// empty set and tau[0] = 0. When U = {empty set}, d_sup = tau_star = 0.
struct ActiveSet {
    SetStore<Unit> store;
    double T = 0.0;
    std::size_t d_sup = 0;
    std::vector<Index> tau;
    Index tau_star = 0;
    std::vector<std::size_t> counts;

    std::size_t size() const noexcept { return store.size(); }
    bool contains(const VarSet& u) const { return store.contains(u); }
};

struct DimensionStats {
    std::size_t d_sup = 0;
    std::vector<Index> tau;
    Index tau_star = 0;
    std::vector<std::size_t> counts;
};

inline DimensionStats dimension_stats(const SetStore<Unit>& store) {
    DimensionStats st;
    for (std::size_t l = 0; l < store.cardinality_bound(); ++l)
        if (store.size(l) > 0) st.d_sup = l;
    st.tau.assign(st.d_sup + 1, 0);
    st.counts.assign(st.d_sup + 1, 0);
    for (std::size_t l = 0; l <= st.d_sup; ++l) {
        st.counts[l] = store.size(l);
        for (const auto& [u, unit] : store.entries(l))
            if (!u.empty()) st.tau[l] = std::max(st.tau[l], u.back());
        st.tau_star = std::max(st.tau_star, st.tau[l]);
    }
    return st;
}

inline DimensionStats dimension_stats(const ActiveSet& a) { return dimension_stats(a.store); }

inline void refresh_stats(ActiveSet& a) {
    auto st = dimension_stats(a.store);
    a.d_sup = st.d_sup;
    a.tau = std::move(st.tau);
    a.tau_star = st.tau_star;
    a.counts = std::move(st.counts);
}

inline constexpr int kDefaultEllThreshold = 64;

/// Builds U cardinality by cardinality. For each l the candidate starts at
/// (1, ..., l); an accepted set advances its last element, a rejected one
/// backtracks to the previous index and advances that one. The construction
/// stops at the first l for which nothing qualifies.
inline ActiveSet build_active_set(const PodWeights& p, double T, int ell_threshold = kDefaultEllThreshold) {
    if (!(T > 0.0)) throw ValidationError("threshold T must be positive");
    if (ell_threshold < 1) throw ValidationError("ell_threshold must be >= 1");
    const double log_T = std::log(T);

    ActiveSet a;
    a.T = T;
    if (!p.exceeds(std::span<const Index>{}, log_T)) throw NumericError("empty active set");
    a.store.try_emplace(VarSet{});

    for (int ell = 1; ell <= ell_threshold; ++ell) {
        const auto l = static_cast<std::size_t>(ell);
        std::vector<Index> u(l);
        for (std::size_t k = 0; k < l; ++k) u[k] = static_cast<Index>(k + 1);
        std::size_t i = l;  // 1-based index of the next element to increment
        std::size_t found = 0;
        for (;;) {
            if (p.exceeds(u, log_T)) {
                i = l;
                a.store.try_emplace(VarSet::from_sorted(u));
                ++found;
            } else {
                --i;
            }
            if (i == 0) break;
            const Index base = u[i - 1];
            for (std::size_t j = i; j <= l; ++j) u[j - 1] = base + static_cast<Index>(j - i + 1);
        }
        if (found == 0) break;
        if (ell == ell_threshold) throw NumericError("cardinality cap hit");
    }
    refresh_stats(a);
    return a;
}

// JSON-lines dump: one JSON array of indices per line, by cardinality then insertion order.
inline void write_jsonl(std::ostream& os, const ActiveSet& a) {
    a.store.for_each([&](const VarSet& u, const Unit&) { os << nlohmann::json(u.vector()).dump() << '\n'; });
}

inline ActiveSet read_jsonl(std::istream& is, double T = 0.0) {
    ActiveSet a;
    a.T = T;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto j = nlohmann::json::parse(line);
        if (!j.is_array()) throw ValidationError("active-set line is not an array");
        a.store.try_emplace(VarSet(j.get<std::vector<Index>>()));
    }
    refresh_stats(a);
    return a;
}

/// Row of the active-set census: T, d_sup, tau_star and counts by size 1..d_sup.
inline nlohmann::json summary_json(const ActiveSet& a) {
    std::vector<std::size_t> by_size;
    for (std::size_t l = 1; l < a.counts.size(); ++l) by_size.push_back(a.counts[l]);
    std::vector<Index> tau;
    for (std::size_t l = 1; l < a.tau.size(); ++l) tau.push_back(a.tau[l]);
    return {{"T", a.T},         {"d_sup", a.d_sup},    {"tau_star", a.tau_star},
            {"tau", tau},       {"counts", by_size},   {"total_sets", a.size()}};
}

}  // namespace mdm
