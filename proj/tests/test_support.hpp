#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "mdm/mdm.hpp"

namespace mdm::testing {

inline std::set<std::vector<Index>> as_set(const ActiveSet& a) {
    std::set<std::vector<Index>> out;
    a.store.for_each([&](const VarSet& u, const Unit&) { out.insert(u.vector()); });
    return out;
}

/// Every u subset of {1..J} with |u| <= L, visited in lexicographic order.
/// `keep(u)` returning false prunes all extensions of u by larger elements.
inline void enumerate_sets(Index J, std::size_t L, const std::function<bool(const std::vector<Index>&)>& keep) {
    std::vector<Index> u;
    std::function<void(Index)> rec = [&](Index start) {
        if (u.size() == L) return;
        for (Index j = start; j <= J; ++j) {
            u.push_back(j);
            const bool go = keep(u);
            if (go) rec(j + 1);
            u.pop_back();
            if (!go) break;
        }
    };
    keep(u);
    rec(1);
}

/// A random family of subsets of {1..n}, the empty set included.
inline ActiveSet random_active_set(std::mt19937_64& gen, Index n, std::size_t count, std::size_t max_card) {
    ActiveSet a;
    a.store.try_emplace(VarSet{});
    std::uniform_int_distribution<std::size_t> card(1, max_card);
    std::uniform_int_distribution<Index> elem(1, n);
    for (std::size_t k = 0; k < count; ++k) {
        std::set<Index> s;
        const std::size_t c = card(gen);
        while (s.size() < c) s.insert(elem(gen));
        a.store.try_emplace(VarSet(std::vector<Index>(s.begin(), s.end())));
    }
    refresh_stats(a);
    return a;
}

inline LevelAssignment random_levels(std::mt19937_64& gen, const ActiveSet& a, int lo, int hi) {
    LevelAssignment levels;
    std::uniform_int_distribution<int> pick(lo, hi);
    a.store.for_each([&](const VarSet& u, const Unit&) {
        if (!u.empty()) levels.set(u, pick(gen));
    });
    return levels;
}

inline PodWeights beta_model(double beta) { return NormModel(beta).pod_weights(); }

}  // namespace mdm::testing
