#pragma once

// Coefficient tables over the extended active set U_ext = U plus all subsets.
//
// Expanding every f_u by the anchored alternating sum and regrouping by the
// subset v that is actually evaluated gives
//
//   Smolyak:      A(f) = c_empty f(0) + sum_v sum_m c(v,m) Q_{v,m}(f(.v; 0)),
//                 c(v,m) = sum_{u >= v, m_u = m} (-1)^(|u|-|v|);
//   combination:  c~(v,m) = sum_{u >= v} (-1)^(|u|-|v|+m_u-m) binom(|v|-1, m_u-m),
//                 for max(m_u-|v|+1, 1) <= m <= m_u;
//   QMC:          c(v,w,m) = sum_{u >= v, u|v = w, m_u >= m} (-1)^(|u|-|v|) 2^(m_max-m_u),
//
// with c_empty = sum_{u in U} (-1)^|u|.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdm/active_set.hpp"
#include "mdm/error.hpp"
#include "mdm/setkit.hpp"
#include "mdm/smolyak.hpp"

namespace mdm {

/// m_u for every nonempty u in U.
class LevelAssignment {
public:
    static constexpr int kMaxLevel = 62;

    void set(const VarSet& u, int m) {
        if (u.empty()) throw ValidationError("levels are assigned to nonempty sets only");
        if (m < 0 || m > kMaxLevel) throw ValidationError("level out of range");
        level_[u] = m;
        m_max_ = std::max(m_max_, m);
    }

    int at(const VarSet& u) const {
        auto it = level_.find(u);
        if (it == level_.end()) throw ValidationError("no level for set " + u.to_string());
        return it->second;
    }

    bool contains(const VarSet& u) const { return level_.count(u) != 0; }
    int m_max() const noexcept { return m_max_; }
    std::size_t size() const noexcept { return level_.size(); }
    const std::unordered_map<VarSet, int, VarSetHash>& map() const noexcept { return level_; }

private:
    std::unordered_map<VarSet, int, VarSetHash> level_;
    int m_max_ = 0;
};

/// m -> coefficient, zeros dropped.
using LevelCoeffs = std::map<int, std::int64_t>;

struct SmolyakTables {
    SetStore<LevelCoeffs> ext;
    std::int64_t c_empty = 0;

    std::int64_t coefficient(const VarSet& v, int m) const {
        const LevelCoeffs* c = ext.find(v);
        if (c == nullptr) return 0;
        auto it = c->find(m);
        return it == c->end() ? 0 : it->second;
    }
};

/// Same layout as SmolyakTables; the values are c~(v,m).
struct CombinationTables {
    SetStore<LevelCoeffs> ext;
    std::int64_t c_empty = 0;

    std::int64_t coefficient(const VarSet& v, int m) const {
        const LevelCoeffs* c = ext.find(v);
        if (c == nullptr) return 0;
        auto it = c->find(m);
        return it == c->end() ? 0 : it->second;
    }
};

/// One position w in M(v) with its coefficients c(v,w,m) for m = 0..m_max.
struct QmcPosition {
    VarSet w;
    std::vector<std::int64_t> c;
};

struct QmcPositions {
    std::vector<QmcPosition> positions;

    QmcPosition* find(const VarSet& w) {
        for (auto& p : positions)
            if (p.w == w) return &p;
        return nullptr;
    }
    const QmcPosition* find(const VarSet& w) const {
        return const_cast<QmcPositions*>(this)->find(w);
    }
};

struct QmcTables {
    SetStore<QmcPositions> ext;
    std::int64_t c_empty = 0;
    int m_max = 0;

    std::int64_t coefficient(const VarSet& v, const VarSet& w, int m) const {
        const QmcPositions* ps = ext.find(v);
        if (ps == nullptr) return 0;
        const QmcPosition* p = ps->find(w);
        if (p == nullptr || m < 0 || m > m_max) return 0;
        return p->c[static_cast<std::size_t>(m)];
    }
};

namespace detail {

inline std::int64_t parity_sign(std::size_t k) noexcept { return k % 2 == 0 ? 1 : -1; }

inline void checked_add(std::int64_t& acc, std::int64_t x) {
    if (__builtin_add_overflow(acc, x, &acc)) throw NumericError("coefficient overflows 64 bits");
}

inline std::int64_t empty_coefficient(const ActiveSet& a) {
    std::int64_t c = 0;
    a.store.for_each([&](const VarSet& u, const Unit&) { c += parity_sign(u.size()); });
    return c;
}

inline void require_levels(const ActiveSet& a, const LevelAssignment& levels) {
    a.store.for_each([&](const VarSet& u, const Unit&) {
        if (!u.empty() && !levels.contains(u)) throw ValidationError("no level for set " + u.to_string());
    });
}

template <class Payload>
void drop_zeros(SetStore<Payload>& ext) {
    for (std::size_t l = 0; l < ext.cardinality_bound(); ++l)
        for (const auto& [v, unused] : ext.entries(l)) {
            LevelCoeffs* c = ext.find(v);
            std::erase_if(*c, [](const auto& kv) { return kv.second == 0; });
        }
}

/// Walks U by increasing cardinality and calls fn(u, mask, v) for each subset v of u.
/// Every v is registered in `ext` (the empty set included) before fn sees it.
template <class Payload, class Fn>
void for_each_pair(const ActiveSet& a, SetStore<Payload>& ext, Fn&& fn) {
    a.store.for_each([&](const VarSet& u, const Unit&) {
        for_each_subset(u, [&](std::uint64_t mask, const VarSet& v) {
            Payload& p = ext.try_emplace(v).first;
            if (!v.empty()) fn(u, mask, v, p);
        });
    });
}

}  // namespace detail

inline SmolyakTables build_smolyak_tables(const ActiveSet& a, const LevelAssignment& levels) {
    detail::require_levels(a, levels);
    SmolyakTables t;
    t.c_empty = detail::empty_coefficient(a);
    detail::for_each_pair(a, t.ext, [&](const VarSet& u, std::uint64_t, const VarSet& v, LevelCoeffs& c) {
        c[levels.at(u)] += detail::parity_sign(u.size() - v.size());
    });
    detail::drop_zeros(t.ext);
    return t;
}

inline CombinationTables build_combination_tables(const ActiveSet& a, const LevelAssignment& levels) {
    detail::require_levels(a, levels);
    CombinationTables t;
    t.c_empty = detail::empty_coefficient(a);
    detail::for_each_pair(a, t.ext, [&](const VarSet& u, std::uint64_t, const VarSet& v, LevelCoeffs& c) {
        const int mu = levels.at(u);
        const int dv = static_cast<int>(v.size());
        for (int m = std::max(mu - dv + 1, 1); m <= mu; ++m) {
            const auto sign = detail::parity_sign(u.size() - v.size() + static_cast<std::size_t>(mu - m));
            c[m] += sign * binomial(dv - 1, mu - m);
        }
    });
    detail::drop_zeros(t.ext);
    return t;
}

inline QmcTables build_qmc_tables(const ActiveSet& a, const LevelAssignment& levels) {
    detail::require_levels(a, levels);
    QmcTables t;
    t.m_max = levels.m_max();
    t.c_empty = detail::empty_coefficient(a);
    const auto width = static_cast<std::size_t>(t.m_max) + 1;
    detail::for_each_pair(a, t.ext, [&](const VarSet& u, std::uint64_t mask, const VarSet& v, QmcPositions& ps) {
        const int mu = levels.at(u);
        const VarSet w = positions_from_mask(u.size(), mask);
        QmcPosition* p = ps.find(w);
        if (p == nullptr) {
            ps.positions.push_back(QmcPosition{w, std::vector<std::int64_t>(width, 0)});
            p = &ps.positions.back();
        }
        const std::int64_t inc = detail::parity_sign(u.size() - v.size()) * (std::int64_t{1} << (t.m_max - mu));
        for (int m = 0; m <= mu; ++m) detail::checked_add(p->c[static_cast<std::size_t>(m)], inc);
    });
    return t;
}

// Debug dumps: {"c_empty": ..., "sets": [{"v": [...], "c": {"m": coeff}}]}.

inline nlohmann::json to_json(const SetStore<LevelCoeffs>& ext, std::int64_t c_empty) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto* e : ext.ordered()) {
        nlohmann::json c = nlohmann::json::object();
        for (const auto& [m, coeff] : e->second) c[std::to_string(m)] = coeff;
        sets.push_back({{"v", e->first.vector()}, {"c", c}});
    }
    return {{"c_empty", c_empty}, {"sets", sets}};
}

inline nlohmann::json to_json(const SmolyakTables& t) { return to_json(t.ext, t.c_empty); }
inline nlohmann::json to_json(const CombinationTables& t) { return to_json(t.ext, t.c_empty); }

inline nlohmann::json to_json(const QmcTables& t) {
    nlohmann::json sets = nlohmann::json::array();
    for (const auto* e : t.ext.ordered()) {
        nlohmann::json positions = nlohmann::json::array();
        for (const auto& p : e->second.positions) {
            nlohmann::json c = nlohmann::json::object();
            for (std::size_t m = 0; m < p.c.size(); ++m)
                if (p.c[m] != 0) c[std::to_string(m)] = p.c[m];
            positions.push_back({{"w", p.w.vector()}, {"c", c}});
        }
        sets.push_back({{"v", e->first.vector()}, {"positions", positions}});
    }
    return {{"c_empty", t.c_empty}, {"m_max", t.m_max}, {"sets", sets}};
}

}  // namespace mdm
