#pragma once

// MDM engines. The efficient ones evaluate f(.v; 0) once per quadrature node
// of each subset v in U_ext and combine the results with the coefficient
// tables; the naive ones expand each f_u by the alternating subset sum at
// every node of A_u, which is the definition and serves as the oracle.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdm/active_set.hpp"
#include "mdm/coeff_tables.hpp"
#include "mdm/decomposition.hpp"
#include "mdm/error.hpp"
#include "mdm/lattice.hpp"
#include "mdm/parallel.hpp"
#include "mdm/smolyak.hpp"
#include "mdm/summation.hpp"

namespace mdm {

struct MdmReport {
    std::string method;
    double estimate = 0.0;
    std::optional<std::vector<double>> per_shift;
    std::optional<double> std_error;
    std::uint64_t eval_count = 0;
    double wall_time = 0.0;
    nlohmann::json config = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j = {{"method", method},
                            {"estimate", estimate},
                            {"eval_count", eval_count},
                            {"wall_time", wall_time},
                            {"config", config}};
        if (per_shift) j["per_shift"] = *per_shift;
        if (std_error) j["std_error"] = *std_error;
        return j;
    }
};

/// (mean, standard error) of r shift estimates; the error needs r >= 2.
inline std::pair<double, std::optional<double>> rqmc_summary(std::span<const double> values) {
    if (values.empty()) throw ValidationError("no shift estimates");
    const double r = static_cast<double>(values.size());
    CompensatedSum s;
    for (double v : values) s.add(v);
    const double mean = s.value() / r;
    if (values.size() < 2) return {mean, std::nullopt};
    CompensatedSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    return {mean, std::sqrt(sq.value() / (r * (r - 1.0)))};
}

namespace detail {

struct ItemResult {
    double value = 0.0;
    std::uint64_t evals = 0;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// f(0) counted once, plus the ordered sum of item values.
inline MdmReport finish(std::string method, const AnchoredIntegrand& f, std::int64_t c_empty,
                        const std::vector<ItemResult>& items, Clock::time_point t0) {
    CompensatedSum total;
    total.add(static_cast<double>(c_empty) * f(std::span<const Index>{}, std::span<const double>{}));
    std::uint64_t evals = 1;
    for (const auto& it : items) {
        total.add(it.value);
        evals += it.evals;
    }
    f.record_evals(evals - 1);
    MdmReport rep;
    rep.method = std::move(method);
    rep.estimate = total.value();
    rep.eval_count = evals;
    rep.wall_time = seconds_since(t0);
    return rep;
}

struct LevelItem {
    const VarSet* v;
    int m;
    std::int64_t c;
};

inline std::vector<LevelItem> level_items(const SetStore<LevelCoeffs>& ext) {
    std::vector<LevelItem> items;
    for (const auto* e : ext.ordered()) {
        if (e->first.empty()) continue;
        for (const auto& [m, c] : e->second)
            if (c != 0) items.push_back({&e->first, m, c});
    }
    return items;
}

template <class Tables>
MdmReport run_smolyak_tables(std::string method, const Tables& t, const SmolyakRule& rule, const AnchoredIntegrand& f,
                             SmolyakVariant variant, unsigned threads) {
    const auto t0 = Clock::now();
    const auto items = level_items(t.ext);
    auto results = parallel_map<ItemResult>(items.size(), threads, [&](std::size_t k) {
        const LevelItem& it = items[k];
        const SmolyakPlan& plan = rule.plan(it.v->size(), it.m, variant);
        std::uint64_t count = 0;
        const auto vi = it.v->indices();
        const double q = plan.apply([&](std::span<const double> x) {
            ++count;
            return f.eval_uncounted(vi, x);
        });
        return ItemResult{static_cast<double>(it.c) * q, count};
    });
    return finish(std::move(method), f, t.c_empty, results, t0);
}

/// Largest variable index in the sets of `ext`.
template <class Payload>
Index max_variable(const SetStore<Payload>& ext) {
    Index top = 0;
    ext.for_each([&](const VarSet& v, const Payload&) {
        if (!v.empty()) top = std::max(top, v.back());
    });
    return top;
}

inline void check_shift(std::span<const double> delta, Index tau_star) {
    if (delta.size() < tau_star) throw ValidationError("shift shorter than the largest active variable");
    for (double d : delta)
        if (!(d >= 0.0 && d < 1.0)) throw ValidationError("shift components must lie in [0,1)");
}

/// Point i restricted to positions w (1-based), shifted by the deltas of variables v.
inline void qmc_point(const LatticeSequence& seq, std::uint64_t i, std::span<const Index> w,
                      std::span<const Index> v, const Shift* shift, std::vector<double>& x) {
    const std::uint64_t r = seq.reversed(i);
    for (std::size_t k = 0; k < w.size(); ++k) {
        double t = seq.coordinate_from(r, w[k] - 1);
        if (shift != nullptr) t = frac(t + shift->delta[v[k] - 1]);
        x[k] = tent_translate(t);
    }
}

}  // namespace detail

/// c_empty f(0) + sum_{v,m} c(v,m) Q_{v,m}(f(.v; 0)).
inline MdmReport run_smolyak_direct(const SmolyakTables& t, const SmolyakRule& rule, const AnchoredIntegrand& f,
                                    unsigned threads = 1) {
    const auto variant =
        rule.family().nested() ? SmolyakVariant::NestedDirect : SmolyakVariant::NonNestedDirect;
    return detail::run_smolyak_tables("smolyak-direct", t, rule, f, variant, threads);
}

/// c_empty f(0) + sum_{v,m} c~(v,m) Q~_{v,m}(f(.v; 0)).
inline MdmReport run_smolyak_combination(const CombinationTables& t, const SmolyakRule& rule,
                                         const AnchoredIntegrand& f, unsigned threads = 1) {
    return detail::run_smolyak_tables("smolyak-ct", t, rule, f, SmolyakVariant::Combination, threads);
}

/// c_empty f(0) + sum_{v, w, m} c(v,w,m) S_{v,w,m}(f) / 2^m_max, where S sums
/// f(.v; 0) over the points 2^(m-1) <= i < 2^m (i = 0 for m = 0) read at positions w.
inline MdmReport run_qmc(const QmcTables& t, const LatticeSequence& seq, const AnchoredIntegrand& f,
                         const std::optional<Shift>& shift = std::nullopt, unsigned threads = 1) {
    const auto t0 = detail::Clock::now();
    if (t.m_max > seq.m_cap()) throw NumericError("lattice exhausted");
    const Shift* sh = shift ? &*shift : nullptr;
    if (sh != nullptr) detail::check_shift(sh->delta, detail::max_variable(t.ext));

    // One item per (v, m, class): positions whose projection keys agree mod 2^m
    // share the point set of block m, so their coefficients add and the block
    // is summed once. Classes whose coefficients cancel are skipped.
    struct Item {
        const VarSet* v;
        const VarSet* w;
        int m;
        std::int64_t c;
    };
    std::vector<Item> items;
    items.reserve(t.ext.size() * 4);
    std::vector<std::uint64_t> keys;  // row k: projection key of position k
    std::vector<std::size_t> reps;    // position of each class at the current m
    for (const auto* e : t.ext.ordered()) {
        if (e->first.empty()) continue;
        const auto& ps = e->second.positions;
        const std::size_t d = e->first.size();
        keys.clear();
        int top = 0;
        for (const auto& p : ps) {
            if (p.w.back() > seq.dimension()) throw ValidationError("generating vector exhausted");
            const auto key = projection_key(seq, p.w.indices());
            keys.insert(keys.end(), key.begin(), key.end());
            for (int m = t.m_max; m > top; --m)
                if (p.c[static_cast<std::size_t>(m)] != 0) {
                    top = m;
                    break;
                }
        }
        for (int m = 0; m <= top; ++m) {
            const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
            const std::size_t first = items.size();
            reps.clear();
            for (std::size_t k = 0; k < ps.size(); ++k) {
                const std::int64_t c = ps[k].c[static_cast<std::size_t>(m)];
                if (c == 0) continue;
                std::size_t cls = 0;
                for (; cls < reps.size(); ++cls) {
                    const std::size_t r = reps[cls];
                    std::size_t j = 0;
                    while (j < d && ((keys[r * d + j] ^ keys[k * d + j]) & mask) == 0) ++j;
                    if (j == d) break;
                }
                if (cls == reps.size()) {
                    reps.push_back(k);
                    items.push_back({&e->first, &ps[k].w, m, c});
                } else {
                    detail::checked_add(items[first + cls].c, c);
                }
            }
            items.erase(std::remove_if(items.begin() + static_cast<std::ptrdiff_t>(first), items.end(),
                                       [](const Item& it) { return it.c == 0; }),
                        items.end());
        }
    }
    const double scale = std::ldexp(1.0, -t.m_max);
    auto results = parallel_map<detail::ItemResult>(items.size(), threads, [&](std::size_t k) {
        const Item& it = items[k];
        const auto vi = it.v->indices();
        const auto wi = it.w->indices();
        std::vector<double> x(vi.size());
        const std::uint64_t lo = it.m == 0 ? 0 : std::uint64_t{1} << (it.m - 1);
        const std::uint64_t hi = std::uint64_t{1} << it.m;
        CompensatedSum s;
        for (std::uint64_t i = lo; i < hi; ++i) {
            detail::qmc_point(seq, i, wi, vi, sh, x);
            s.add(f.eval_uncounted(vi, x));
        }
        return detail::ItemResult{static_cast<double>(it.c) * s.value() * scale, hi - lo};
    });
    return detail::finish("qmc", f, t.c_empty, results, t0);
}

/// r independently shifted QMC runs; estimate = mean, std_error from the sample spread.
inline MdmReport run_rqmc(const QmcTables& t, const LatticeSequence& seq, const AnchoredIntegrand& f, int r,
                          std::uint64_t seed, unsigned threads = 1) {
    if (r < 1) throw ValidationError("number of shifts must be >= 1");
    const auto t0 = detail::Clock::now();
    const Index tau_star = detail::max_variable(t.ext);
    std::vector<double> per_shift;
    per_shift.reserve(static_cast<std::size_t>(r));
    std::uint64_t evals = 0;
    for (int q = 0; q < r; ++q) {
        const auto rep = run_qmc(t, seq, f, random_shift(seed, static_cast<std::uint64_t>(q), tau_star), threads);
        per_shift.push_back(rep.estimate);
        evals += rep.eval_count;
    }
    MdmReport rep;
    rep.method = "rqmc";
    std::tie(rep.estimate, rep.std_error) = rqmc_summary(per_shift);
    rep.per_shift = std::move(per_shift);
    rep.eval_count = evals;
    rep.wall_time = detail::seconds_since(t0);
    return rep;
}

enum class NaiveVariant { SmolyakDirect, SmolyakCombination, Qmc };

namespace detail {

/// f_u at x (coordinates of u in order), with the 2^|u| calls added to `count`.
inline double anchored_term_counted(const AnchoredIntegrand& f, std::span<const Index> u, std::span<const double> x,
                                    std::vector<Index>& v, std::vector<double>& xv, std::uint64_t& count) {
    if (u.size() > kMaxAnchoredTermCardinality) throw ValidationError("anchored term cardinality exceeds 30");
    CompensatedSum s;
    const std::uint64_t n = std::uint64_t{1} << u.size();
    for (std::uint64_t mask = 0; mask < n; ++mask) {
        v.clear();
        xv.clear();
        for (std::size_t k = 0; k < u.size(); ++k)
            if (mask >> k & 1U) {
                v.push_back(u[k]);
                xv.push_back(x[k]);
            }
        const double sign = (u.size() - v.size()) % 2 == 0 ? 1.0 : -1.0;
        s.add(sign * f.eval_uncounted(v, xv));
    }
    count += n;
    return s.value();
}

}  // namespace detail

/// sum_{u in U} A_u(f_u) with every f_u expanded at every node. For Qmc the
/// rule of u is the first 2^m_u lattice points on positions 1..|u|, shifted by
/// the deltas of the variables of u when a shift is given.
inline MdmReport run_naive(NaiveVariant variant, const ActiveSet& a, const LevelAssignment& levels,
                           const AnchoredIntegrand& f, const SmolyakRule* rule, const LatticeSequence* seq,
                           const std::optional<Shift>& shift = std::nullopt, unsigned threads = 1) {
    const auto t0 = detail::Clock::now();
    const bool qmc = variant == NaiveVariant::Qmc;
    if (qmc && seq == nullptr) throw ValidationError("naive QMC needs a lattice sequence");
    if (!qmc && rule == nullptr) throw ValidationError("naive Smolyak needs a rule family");
    const Shift* sh = shift ? &*shift : nullptr;
    if (sh != nullptr) detail::check_shift(sh->delta, detail::max_variable(a.store));

    std::vector<const VarSet*> sets;
    for (const auto* e : a.store.ordered())
        if (!e->first.empty()) sets.push_back(&e->first);

    auto results = parallel_map<detail::ItemResult>(sets.size(), threads, [&](std::size_t k) {
        const VarSet& u = *sets[k];
        const int m = levels.at(u);
        const auto ui = u.indices();
        std::uint64_t count = 0;
        std::vector<Index> v;
        std::vector<double> xv;
        auto fu = [&](std::span<const double> x) { return detail::anchored_term_counted(f, ui, x, v, xv, count); };
        double value = 0.0;
        if (variant == NaiveVariant::SmolyakDirect) {
            value = rule->direct(u.size(), m, fu);
        } else if (variant == NaiveVariant::SmolyakCombination) {
            value = rule->combination_assembly(u.size(), m, fu);
        } else {
            if (m > seq->m_cap()) throw NumericError("lattice exhausted");
            if (u.size() > seq->dimension()) throw ValidationError("generating vector exhausted");
            std::vector<Index> positions(u.size());
            for (std::size_t j = 0; j < u.size(); ++j) positions[j] = static_cast<Index>(j + 1);
            std::vector<double> x(u.size());
            CompensatedSum s;
            const std::uint64_t n = std::uint64_t{1} << m;
            for (std::uint64_t i = 0; i < n; ++i) {
                detail::qmc_point(*seq, i, positions, ui, sh, x);
                s.add(fu(x));
            }
            value = s.value() * std::ldexp(1.0, -m);
        }
        return detail::ItemResult{value, count};
    });

    const char* name = variant == NaiveVariant::SmolyakDirect        ? "naive-smolyak-direct"
                       : variant == NaiveVariant::SmolyakCombination ? "naive-smolyak-ct"
                                                                     : "naive-qmc";
    // A_empty(f_empty) = f(0)
    return detail::finish(name, f, 1, results, t0);
}

}  // namespace mdm
