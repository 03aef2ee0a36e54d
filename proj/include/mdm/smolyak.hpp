#pragma once

// Smolyak quadrature on [-1/2, 1/2]^d built from a Rule1dFamily.
//
//   Q_{d,m}(g) = sum_{|i| <= d+m-1} (U_{i_1} - U_{i_1 - 1}) x ... x (U_{i_d} - U_{i_d - 1}) (g)
//
// Three evaluation forms are provided:
//   * nested direct:      each distinct node once, with combined weights
//                         w_{i,k} = sum_{q >= i, |q| <= d+m-1} prod_j (w_{q_j,k_j} - w_{q_j-1,k_j});
//   * non-nested direct:  every tensor node of every |i| <= d+m-1, weighted by
//                         prod_j w_{i_j,k_j} * sum_{p in {0,1}^d, |i+p| <= d+m-1} (-1)^|p|;
//   * combination:        plain tensor rules over |i| = d+m-1 (Q-tilde), which
//                         assemble into Q_{d,m} with signed binomial coefficients.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "mdm/error.hpp"
#include "mdm/quad1d.hpp"
#include "mdm/setkit.hpp"
#include "mdm/summation.hpp"

namespace mdm {

enum class SmolyakVariant { NestedDirect, NonNestedDirect, Combination };

inline const char* to_string(SmolyakVariant v) noexcept {
    switch (v) {
        case SmolyakVariant::NestedDirect: return "nested-direct";
        case SmolyakVariant::NonNestedDirect: return "non-nested-direct";
        case SmolyakVariant::Combination: return "combination";
    }
    return "?";
}

/// Calls fn(i) for every i in N^d (entries >= 1) with |i| <= budget, or
/// |i| == budget when `exact`, in lexicographic order.
template <class Fn>
void for_each_level_index(std::size_t d, long budget, bool exact, Fn&& fn) {
    if (d == 0) return;
    std::vector<int> idx(d, 1);
    const long min_total = static_cast<long>(d);
    if (budget < min_total) return;
    auto rec = [&](auto&& self, std::size_t j, long used) -> void {
        const long rest = static_cast<long>(d - j - 1);  // minimum the remaining coordinates need
        const long hi = budget - used - rest;
        if (j + 1 == d) {
            if (exact) {
                idx[j] = static_cast<int>(hi);
                fn(std::span<const int>(idx));
            } else {
                for (long i = 1; i <= hi; ++i) {
                    idx[j] = static_cast<int>(i);
                    fn(std::span<const int>(idx));
                }
            }
            return;
        }
        for (long i = 1; i <= hi; ++i) {
            idx[j] = static_cast<int>(i);
            self(self, j + 1, used + i);
        }
    };
    rec(rec, 0, 0);
}

inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Nodes of one coordinate of a tensor block, with per-node factors.
struct NodeList {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// A tensor grid nodes_1 x ... x nodes_d whose point weights are
/// coef * prod_j weights_j[k_j].
struct TensorBlock {
    double coef = 0.0;
    std::vector<const NodeList*> lists;
};

/// Sum over a tensor grid of w(k) g(t_k), in odometer order (last coordinate fastest).
template <class G>
double tensor_sum(std::span<const NodeList* const> lists, G&& g) {
    const std::size_t d = lists.size();
    for (const NodeList* l : lists)
        if (l->nodes.empty()) return 0.0;
    std::vector<std::size_t> k(d, 0);
    std::vector<double> x(d);
    std::vector<double> prefix(d + 1, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        x[j] = lists[j]->nodes[0];
        prefix[j + 1] = prefix[j] * lists[j]->weights[0];
    }
    CompensatedSum s;
    for (;;) {
        s.add(prefix[d] * g(std::span<const double>(x)));
        std::size_t j = d;
        while (j > 0) {
            --j;
            if (++k[j] < lists[j]->nodes.size()) break;
            k[j] = 0;
            if (j == 0) return s.value();
        }
        if (d == 0) return s.value();
        for (std::size_t jj = j; jj < d; ++jj) {
            x[jj] = lists[jj]->nodes[k[jj]];
            prefix[jj + 1] = prefix[jj] * lists[jj]->weights[k[jj]];
        }
    }
}

/// Precomputed evaluation recipe for one (d, m, variant).
class SmolyakPlan {
public:
    std::size_t dimension() const noexcept { return d_; }
    int level() const noexcept { return m_; }
    SmolyakVariant variant() const noexcept { return variant_; }
    const std::vector<TensorBlock>& blocks() const noexcept { return blocks_; }
    std::uint64_t point_count() const noexcept { return points_; }

    template <class G>
    double apply(G&& g) const {
        CompensatedSum total;
        // zero-coefficient blocks are still evaluated so the call count matches point_count()
        for (const auto& b : blocks_) {
            total.add(b.coef * tensor_sum(std::span<const NodeList* const>(b.lists), g));
        }
        return total.value();
    }

private:
    friend class SmolyakRule;

    std::size_t d_ = 0;
    int m_ = 0;
    SmolyakVariant variant_ = SmolyakVariant::NestedDirect;
    std::vector<TensorBlock> blocks_;
    std::deque<NodeList> storage_;
    std::uint64_t points_ = 0;
};

/// Smolyak rules over a 1-D family, with plans cached per (d, m, variant).
class SmolyakRule {
public:
    explicit SmolyakRule(Rule1dFamily fam) : fam_(std::move(fam)) {}

    const Rule1dFamily& family() const noexcept { return fam_; }

    const SmolyakPlan& plan(std::size_t d, int m, SmolyakVariant v) const {
        if (m < 1) throw ValidationError("Smolyak level m must be >= 1");
        if (d < 1) throw ValidationError("Smolyak dimension must be >= 1");
        if (v == SmolyakVariant::NestedDirect && !fam_.nested())
            throw ValidationError("nested Smolyak form needs a nested family");
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(d, m, v);
        auto it = plans_.find(key);
        if (it == plans_.end()) it = plans_.emplace(key, build(d, m, v)).first;
        return *it->second;
    }

    /// Q_{d,m}(g) in the direct form matching the family (nested or not).
    template <class G>
    double direct(std::size_t d, int m, G&& g) const {
        return plan(d, m, fam_.nested() ? SmolyakVariant::NestedDirect : SmolyakVariant::NonNestedDirect)
            .apply(g);
    }

    /// Q-tilde_{d,m}(g): the tensor rules with |i| = d+m-1, unweighted sum.
    template <class G>
    double combination(std::size_t d, int m, G&& g) const {
        return plan(d, m, SmolyakVariant::Combination).apply(g);
    }

    /// Q_{d,m}(g) = sum_{r = max(m-d+1,1)}^{m} (-1)^(m-r) binom(d-1, m-r) Q-tilde_{d,r}(g).
    template <class G>
    double combination_assembly(std::size_t d, int m, G&& g) const {
        CompensatedSum s;
        const int lo = std::max(m - static_cast<int>(d) + 1, 1);
        for (int r = lo; r <= m; ++r) {
            const auto c = binomial(static_cast<int>(d) - 1, m - r);
            const double sign = (m - r) % 2 == 0 ? 1.0 : -1.0;
            s.add(sign * static_cast<double>(c) * combination(d, r, g));
        }
        return s.value();
    }

    /// Number of g evaluations made by the given form.
    std::uint64_t count_evals(std::size_t d, int m, SmolyakVariant v) const {
        if (m < 1) throw ValidationError("Smolyak level m must be >= 1");
        if (d < 1) throw ValidationError("Smolyak dimension must be >= 1");
        const long budget = static_cast<long>(d) + m - 1;
        // one-dimensional counts per level 1..m
        std::vector<std::uint64_t> a(static_cast<std::size_t>(m) + 1, 0);
        for (int i = 1; i <= m; ++i) {
            const auto n = static_cast<std::uint64_t>(fam_.count(i));
            a[static_cast<std::size_t>(i)] =
                v == SmolyakVariant::NestedDirect ? n - static_cast<std::uint64_t>(fam_.count(i - 1)) : n;
        }
        // poly[t] = sum over index prefixes with |i| = t of prod a(i_j)
        std::vector<std::uint64_t> poly(static_cast<std::size_t>(budget) + 1, 0);
        poly[0] = 1;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<std::uint64_t> next(poly.size(), 0);
            for (std::size_t t = 0; t < poly.size(); ++t) {
                if (poly[t] == 0) continue;
                for (int i = 1; i <= m && t + static_cast<std::size_t>(i) < poly.size(); ++i) {
                    std::uint64_t prod = 0;
                    if (__builtin_mul_overflow(poly[t], a[static_cast<std::size_t>(i)], &prod) ||
                        __builtin_add_overflow(next[t + static_cast<std::size_t>(i)], prod,
                                               &next[t + static_cast<std::size_t>(i)]))
                        throw NumericError("evaluation count overflows 64 bits");
                }
            }
            poly = std::move(next);
        }
        if (v == SmolyakVariant::Combination) return poly[static_cast<std::size_t>(budget)];
        std::uint64_t total = 0;
        for (auto c : poly)
            if (__builtin_add_overflow(total, c, &total)) throw NumericError("evaluation count overflows 64 bits");
        return total;
    }

private:
    std::unique_ptr<SmolyakPlan> build(std::size_t d, int m, SmolyakVariant v) const {
        auto plan = std::make_unique<SmolyakPlan>();
        plan->d_ = d;
        plan->m_ = m;
        plan->variant_ = v;
        const long budget = static_cast<long>(d) + m - 1;

        if (v == SmolyakVariant::NestedDirect) {
            build_nested(*plan, d, m, budget);
            return plan;
        }

        // Full tensor lists per level, shared by all blocks.
        std::vector<const NodeList*> full(static_cast<std::size_t>(m) + 1, nullptr);
        for (int i = 1; i <= m; ++i) {
            const Rule1d& r = fam_.level(i);
            plan->storage_.push_back(NodeList{r.points, r.weights});
            full[static_cast<std::size_t>(i)] = &plan->storage_.back();
        }
        const bool exact = v == SmolyakVariant::Combination;
        for_each_level_index(d, budget, exact, [&](std::span<const int> idx) {
            TensorBlock b;
            long total = 0;
            std::uint64_t pts = 1;
            for (int i : idx) {
                b.lists.push_back(full[static_cast<std::size_t>(i)]);
                total += i;
                pts *= full[static_cast<std::size_t>(i)]->nodes.size();
            }
            if (exact) {
                b.coef = 1.0;
            } else {
                // sum_{r=0}^{min(d, budget-|i|)} (-1)^r binom(d, r)
                std::int64_t c = 0;
                const long top = std::min<long>(static_cast<long>(d), budget - total);
                for (long r = 0; r <= top; ++r)
                    c += (r % 2 == 0 ? 1 : -1) * binomial(static_cast<int>(d), static_cast<int>(r));
                b.coef = static_cast<double>(c);
            }
            plan->points_ += pts;
            plan->blocks_.push_back(std::move(b));
        });
        return plan;
    }

    struct NodeClass {
        std::vector<double> diffs;  // w_{q,k} - w_{q-1,k} for q = level..m
        const NodeList* list = nullptr;
    };

    void build_nested(SmolyakPlan& plan, std::size_t d, int m, long budget) const {
        // New nodes of each level, grouped by their difference sequences.
        std::vector<std::vector<NodeClass>> classes(static_cast<std::size_t>(m) + 1);
        for (int i = 1; i <= m; ++i) {
            const std::size_t k0 = fam_.count(i - 1);
            const std::size_t k1 = fam_.count(i);
            std::map<std::vector<double>, std::size_t> seen;
            std::vector<NodeList> lists;
            std::vector<std::vector<double>> keys;
            for (std::size_t k = k0; k < k1; ++k) {
                std::vector<double> diffs;
                diffs.reserve(static_cast<std::size_t>(m - i + 1));
                for (int q = i; q <= m; ++q) {
                    const Rule1d& cur = fam_.level(q);
                    const double wq = k < cur.size() ? cur.weights[k] : 0.0;
                    double wprev = 0.0;
                    if (q > i) {
                        const Rule1d& prev = fam_.level(q - 1);
                        wprev = k < prev.size() ? prev.weights[k] : 0.0;
                    }
                    diffs.push_back(wq - wprev);
                }
                auto [it, inserted] = seen.try_emplace(diffs, lists.size());
                if (inserted) {
                    lists.emplace_back();
                    keys.push_back(std::move(diffs));
                }
                lists[it->second].nodes.push_back(fam_.level(i).points[k]);
                lists[it->second].weights.push_back(1.0);
            }
            for (std::size_t c = 0; c < lists.size(); ++c) {
                plan.storage_.push_back(std::move(lists[c]));
                classes[static_cast<std::size_t>(i)].push_back(NodeClass{std::move(keys[c]), &plan.storage_.back()});
            }
        }

        for_each_level_index(d, budget, false, [&](std::span<const int> idx) {
            long total = 0;
            for (int i : idx) total += i;
            const auto excess = static_cast<std::size_t>(budget - total);
            // every combination of node classes across the coordinates
            std::vector<std::size_t> pick(d, 0);
            for (;;) {
                // W = sum_{e_1+...+e_d <= excess} prod_j diffs_j[e_j]
                std::vector<double> poly(excess + 1, 0.0);
                poly[0] = 1.0;
                std::uint64_t pts = 1;
                TensorBlock b;
                for (std::size_t j = 0; j < d; ++j) {
                    const NodeClass& nc = classes[static_cast<std::size_t>(idx[j])][pick[j]];
                    std::vector<double> next(excess + 1, 0.0);
                    for (std::size_t e = 0; e <= excess; ++e) {
                        if (poly[e] == 0.0) continue;
                        for (std::size_t f = 0; e + f <= excess && f < nc.diffs.size(); ++f)
                            next[e + f] += poly[e] * nc.diffs[f];
                    }
                    poly = std::move(next);
                    b.lists.push_back(nc.list);
                    pts *= nc.list->nodes.size();
                }
                CompensatedSum w;
                for (double p : poly) w.add(p);
                b.coef = w.value();
                plan.points_ += pts;
                plan.blocks_.push_back(std::move(b));

                std::size_t j = d;
                bool done = true;
                while (j > 0) {
                    --j;
                    if (++pick[j] < classes[static_cast<std::size_t>(idx[j])].size()) {
                        done = false;
                        break;
                    }
                    pick[j] = 0;
                }
                if (done) break;
            }
        });
    }

    Rule1dFamily fam_;
    mutable std::mutex mutex_;
    mutable std::map<std::tuple<std::size_t, int, SmolyakVariant>, std::unique_ptr<SmolyakPlan>> plans_;
};

// Free-function forms. Each builds a fresh rule; long-lived callers should
// hold a SmolyakRule to reuse its plans.

template <class G>
double smolyak_direct(const Rule1dFamily& fam, std::size_t d, int m, G&& g) {
    return SmolyakRule(fam).direct(d, m, g);
}

template <class G>
double smolyak_direct(const Rule1dFamily& fam, const VarSet& v, int m, G&& g) {
    return smolyak_direct(fam, v.size(), m, g);
}

template <class G>
double combination_rule(const Rule1dFamily& fam, const VarSet& v, int m, G&& g) {
    return SmolyakRule(fam).combination(v.size(), m, g);
}

inline std::uint64_t count_evals(const Rule1dFamily& fam, std::size_t d, int m, SmolyakVariant v) {
    return SmolyakRule(fam).count_evals(d, m, v);
}

/// (Q_{u,m} applied to g seen as a function of x_u, Q_{v,m}(g)) for a g of the v-coordinates.
template <class G>
std::pair<double, double> smolyak_projection_check(const Rule1dFamily& fam, const VarSet& u, const VarSet& v, int m,
                                                   G&& g) {
    if (v.empty()) throw ValidationError("projection check needs a nonempty v");
    const VarSet w = position_map(u, v);
    SmolyakRule rule(fam);
    std::vector<double> sub(v.size());
    const double big = rule.direct(u.size(), m, [&](std::span<const double> x) {
        for (std::size_t k = 0; k < w.size(); ++k) sub[k] = x[w[k] - 1];
        return g(std::span<const double>(sub));
    });
    const double small = rule.direct(v.size(), m, g);
    return {big, small};
}

}  // namespace mdm
