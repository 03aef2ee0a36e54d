#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "mdm/active_set.hpp"
#include "mdm/coeff_tables.hpp"
#include "mdm/decomposition.hpp"
#include "mdm/error.hpp"
#include "mdm/lattice.hpp"
#include "mdm/pod_weights.hpp"
#include "mdm/smolyak.hpp"

namespace mdm {

/// Riemann zeta for s > 1 by Euler-Maclaurin with cutoff N = 16.
inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw ValidationError("zeta needs s > 1");
    constexpr int N = 16;
    // B_{2k} / (2k)!
    constexpr std::array<double, 8> kB = {1.0 / 12.0,
                                          -1.0 / 720.0,
                                          1.0 / 30240.0,
                                          -1.0 / 1209600.0,
                                          1.0 / 47900160.0,
                                          -691.0 / 1307674368000.0,
                                          1.0 / 74724249600.0,
                                          -3617.0 / 10670622842880000.0};
    const double n = N;
    // correction terms, smallest first
    std::array<double, kB.size()> corr{};
    double rising = s;                 // s (s+1) ... (s+2k-2)
    double power = std::pow(n, -s - 1.0);  // N^(-s-2k+1)
    for (std::size_t k = 0; k < kB.size(); ++k) {
        corr[k] = kB[k] * rising * power;
        rising *= (s + 2.0 * static_cast<double>(k) + 1.0) * (s + 2.0 * static_cast<double>(k) + 2.0);
        power /= n * n;
    }
    CompensatedSum sum;
    for (std::size_t k = kB.size(); k-- > 0;) sum.add(corr[k]);
    sum.add(0.5 * std::pow(n, -s));
    sum.add(std::pow(n, 1.0 - s) / (s - 1.0));
    for (int j = N - 1; j >= 1; --j) sum.add(std::pow(static_cast<double>(j), -s));
    return sum.value();
}

/// f(x) = 1 / (1 + sum_j x_j / j^beta).
class TestIntegrand final : public AnchoredIntegrand {
public:
    explicit TestIntegrand(double beta) : beta_(beta) {
        if (!(beta > 1.0)) throw ValidationError("beta must exceed 1");
        scale_.resize(kTable);
        for (std::size_t j = 1; j < kTable; ++j) scale_[j] = std::pow(static_cast<double>(j), -beta);
    }

    double beta() const noexcept { return beta_; }

    double decay(Index j) const noexcept {
        return j < kTable ? scale_[j] : std::pow(static_cast<double>(j), -beta_);
    }

    double cost(std::size_t l) const override {
        return std::max(std::ldexp(static_cast<double>(l), static_cast<int>(std::min<std::size_t>(l, 1000))), 1.0);
    }

protected:
    double evaluate(std::span<const Index> v, std::span<const double> x) const override {
        double s = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) s += x[k] * decay(v[k]);
        return 1.0 / (1.0 + s);
    }

private:
    static constexpr std::size_t kTable = 65536;
    double beta_;
    std::vector<double> scale_;
};

/// Norm model of the test integrand:
///   C(l) = 12^(-l/2),  B(u) = (1 - zeta(beta)/2)^(-(|u|+1)) |u|! prod_{j in u} j^(-beta),
///   G = 1, q = 2, cost(l) = max(2^l l, 1).
class NormModel {
public:
    explicit NormModel(double beta) : beta_(beta) {
        if (!(beta > 1.0)) throw ValidationError("beta must exceed 1");
        zeta_ = riemann_zeta(beta);
        if (!(zeta_ < 2.0)) throw ValidationError("norm model needs zeta(beta) < 2");
        log_base_ = -std::log1p(-zeta_ / 2.0);
    }

    double beta() const noexcept { return beta_; }
    double zeta() const noexcept { return zeta_; }
    static constexpr double q() noexcept { return 2.0; }
    static constexpr double log_G() noexcept { return 0.0; }

    double log_C(std::size_t l) const noexcept { return -0.5 * static_cast<double>(l) * std::log(12.0); }

    double log_B(std::span<const Index> u) const noexcept {
        const double l = static_cast<double>(u.size());
        double s = (l + 1.0) * log_base_ + std::lgamma(l + 1.0);
        for (Index j : u) s -= beta_ * std::log(static_cast<double>(j));
        return s;
    }
    double log_B(const VarSet& u) const noexcept { return log_B(u.indices()); }

    double log_cost(std::size_t l) const noexcept {
        return l == 0 ? 0.0 : static_cast<double>(l) * std::log(2.0) + std::log(static_cast<double>(l));
    }

    /// POD weights with w(u) = C(|u|) B(u).
    PodWeights pod_weights() const {
        const double c1 = std::exp(log_base_);
        return PodWeights(c1, c1 / std::sqrt(12.0), 1.0, beta_);
    }

private:
    double beta_;
    double zeta_ = 0.0;
    double log_base_ = 0.0;
};

using PointBudget = std::unordered_map<VarSet, double, VarSetHash>;

/// h_u = ((2/eps) sum_{v in U} cost(|v|)^(q/(q+1)) (G B_v)^(1/(q+1)))^(1/q) (G B_u / cost(|u|))^(1/(q+1))
/// for every nonempty u in U. The sum runs over all of U, the empty set included.
inline PointBudget point_budget(const NormModel& nm, const ActiveSet& a, double epsilon) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (a.size() == 0) throw ValidationError("active set is empty");
    const double q = NormModel::q();
    const double e1 = q / (q + 1.0);
    const double e2 = 1.0 / (q + 1.0);

    std::vector<double> terms;
    terms.reserve(a.size());
    a.store.for_each([&](const VarSet& v, const Unit&) {
        terms.push_back(e1 * nm.log_cost(v.size()) + e2 * (NormModel::log_G() + nm.log_B(v)));
    });
    const double top = *std::max_element(terms.begin(), terms.end());
    CompensatedSum acc;
    for (double t : terms) acc.add(std::exp(t - top));
    const double log_sum = top + std::log(acc.value());
    const double log_lead = (std::log(2.0 / epsilon) + log_sum) / q;

    PointBudget h;
    h.reserve(a.size());
    a.store.for_each([&](const VarSet& u, const Unit&) {
        if (u.empty()) return;
        h[u] = std::exp(log_lead + e2 * (NormModel::log_G() + nm.log_B(u) - nm.log_cost(u.size())));
    });
    return h;
}

/// m_u = max(ceil(log2 h_u), 0), i.e. the smallest m >= 0 with 2^m >= h_u.
inline int qmc_level(double h) {
    if (!std::isfinite(h)) throw NumericError("point budget is not finite");
    if (h <= 1.0) return 0;
    int m = static_cast<int>(std::ceil(std::log2(h)));
    while (std::ldexp(1.0, m) < h) ++m;
    while (m > 0 && std::ldexp(1.0, m - 1) >= h) --m;
    return m;
}

inline LevelAssignment qmc_levels(const PointBudget& budget, int m_cap = kLatticeMaxPower) {
    LevelAssignment levels;
    for (const auto& [u, h] : budget) {
        const int m = qmc_level(h);
        if (m > m_cap) throw NumericError("lattice exhausted");
        levels.set(u, m);
    }
    return levels;
}

/// Smallest m >= 1 whose nested Smolyak rule in dimension d uses at least h points.
inline int smolyak_level(const SmolyakRule& rule, std::size_t d, double h) {
    if (!std::isfinite(h)) throw NumericError("point budget is not finite");
    int m = 1;
    while (static_cast<double>(rule.count_evals(d, m, SmolyakVariant::NestedDirect)) < h) ++m;
    return m;
}

inline LevelAssignment smolyak_levels(const PointBudget& budget, const SmolyakRule& rule) {
    LevelAssignment levels;
    // counts per dimension, grown on demand
    std::map<std::size_t, std::vector<double>> counts;
    for (const auto& [u, h] : budget) {
        auto& row = counts[u.size()];
        int m = 1;
        for (;; ++m) {
            if (static_cast<std::size_t>(m) > row.size())
                row.push_back(static_cast<double>(rule.count_evals(u.size(), m, SmolyakVariant::NestedDirect)));
            if (row[static_cast<std::size_t>(m - 1)] >= h) break;
        }
        levels.set(u, m);
    }
    return levels;
}

inline LevelAssignment smolyak_levels(const PointBudget& budget, const Rule1dFamily& fam) {
    return smolyak_levels(budget, SmolyakRule(fam));
}

}  // namespace mdm
