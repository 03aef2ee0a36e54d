#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mdm/error.hpp"
#include "mdm/setkit.hpp"

namespace mdm {

/// Product and order dependent weights
///
///     w(u) = Omega_{|u|} * prod_{j in u} omega_j,
///     Omega_l = c1 * (l!)^b1,   omega_j = c2 * j^(-b2).
///
/// Everything is evaluated in log space; weight() exponentiates at the end.
class PodWeights {
public:
    static constexpr int kMonotonicityHorizon = 200;

    PodWeights(double c1, double c2, double b1, double b2, int horizon = kMonotonicityHorizon)
        : c1_(c1), c2_(c2), b1_(b1), b2_(b2) {
        if (!(c1 > 0.0) || !(c2 > 0.0)) throw ValidationError("POD weights need c1 > 0 and c2 > 0");
        if (!(b1 >= 0.0)) throw ValidationError("POD weights need b1 >= 0");
        if (!(b2 > 1.0) || !(b2 > b1)) throw ValidationError("POD weights need b2 > 1 and b2 > b1");
        log_c1_ = std::log(c1);
        log_c2_ = std::log(c2);

        log_order_.resize(static_cast<std::size_t>(horizon) + 2);
        for (std::size_t l = 0; l < log_order_.size(); ++l)
            log_order_[l] = log_c1_ + b1_ * std::lgamma(static_cast<double>(l) + 1.0);
        log_product_.resize(kProductTable);
        for (std::size_t j = 1; j < kProductTable; ++j)
            log_product_[j] = log_c2_ - b2_ * std::log(static_cast<double>(j));

        // Omega_{l+1} omega_{l+1} <= Omega_l, checked up to the horizon.
        for (int l = 1; l <= horizon; ++l) {
            const double lhs = log_order(static_cast<std::size_t>(l) + 1) + log_product(static_cast<Index>(l + 1));
            const double rhs = log_order(static_cast<std::size_t>(l));
            if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs)))
                throw ValidationError("POD weights violate Omega_{l+1} omega_{l+1} <= Omega_l at l = " +
                                      std::to_string(l));
        }
    }

    double c1() const noexcept { return c1_; }
    double c2() const noexcept { return c2_; }
    double b1() const noexcept { return b1_; }
    double b2() const noexcept { return b2_; }

    /// ln Omega_l
    double log_order(std::size_t l) const noexcept {
        if (l < log_order_.size()) return log_order_[l];
        return log_c1_ + b1_ * std::lgamma(static_cast<double>(l) + 1.0);
    }

    /// ln omega_j
    double log_product(Index j) const noexcept {
        if (j < kProductTable) return log_product_[j];
        return log_c2_ - b2_ * std::log(static_cast<double>(j));
    }

    double weight_log(std::span<const Index> u) const noexcept {
        double s = log_order(u.size());
        for (Index j : u) s += log_product(j);
        return s;
    }

    double weight_log(const VarSet& u) const noexcept { return weight_log(u.indices()); }

    double weight(const VarSet& u) const noexcept { return std::exp(weight_log(u)); }

    /// w(u) > T, compared as ln w(u) > ln T.
    bool exceeds(std::span<const Index> u, double log_threshold) const noexcept {
        return weight_log(u) > log_threshold;
    }

private:
    static constexpr std::size_t kProductTable = 4096;

    double c1_, c2_, b1_, b2_;
    double log_c1_ = 0.0, log_c2_ = 0.0;
    std::vector<double> log_order_;
    std::vector<double> log_product_;
};

}  // namespace mdm
