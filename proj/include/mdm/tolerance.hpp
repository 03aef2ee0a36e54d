#pragma once

// Threshold T for the active set,
//
//     T = ( (eps/2) / S )^(alpha / (alpha - 1)),   S >= sum_u w(u)^(1/alpha),
//
// where S is a computable upper bound on the infinite sum and alpha is picked
// from a grid to make T as large as possible.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mdm/error.hpp"
#include "mdm/pod_weights.hpp"

namespace mdm {

struct ToleranceParams {
    double epsilon = 1e-1;
    int s = 1000;            // series truncation
    double t = 0.5;          // Hoelder split
    int alpha_grid_size = 100;

    void validate() const {
        if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
        if (s < 1) throw ValidationError("s must be >= 1");
        if (!(t > 0.0 && t < 1.0)) throw ValidationError("t must lie in (0,1)");
        if (alpha_grid_size < 2) throw ValidationError("alpha grid needs at least 2 points");
    }
};

struct AlphaSample {
    double alpha = 0.0;
    bool admissible = false;
    double log_sum_bound = std::numeric_limits<double>::infinity();
    double log_T = -std::numeric_limits<double>::infinity();
};

struct ToleranceResult {
    double epsilon = 0.0;
    double T = 0.0;
    double log_T = -std::numeric_limits<double>::infinity();
    double alpha_star = 0.0;
    double sum_bound = 0.0;
    std::vector<AlphaSample> per_alpha;
};

namespace detail {

inline double log_add(double a, double b) noexcept {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a == std::numeric_limits<double>::infinity() || b == std::numeric_limits<double>::infinity())
        return std::numeric_limits<double>::infinity();
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// ln of the tail term E_{s,t}; a in [0,1), where a = 0 is the limit a -> 0+.
inline double log_tail_bound(double a, double log_c, double z, int s, double t) {
    const double sd = static_cast<double>(s);
    double log_e = log_c + std::log1p(z / (sd + 1.0));

    // [ t^(s/a) / (1 - t^(1/a)) * (s + 1/(1 - t^(1/a))) ]^a
    if (a > 0.0) {
        const double x = std::exp(std::log(t) / a);
        log_e += a * ((sd / a) * std::log(t) - std::log1p(-x) + std::log(sd + 1.0 / (1.0 - x)));
    } else {
        log_e += sd * std::log(t);
    }

    // [ exp(Y) * min(1, Y^s / s!) ]^(1-a),  Y = (c z / t)^(1/(1-a))
    const double log_y = log_c + std::log(z) - std::log(t);
    const double log_big_y = log_y / (1.0 - a);
    if (log_big_y > 700.0) return std::numeric_limits<double>::infinity();
    const double big_y = std::exp(log_big_y);
    const double log_min = std::min(0.0, sd * log_big_y - std::lgamma(sd + 1.0));
    log_e += (1.0 - a) * (big_y + log_min);
    return log_e;
}

inline bool alpha_admissible(const PodWeights& p, double alpha) noexcept {
    return alpha >= 1.0 && alpha > p.b1() && alpha < p.b2();
}

}  // namespace detail

/// ln of the POD upper bound on sum_u w(u)^(1/alpha).
inline double log_sum_bound_pod(const PodWeights& p, double alpha, int s, double t) {
    if (!detail::alpha_admissible(p, alpha)) throw ValidationError("alpha out of range");
    if (s < 1) throw ValidationError("s must be >= 1");
    if (!(t > 0.0 && t < 1.0)) throw ValidationError("t must lie in (0,1)");

    const double a = p.b1() / alpha;
    const double b = p.b2() / alpha;
    const double log_c = std::log(p.c2()) / alpha;
    const double z = std::pow(2.0 / 3.0, b - 1.0) / (b - 1.0);
    const double log_z = std::log(z);

    // 1 + sum_{l=1}^{s} (l!)^a c^l z^(l-1) / (l-1)! (1 + z/l) + E_{s,t}
    double acc = 0.0;  // ln 1
    for (int l = 1; l <= s; ++l) {
        const double ld = static_cast<double>(l);
        const double term = a * std::lgamma(ld + 1.0) + ld * log_c + (ld - 1.0) * log_z - std::lgamma(ld) +
                            std::log1p(z / ld);
        acc = detail::log_add(acc, term);
    }
    acc = detail::log_add(acc, detail::log_tail_bound(a, log_c, z, s, t));
    return std::log(p.c1()) / alpha + acc;
}

inline double sum_bound_pod(const PodWeights& p, double alpha, int s, double t) {
    return std::exp(log_sum_bound_pod(p, alpha, s, t));
}

/// ln of the product-form bound (b1 = 0).
inline double log_sum_bound_product(const PodWeights& p, double alpha, int s) {
    if (p.b1() != 0.0) throw ValidationError("product-form bound needs b1 = 0");
    if (s < 1) throw ValidationError("s must be >= 1");
    const double b = p.b2() / alpha;
    if (!(alpha > 0.0) || !(b > 1.0)) throw ValidationError("alpha out of range");
    const double c = std::exp(std::log(p.c2()) / alpha);
    const double sd = static_cast<double>(s);
    double acc = c / ((b - 1.0) * std::pow(sd + 0.5, b - 1.0));
    for (int j = 1; j <= s; ++j) acc += std::log1p(c * std::pow(static_cast<double>(j), -b));
    return std::log(p.c1()) / alpha + acc;
}

inline double sum_bound_product(const PodWeights& p, double alpha, int s) {
    return std::exp(log_sum_bound_product(p, alpha, s));
}

/// T on the alpha grid lo + k (hi - lo)/grid, k = 1..grid, with (lo, hi) = (max(1, b1), b2).
/// The last grid point sits on hi and is never admissible. Ties go to the smaller alpha.
inline ToleranceResult compute_tolerance(const PodWeights& p, const ToleranceParams& tp) {
    tp.validate();
    const double lo = std::max(1.0, p.b1());
    const double hi = p.b2();
    const double step = (hi - lo) / tp.alpha_grid_size;
    const double log_half_eps = std::log(tp.epsilon / 2.0);

    ToleranceResult res;
    res.epsilon = tp.epsilon;
    res.per_alpha.reserve(static_cast<std::size_t>(tp.alpha_grid_size));
    bool found = false;
    for (int k = 1; k <= tp.alpha_grid_size; ++k) {
        AlphaSample sample;
        sample.alpha = lo + k * step;
        if (sample.alpha > lo && detail::alpha_admissible(p, sample.alpha)) {
            sample.admissible = true;
            sample.log_sum_bound = p.b1() == 0.0 ? log_sum_bound_product(p, sample.alpha, tp.s)
                                                 : log_sum_bound_pod(p, sample.alpha, tp.s, tp.t);
            if (std::isfinite(sample.log_sum_bound))
                sample.log_T = (log_half_eps - sample.log_sum_bound) * sample.alpha / (sample.alpha - 1.0);
            if (std::isfinite(sample.log_T) && (!found || sample.log_T > res.log_T)) {
                found = true;
                res.log_T = sample.log_T;
                res.alpha_star = sample.alpha;
                res.sum_bound = std::exp(sample.log_sum_bound);
            }
        }
        res.per_alpha.push_back(sample);
    }
    if (!found) throw NumericError("no admissible alpha");
    res.T = std::exp(res.log_T);
    return res;
}

}  // namespace mdm
