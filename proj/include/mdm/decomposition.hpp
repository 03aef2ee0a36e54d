#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mdm/error.hpp"
#include "mdm/setkit.hpp"
#include "mdm/summation.hpp"

namespace mdm {

/// f(x_v; 0): the integrand with the variables in v set to x and all others
/// at the anchor 0. Implementations must be reentrant.
class AnchoredIntegrand {
public:
    virtual ~AnchoredIntegrand() = default;

    /// Counted evaluation.
    double operator()(std::span<const Index> v, std::span<const double> x) const {
        evals_.fetch_add(1, std::memory_order_relaxed);
        return evaluate(v, x);
    }
    double operator()(const VarSet& v, std::span<const double> x) const { return (*this)(v.indices(), x); }

    /// Evaluation that the caller accounts for through record_evals().
    double eval_uncounted(std::span<const Index> v, std::span<const double> x) const { return evaluate(v, x); }

    void record_evals(std::uint64_t n) const noexcept { evals_.fetch_add(n, std::memory_order_relaxed); }
    std::uint64_t eval_count() const noexcept { return evals_.load(std::memory_order_relaxed); }
    void reset_count() noexcept { evals_.store(0, std::memory_order_relaxed); }

    /// Cost of one evaluation with l active variables.
    virtual double cost(std::size_t l) const {
        return std::max(std::ldexp(static_cast<double>(l), static_cast<int>(std::min<std::size_t>(l, 1000))), 1.0);
    }

protected:
    virtual double evaluate(std::span<const Index> v, std::span<const double> x) const = 0;

private:
    mutable std::atomic<std::uint64_t> evals_{0};
};

/// Adapts a callable double(span<const Index>, span<const double>).
class FunctionIntegrand final : public AnchoredIntegrand {
public:
    using Fn = std::function<double(std::span<const Index>, std::span<const double>)>;
    explicit FunctionIntegrand(Fn fn) : fn_(std::move(fn)) {}

protected:
    double evaluate(std::span<const Index> v, std::span<const double> x) const override { return fn_(v, x); }

private:
    Fn fn_;
};

inline constexpr std::size_t kMaxAnchoredTermCardinality = 30;

/// f_u(x_u) = sum_{v subset of u} (-1)^(|u|-|v|) f(x_v; 0); x holds the coordinates of u in order.
inline double anchored_term(const AnchoredIntegrand& f, const VarSet& u, std::span<const double> x) {
    if (u.size() > kMaxAnchoredTermCardinality) throw ValidationError("anchored term cardinality exceeds 30");
    if (x.size() != u.size()) throw ValidationError("point length must equal |u|");
    CompensatedSum s;
    std::vector<Index> v;
    std::vector<double> xv;
    v.reserve(u.size());
    xv.reserve(u.size());
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
        s.add(sign * f(std::span<const Index>(v), std::span<const double>(xv)));
    }
    return s.value();
}

}  // namespace mdm
