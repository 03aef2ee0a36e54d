#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "mdm/error.hpp"
#include "mdm/summation.hpp"

namespace mdm {

struct Rule1d {
    std::vector<double> points;
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }
};

/// A sequence of one-dimensional rules U_1, U_2, ...; U_0 is the zero rule.
///
/// Levels are generated on first use and cached; references returned by
/// level() stay valid for the lifetime of the family. Copies share the cache.
/// A nested family lists, at level i, the nodes of level i-1 first and in the
/// same order.
class Rule1dFamily {
public:
    using Generator = std::function<Rule1d(int level)>;

    Rule1dFamily(std::string name, bool nested, Generator gen)
        : state_(std::make_shared<State>(std::move(name), std::move(gen))), nested_(nested) {}

    const std::string& name() const noexcept { return state_->name; }
    bool nested() const noexcept { return nested_; }

    /// Same rules, but consumers treat them as not nested.
    Rule1dFamily as_non_nested() const {
        Rule1dFamily f = *this;
        f.nested_ = false;
        return f;
    }

    const Rule1d& level(int i) const {
        if (i < 1) throw ValidationError("rule level must be >= 1");
        std::lock_guard lock(state_->mutex);
        while (static_cast<int>(state_->levels.size()) < i) {
            const int next = static_cast<int>(state_->levels.size()) + 1;
            state_->levels.push_back(state_->gen(next));
        }
        return state_->levels[static_cast<std::size_t>(i - 1)];
    }

    /// n(i), with n(0) = 0.
    std::size_t count(int i) const { return i <= 0 ? 0 : level(i).size(); }

private:
    struct State {
        State(std::string n, Generator g) : name(std::move(n)), gen(std::move(g)) {}
        std::string name;
        Generator gen;
        std::mutex mutex;
        std::deque<Rule1d> levels;
    };

    std::shared_ptr<State> state_;
    bool nested_;
};

/// Node k (k >= 1) of the nested composite trapezoidal ordering 0, +1/2, -1/2, +1/4, -1/4, +1/8, ...
inline double trapezoidal_node(std::uint64_t k) noexcept {
    if (k == 0) return 0.0;
    if (k == 1) return 0.5;
    if (k == 2) return -0.5;
    if (k % 2 == 0) return -trapezoidal_node(k - 1);
    // k odd with 2^(p-1) < k < 2^p
    int p = 0;
    while ((std::uint64_t{1} << p) <= k) ++p;
    return static_cast<double>(k) / static_cast<double>(std::uint64_t{1} << p) - 0.5;
}

/// U_1 is the midpoint rule on [-1/2, 1/2]; for i >= 2, U_i is the composite
/// trapezoidal rule with 2^(i-1)+1 points at multiples of 2^(1-i).
inline Rule1dFamily trapezoidal_family() {
    return Rule1dFamily("trapezoidal", true, [](int i) {
        Rule1d r;
        if (i == 1) {
            r.points = {0.0};
            r.weights = {1.0};
            return r;
        }
        if (i > 62) throw NumericError("trapezoidal level too large");
        const std::uint64_t n = (std::uint64_t{1} << (i - 1)) + 1;
        const double interior = std::ldexp(1.0, -(i - 1));
        const double end = std::ldexp(1.0, -i);
        r.points.resize(n);
        r.weights.resize(n);
        for (std::uint64_t k = 0; k < n; ++k) {
            r.points[k] = trapezoidal_node(k);
            r.weights[k] = (k == 1 || k == 2) ? end : interior;
        }
        return r;
    });
}

/// U_i(g); U_0 is the zero rule.
template <class G>
double apply_rule(const Rule1dFamily& fam, int i, G&& g) {
    if (i < 0) throw ValidationError("rule level must be >= 0");
    if (i == 0) return 0.0;
    const Rule1d& r = fam.level(i);
    CompensatedSum s;
    for (std::size_t k = 0; k < r.size(); ++k) s.add(r.weights[k] * g(r.points[k]));
    return s.value();
}

}  // namespace mdm
