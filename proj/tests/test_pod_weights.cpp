#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "mdm/integrands.hpp"
#include "mdm/pod_weights.hpp"

namespace {

using mdm::PodWeights;
using mdm::VarSet;

const double kZeta3 = 1.2020569031595942;

PodWeights beta3() {
    const double c1 = 1.0 / (1.0 - kZeta3 / 2.0);
    return PodWeights(c1, c1 / std::sqrt(12.0), 1.0, 3.0);
}

TEST(PodWeights, RejectsBadParameters) {
    EXPECT_THROW(PodWeights(0.0, 1.0, 0.0, 2.0), mdm::ValidationError);
    EXPECT_THROW(PodWeights(1.0, -1.0, 0.0, 2.0), mdm::ValidationError);
    EXPECT_THROW(PodWeights(1.0, 1.0, -0.5, 2.0), mdm::ValidationError);
    EXPECT_THROW(PodWeights(1.0, 1.0, 0.0, 1.0), mdm::ValidationError);
    EXPECT_THROW(PodWeights(1.0, 1.0, 3.0, 2.0), mdm::ValidationError);
}

TEST(PodWeights, RejectsOrderGrowthBeyondProductDecay) {
    // Omega_{l+1} omega_{l+1} = 10 (l+1)^(2 - 1.5) grows past Omega_l
    EXPECT_THROW(PodWeights(1.0, 10.0, 2.0, 2.5), mdm::ValidationError);
}

TEST(PodWeights, EmptySetIsC1) {
    const auto p = beta3();
    EXPECT_DOUBLE_EQ(p.weight(VarSet{}), p.c1());
    EXPECT_DOUBLE_EQ(p.weight_log(VarSet{}), std::log(p.c1()));
}

TEST(PodWeights, Beta3Singletons) {
    const auto p = beta3();
    EXPECT_NEAR(p.c1(), 2.50644439173589, 1e-12);
    EXPECT_NEAR(p.weight(VarSet{1}), p.c1() * p.c2(), 1e-15);
    EXPECT_NEAR(p.weight_log(VarSet{1}), std::log(p.c1()) + std::log(p.c2()), 1e-15);
    EXPECT_NEAR(p.weight(VarSet{1, 2}) / (p.c1() * p.c2() * p.c2() / 4.0), 1.0, 1e-14);
}

TEST(PodWeights, LogAndDirectAgree) {
    const auto p = beta3();
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 500; ++trial) {
        std::set<mdm::Index> s;
        const auto card = gen() % 7;
        while (s.size() < card) s.insert(static_cast<mdm::Index>(gen() % 10000 + 1));
        const VarSet u(std::vector<mdm::Index>(s.begin(), s.end()));
        double direct = p.c1() * std::tgamma(static_cast<double>(u.size()) + 1.0);
        for (auto j : u) direct *= p.c2() * std::pow(static_cast<double>(j), -3.0);
        EXPECT_NEAR(std::exp(p.weight_log(u)) / direct, 1.0, 1e-13);
        EXPECT_NEAR(p.weight(u) / direct, 1.0, 1e-13);
    }
}

TEST(PodWeights, MonotoneInElements) {
    const auto p = beta3();
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::set<mdm::Index> s;
        const auto card = gen() % 5 + 1;
        while (s.size() < card) s.insert(static_cast<mdm::Index>(gen() % 200 + 1));
        std::vector<mdm::Index> u(s.begin(), s.end());
        std::vector<mdm::Index> v = u;
        // push elements up while keeping v strictly increasing and v_i >= u_i
        for (std::size_t k = v.size(); k-- > 0;) {
            const auto cap = k + 1 < v.size() ? v[k + 1] - 1 : v[k] + 50;
            v[k] += static_cast<mdm::Index>(gen() % (cap - v[k] + 1));
        }
        EXPECT_GE(p.weight(VarSet(u)), p.weight(VarSet(v)));
    }
}

TEST(PodWeights, PrefixMonotone) {
    const auto p = beta3();
    for (std::size_t l = 1; l <= 50; ++l)
        EXPECT_GE(p.weight_log(VarSet::prefix(l)), p.weight_log(VarSet::prefix(l + 1)));
}

TEST(PodWeights, ProductFactorNonIncreasing) {
    const auto p = beta3();
    for (mdm::Index j = 1; j < 6000; ++j) EXPECT_GE(p.log_product(j), p.log_product(j + 1));
}

TEST(PodWeights, MatchesNormModelWeights) {
    for (double beta : {2.5, 3.0, 4.0}) {
        const mdm::NormModel nm(beta);
        const auto p = nm.pod_weights();
        std::mt19937_64 gen(9);
        for (int trial = 0; trial < 200; ++trial) {
            std::set<mdm::Index> s;
            const auto card = gen() % 6;
            while (s.size() < card) s.insert(static_cast<mdm::Index>(gen() % 3000 + 1));
            const VarSet u(std::vector<mdm::Index>(s.begin(), s.end()));
            const double cb = nm.log_C(u.size()) + nm.log_B(u);
            EXPECT_NEAR(std::exp(cb - p.weight_log(u)), 1.0, 1e-12);
        }
    }
}

}  // namespace
