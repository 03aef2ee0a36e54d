#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <unordered_set>

#include "mdm/setkit.hpp"

namespace {

using mdm::Index;
using mdm::VarSet;

TEST(VarSet, RejectsUnsortedOrNonPositive) {
    EXPECT_THROW(VarSet({2, 1}), mdm::ValidationError);
    EXPECT_THROW(VarSet({1, 1}), mdm::ValidationError);
    EXPECT_THROW(VarSet({0, 3}), mdm::ValidationError);
    EXPECT_NO_THROW(VarSet({1, 5, 7}));
}

TEST(VarSet, BasicQueries) {
    const VarSet u{1, 5, 7};
    EXPECT_EQ(u.size(), 3U);
    EXPECT_TRUE(u.contains(5));
    EXPECT_FALSE(u.contains(6));
    EXPECT_TRUE(u.includes(VarSet{1, 7}));
    EXPECT_FALSE(u.includes(VarSet{1, 6}));
    EXPECT_TRUE(u.includes(VarSet{}));
    EXPECT_EQ(VarSet::prefix(3), (VarSet{1, 2, 3}));
    EXPECT_TRUE(VarSet{}.empty());
    EXPECT_EQ(u.to_string(), "(1,5,7)");
}

TEST(Subsets, EmptySetHasOneSubset) {
    const auto s = mdm::subsets_of(VarSet{});
    ASSERT_EQ(s.size(), 1U);
    EXPECT_TRUE(s[0].empty());
}

TEST(Subsets, Singleton) {
    const auto s = mdm::subsets_of(VarSet{3});
    ASSERT_EQ(s.size(), 2U);
    EXPECT_EQ(s[0], VarSet{});
    EXPECT_EQ(s[1], VarSet{3});
}

TEST(Subsets, ThreeElementsMatchBitmaskOracle) {
    const VarSet u{1, 5, 7};
    const auto s = mdm::subsets_of(u);
    ASSERT_EQ(s.size(), 8U);
    for (std::uint64_t mask = 0; mask < 8; ++mask) {
        std::vector<Index> expect;
        for (std::size_t k = 0; k < 3; ++k)
            if (mask >> k & 1U) expect.push_back(u[k]);
        EXPECT_EQ(s[mask].vector(), expect);
    }
    EXPECT_NE(std::find(s.begin(), s.end(), VarSet{1, 7}), s.end());
    EXPECT_NE(std::find(s.begin(), s.end(), VarSet{5}), s.end());
}

TEST(Subsets, CountAndUniquenessUpToTen) {
    for (std::size_t n = 0; n <= 10; ++n) {
        std::vector<Index> idx;
        for (std::size_t k = 0; k < n; ++k) idx.push_back(static_cast<Index>(3 * k + 2));
        const VarSet u(idx);
        const auto s = mdm::subsets_of(u);
        std::unordered_set<VarSet, mdm::VarSetHash> distinct(s.begin(), s.end());
        EXPECT_EQ(s.size(), std::size_t{1} << n);
        EXPECT_EQ(distinct.size(), s.size());
        for (const auto& v : s) EXPECT_TRUE(u.includes(v));
    }
}

TEST(Subsets, TooLargeSetIsRejected) {
    std::vector<Index> idx(65);
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<Index>(k + 1);
    try {
        mdm::subsets_of(VarSet(idx));
        FAIL() << "expected an error";
    } catch (const mdm::ValidationError& e) {
        EXPECT_STREQ(e.what(), "set too large for subset enumeration");
    }
}

TEST(PositionMap, Examples) {
    EXPECT_EQ(mdm::position_map(VarSet{1, 5, 7}, VarSet{1, 7}), (VarSet{1, 3}));
    EXPECT_EQ(mdm::position_map(VarSet{2, 4}, VarSet{2, 4}), (VarSet{1, 2}));
    EXPECT_EQ(mdm::position_map(VarSet{1, 4, 7, 13}, VarSet{1, 7}), (VarSet{1, 3}));
    EXPECT_EQ(mdm::position_map(VarSet{1, 4}, VarSet{}), VarSet{});
}

TEST(PositionMap, RejectsNonSubset) {
    try {
        mdm::position_map(VarSet{1, 5}, VarSet{2});
        FAIL() << "expected an error";
    } catch (const mdm::ValidationError& e) {
        EXPECT_STREQ(e.what(), "not a subset");
    }
}

TEST(PositionMap, RecoversSubsetElements) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::set<Index> s;
        while (s.size() < 8) s.insert(static_cast<Index>(gen() % 100 + 1));
        const VarSet u(std::vector<Index>(s.begin(), s.end()));
        const auto mask = gen() & 0xFFU;
        const VarSet v = mdm::subset_from_mask(u, mask);
        const VarSet w = mdm::position_map(u, v);
        ASSERT_EQ(w.size(), v.size());
        for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(u[w[k] - 1], v[k]);
        EXPECT_EQ(w, mdm::positions_from_mask(u.size(), mask));
    }
}

TEST(ProjectPoint, Examples) {
    const std::vector<double> t{0.1, 0.2, 0.3, 0.4};
    EXPECT_EQ(mdm::project_point(t, VarSet{2, 4}), (std::vector<double>{0.2, 0.4}));
    EXPECT_EQ(mdm::project_point(std::vector<double>{1.5, 2.5, 3.5}, VarSet{1, 3}),
              (std::vector<double>{1.5, 3.5}));
    EXPECT_EQ(mdm::project_point(std::vector<double>{9.0}, VarSet{1}), (std::vector<double>{9.0}));
    EXPECT_THROW(mdm::project_point(t, VarSet{5}), mdm::ValidationError);
}

TEST(SetStore, RoundTripsRandomBatch) {
    std::mt19937_64 gen(11);
    mdm::SetStore<std::uint64_t> store;
    std::vector<std::pair<VarSet, std::uint64_t>> inserted;
    std::unordered_set<VarSet, mdm::VarSetHash> seen;
    while (inserted.size() < 100000) {
        std::set<Index> s;
        const auto card = gen() % 6;
        while (s.size() < card) s.insert(static_cast<Index>(gen() % 5000 + 1));
        VarSet v(std::vector<Index>(s.begin(), s.end()));
        if (!seen.insert(v).second) continue;
        const auto payload = gen();
        store.insert(v, payload);
        inserted.emplace_back(std::move(v), payload);
    }
    EXPECT_EQ(store.size(), inserted.size());
    for (const auto& [v, p] : inserted) {
        const auto* found = store.find(v);
        ASSERT_NE(found, nullptr);
        EXPECT_EQ(*found, p);
    }
    EXPECT_FALSE(store.contains(VarSet{1, 2, 3, 4, 5, 6, 7}));
    std::size_t by_card = 0;
    for (std::size_t l = 0; l < store.cardinality_bound(); ++l) {
        for (const auto& e : store.entries(l)) EXPECT_EQ(e.first.size(), l);
        by_card += store.size(l);
    }
    EXPECT_EQ(by_card, store.size());
}

TEST(SetStore, ReferencesSurviveLaterInsertions) {
    mdm::SetStore<int> store;
    int& first = store.try_emplace(VarSet{4, 9}).first;
    first = 17;
    for (Index j = 1; j < 3000; ++j) {
        store.try_emplace(VarSet{j});
        store.try_emplace(VarSet{j, j + 1, j + 2, j + 3, j + 4, j + 5});
    }
    EXPECT_EQ(first, 17);
    EXPECT_EQ(&first, store.find(VarSet{4, 9}));
}

TEST(SetStore, TryEmplaceReportsInsertion) {
    mdm::SetStore<int> store;
    auto [a, fresh] = store.try_emplace(VarSet{2});
    EXPECT_TRUE(fresh);
    a = 5;
    auto [b, again] = store.try_emplace(VarSet{2});
    EXPECT_FALSE(again);
    EXPECT_EQ(b, 5);
}

TEST(SetStore, OrderedIsByCardinalityThenLexicographic) {
    mdm::SetStore<int> store;
    for (const VarSet& v : {VarSet{3, 4}, VarSet{2}, VarSet{}, VarSet{1, 9}, VarSet{1}, VarSet{1, 2, 3}})
        store.try_emplace(v);
    std::vector<VarSet> order;
    for (const auto* e : store.ordered()) order.push_back(e->first);
    const std::vector<VarSet> expect{VarSet{}, VarSet{1}, VarSet{2}, VarSet{1, 9}, VarSet{3, 4}, VarSet{1, 2, 3}};
    EXPECT_EQ(order, expect);
}

}  // namespace
