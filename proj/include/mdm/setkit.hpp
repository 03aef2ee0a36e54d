#pragma once

// Finite subsets of the positive integers and the bookkeeping around them.
//
// A VarSet is stored as its strictly increasing vector of elements, so two
// sets are equal iff their vectors are equal. Every table in the library is
// keyed by VarSet.

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mdm/error.hpp"

namespace mdm {

using Index = std::uint32_t;

class VarSet {
public:
    VarSet() = default;

    explicit VarSet(std::vector<Index> indices) : idx_(std::move(indices)) { validate(); }

    VarSet(std::initializer_list<Index> indices) : idx_(indices) { validate(); }

    /// The set {1, ..., ell}.
    static VarSet prefix(std::size_t ell) {
        std::vector<Index> v(ell);
        for (std::size_t k = 0; k < ell; ++k) v[k] = static_cast<Index>(k + 1);
        return from_sorted(std::move(v));
    }

    /// Skips validation; the caller guarantees a strictly increasing, 1-based vector.
    static VarSet from_sorted(std::vector<Index> indices) noexcept {
        VarSet s;
        s.idx_ = std::move(indices);
        return s;
    }

    std::size_t size() const noexcept { return idx_.size(); }
    bool empty() const noexcept { return idx_.empty(); }
    Index operator[](std::size_t k) const noexcept { return idx_[k]; }
    Index back() const noexcept { return idx_.back(); }
    auto begin() const noexcept { return idx_.begin(); }
    auto end() const noexcept { return idx_.end(); }
    std::span<const Index> indices() const noexcept { return idx_; }
    const std::vector<Index>& vector() const noexcept { return idx_; }

    bool contains(Index j) const noexcept { return std::binary_search(idx_.begin(), idx_.end(), j); }

    bool includes(const VarSet& v) const noexcept {
        return std::includes(idx_.begin(), idx_.end(), v.idx_.begin(), v.idx_.end());
    }

    std::string to_string() const {
        std::string s = "(";
        for (std::size_t k = 0; k < idx_.size(); ++k) {
            if (k) s += ',';
            s += std::to_string(idx_[k]);
        }
        return s + ")";
    }

    friend bool operator==(const VarSet&, const VarSet&) = default;
    friend auto operator<=>(const VarSet& a, const VarSet& b) { return a.idx_ <=> b.idx_; }

private:
    void validate() const {
        for (std::size_t k = 0; k < idx_.size(); ++k) {
            if (idx_[k] < 1) throw ValidationError("set elements must be >= 1");
            if (k > 0 && idx_[k - 1] >= idx_[k])
                throw ValidationError("set elements must be strictly increasing");
        }
    }

    std::vector<Index> idx_;
};

/// Orders by cardinality first, then lexicographically.
struct CardinalityOrder {
    bool operator()(const VarSet& a, const VarSet& b) const noexcept {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

struct VarSetHash {
    std::size_t operator()(const VarSet& s) const noexcept {
        // FNV-1a over the raw elements.
        std::uint64_t h = 1469598103934665603ULL;
        for (Index j : s) {
            h ^= j;
            h *= 1099511628211ULL;
        }
        h ^= s.size();
        h *= 1099511628211ULL;
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

inline constexpr std::size_t kMaxSubsetCardinality = 64;

/// Subset of `u` selected by bit k of `mask` picking u[k].
inline VarSet subset_from_mask(const VarSet& u, std::uint64_t mask) {
    std::vector<Index> v;
    v.reserve(static_cast<std::size_t>(std::popcount(mask)));
    for (std::size_t k = 0; k < u.size(); ++k)
        if (mask >> k & 1U) v.push_back(u[k]);
    return VarSet::from_sorted(std::move(v));
}

/// Positions (1-based) of the bits of `mask`, i.e. u|v for v = subset_from_mask(u, mask).
inline VarSet positions_from_mask(std::size_t n, std::uint64_t mask) {
    std::vector<Index> w;
    w.reserve(static_cast<std::size_t>(std::popcount(mask)));
    for (std::size_t k = 0; k < n; ++k)
        if (mask >> k & 1U) w.push_back(static_cast<Index>(k + 1));
    return VarSet::from_sorted(std::move(w));
}

inline void check_enumerable(const VarSet& u) {
    if (u.size() > kMaxSubsetCardinality) throw ValidationError("set too large for subset enumeration");
}

/// Calls fn(mask, v) for every subset v of u, in increasing bitmask order.
template <class Fn>
void for_each_subset(const VarSet& u, Fn&& fn) {
    check_enumerable(u);
    const std::size_t n = u.size();
    // n == 64 would need 2^64 iterations; the loop below stops at the last mask.
    const std::uint64_t last = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    for (std::uint64_t mask = 0;; ++mask) {
        fn(mask, subset_from_mask(u, mask));
        if (mask == last) break;
    }
}

inline std::vector<VarSet> subsets_of(const VarSet& u) {
    check_enumerable(u);
    std::vector<VarSet> out;
    if (u.size() < 32) out.reserve(std::size_t{1} << u.size());
    for_each_subset(u, [&](std::uint64_t, VarSet v) { out.push_back(std::move(v)); });
    return out;
}

/// The position map u|v: where each element of v sits inside u (1-based).
inline VarSet position_map(const VarSet& u, const VarSet& v) {
    std::vector<Index> w;
    w.reserve(v.size());
    std::size_t k = 0;
    for (Index x : v) {
        while (k < u.size() && u[k] < x) ++k;
        if (k == u.size() || u[k] != x) throw ValidationError("not a subset");
        w.push_back(static_cast<Index>(k + 1));
        ++k;
    }
    return VarSet::from_sorted(std::move(w));
}

/// Picks the coordinates of `t` named by the 1-based positions in `w`.
inline std::vector<double> project_point(std::span<const double> t, const VarSet& w) {
    std::vector<double> out;
    out.reserve(w.size());
    for (Index j : w) {
        if (j > t.size()) throw ValidationError("position index out of range");
        out.push_back(t[j - 1]);
    }
    return out;
}

/// An array of hash tables, one per cardinality, mapping VarSet -> payload.
///
/// Entries keep their insertion order within a cardinality and references to
/// payloads stay valid across later insertions, so a builder may walk one
/// cardinality while inserting into lower ones.
template <class Payload>
class SetStore {
public:
    using Entry = std::pair<VarSet, Payload>;

    /// Returns the payload for `s` and whether it was newly inserted.
    std::pair<Payload&, bool> try_emplace(const VarSet& s) {
        auto& table = table_for(s.size());
        auto [it, inserted] = table.index.try_emplace(s, table.items.size());
        if (inserted) {
            table.items.emplace_back(s, Payload{});
            ++size_;
        }
        return {table.items[it->second].second, inserted};
    }

    Payload& insert(const VarSet& s, Payload p) {
        auto [ref, inserted] = try_emplace(s);
        ref = std::move(p);
        return ref;
    }

    const Payload* find(const VarSet& s) const {
        if (s.size() >= tables_.size()) return nullptr;
        const auto& table = tables_[s.size()];
        auto it = table.index.find(s);
        return it == table.index.end() ? nullptr : &table.items[it->second].second;
    }

    Payload* find(const VarSet& s) {
        return const_cast<Payload*>(static_cast<const SetStore&>(*this).find(s));
    }

    bool contains(const VarSet& s) const { return find(s) != nullptr; }

    std::size_t size() const noexcept { return size_; }

    std::size_t size(std::size_t cardinality) const noexcept {
        return cardinality < tables_.size() ? tables_[cardinality].items.size() : 0;
    }

    /// One past the largest cardinality that has a table (possibly empty).
    std::size_t cardinality_bound() const noexcept { return tables_.size(); }

    const std::deque<Entry>& entries(std::size_t cardinality) const {
        static const std::deque<Entry> kEmpty;
        return cardinality < tables_.size() ? tables_[cardinality].items : kEmpty;
    }

    /// Visits entries by increasing cardinality, insertion order within one.
    template <class Fn>
    void for_each(Fn&& fn) const {
        for (const auto& table : tables_)
            for (const auto& [s, p] : table.items) fn(s, p);
    }

    /// Keys sorted by cardinality, then lexicographically.
    std::vector<const Entry*> ordered() const {
        std::vector<const Entry*> out;
        out.reserve(size_);
        for (const auto& table : tables_) {
            const std::size_t first = out.size();
            for (const auto& e : table.items) out.push_back(&e);
            std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
                      [](const Entry* a, const Entry* b) { return a->first < b->first; });
        }
        return out;
    }

private:
    struct Table {
        std::unordered_map<VarSet, std::size_t, VarSetHash> index;
        std::deque<Entry> items;
    };

    Table& table_for(std::size_t cardinality) {
        if (cardinality >= tables_.size()) tables_.resize(cardinality + 1);
        return tables_[cardinality];
    }

    std::deque<Table> tables_;
    std::size_t size_ = 0;
};

}  // namespace mdm
