#pragma once

// Extensible rank-1 lattice sequence in radical-inverse order:
//
//   t^(i)_j = frac( phi_2(i) z_j ),
//
// so that for every m <= m_cap the points i < 2^m are exactly {k z / 2^m : k < 2^m},
// and the points with 2^(m-1) <= i < 2^m are the ones new at level m.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mdm/error.hpp"

namespace mdm {

inline constexpr int kLatticeMaxPower = 25;

/// phi_2(i) 2^bits: the lowest `bits` bits of i in reverse order.
inline std::uint64_t bit_reverse(std::uint64_t i, int bits) noexcept {
    if (bits == 0) return 0;
    i = ((i >> 1) & 0x5555555555555555ULL) | ((i & 0x5555555555555555ULL) << 1);
    i = ((i >> 2) & 0x3333333333333333ULL) | ((i & 0x3333333333333333ULL) << 2);
    i = ((i >> 4) & 0x0F0F0F0F0F0F0F0FULL) | ((i & 0x0F0F0F0F0F0F0F0FULL) << 4);
    return __builtin_bswap64(i) >> (64 - bits);
}

class LatticeSequence {
public:
    explicit LatticeSequence(std::vector<std::uint64_t> z, int m_cap = kLatticeMaxPower)
        : z_(std::move(z)), m_cap_(m_cap) {
        if (m_cap < 0 || m_cap > 52) throw ValidationError("lattice m_cap must lie in [0, 52]");
        if (z_.empty()) throw ValidationError("generating vector is empty");
        for (auto zj : z_)
            if (zj == 0) throw ValidationError("generating vector components must be positive");
        mask_ = (std::uint64_t{1} << m_cap_) - 1;
        scale_ = std::ldexp(1.0, -m_cap_);
    }

    int m_cap() const noexcept { return m_cap_; }
    std::size_t dimension() const noexcept { return z_.size(); }
    const std::vector<std::uint64_t>& z() const noexcept { return z_; }

    /// Coordinate j (0-based) of point i, in [0,1). Exact in binary.
    double coordinate(std::uint64_t i, std::size_t j) const noexcept {
        const std::uint64_t r = bit_reverse(i, m_cap_);
        return static_cast<double>(((r * (z_[j] & mask_)) & mask_)) * scale_;
    }

    /// phi_2(i) 2^m_cap, shared by all coordinates of point i.
    std::uint64_t reversed(std::uint64_t i) const noexcept { return bit_reverse(i, m_cap_); }

    /// Coordinate j of the point whose reversed index is r.
    double coordinate_from(std::uint64_t r, std::size_t j) const noexcept {
        return static_cast<double>(((r * (z_[j] & mask_)) & mask_)) * scale_;
    }

    std::vector<double> point(std::uint64_t i, std::size_t d) const {
        check(i, d);
        std::vector<double> x(d);
        const std::uint64_t r = bit_reverse(i, m_cap_);
        for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(((r * (z_[j] & mask_)) & mask_)) * scale_;
        return x;
    }

    void check(std::uint64_t i, std::size_t d) const {
        if (i > mask_) throw ValidationError("lattice point index out of range");
        if (d > z_.size()) throw ValidationError("generating vector exhausted");
    }

private:
    std::vector<std::uint64_t> z_;
    int m_cap_;
    std::uint64_t mask_ = 0;
    double scale_ = 0.0;
};

/// Key of the projection of the sequence onto positions w (1-based). Equal keys
/// give equal point sets in every block [2^(m-1), 2^m): for odd z_{w_1} the
/// vector is scaled by its inverse mod 2^m_cap, which permutes the odd k in k z / 2^m.
inline std::vector<std::uint64_t> projection_key(const LatticeSequence& seq, std::span<const std::uint32_t> w) {
    seq.check(0, w.empty() ? 0 : w.back());
    const std::uint64_t mask = seq.m_cap() == 0 ? 0 : (~std::uint64_t{0} >> (64 - seq.m_cap()));
    std::vector<std::uint64_t> key(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) key[k] = seq.z()[w[k] - 1] & mask;
    if (!key.empty() && (key[0] & 1U) != 0) {
        std::uint64_t inv = key[0];  // Newton iteration for the inverse mod 2^64
        for (int it = 0; it < 6; ++it) inv *= 2 - key[0] * inv;
        for (auto& x : key) x = (x * inv) & mask;
    }
    return key;
}

inline std::vector<double> lattice_point(const LatticeSequence& seq, std::uint64_t i, std::size_t d) {
    return seq.point(i, d);
}

inline std::vector<std::uint64_t> default_generating_vector() {
    // Entries 17 and 18 are equal; kept as given.
    return {1,       756581,  694385,  178383,  437131,  945527,  62405,   1079809, 991997,  750785,
            187845,  1666795, 491701,  1092667, 1279469, 817683,  1946073, 1946073, 1530387, 686611};
}

/// The first d components of the default vector.
inline std::vector<std::uint64_t> default_generating_vector(std::size_t d) {
    auto z = default_generating_vector();
    if (d > z.size()) throw ValidationError("generating vector exhausted");
    z.resize(d);
    return z;
}

/// The default vector followed by odd components drawn from a fixed-seed
/// generator; only meant for long truncated reference runs.
inline std::vector<std::uint64_t> extended_generating_vector(std::size_t d, std::uint64_t seed = 20110801) {
    auto z = default_generating_vector();
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::uint64_t> pick(0, (std::uint64_t{1} << (kLatticeMaxPower - 1)) - 1);
    while (z.size() < d) z.push_back(2 * pick(gen) + 1);
    z.resize(d);
    return z;
}

/// One positive integer per line; blank lines and '#' comments are skipped.
inline std::vector<std::uint64_t> read_generating_vector(std::istream& is) {
    std::vector<std::uint64_t> z;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(line.substr(first), &used);
        } catch (const std::exception&) {
            throw ValidationError("bad generating vector line: " + line);
        }
        if (line.find_first_not_of(" \t\r", first + used) != std::string::npos || v == 0)
            throw ValidationError("bad generating vector line: " + line);
        z.push_back(v);
    }
    if (z.empty()) throw ValidationError("generating vector file is empty");
    return z;
}

/// x -> 1 - |2x - 1| - 1/2, mapping [0,1] onto [-1/2, 1/2].
inline double tent_translate(double x) noexcept { return 0.5 - std::abs(2.0 * x - 1.0); }

inline std::vector<double> tent_translate(std::span<const double> x) {
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = tent_translate(x[k]);
    return y;
}

inline double frac(double x) noexcept { return x - std::floor(x); }

/// Random shift indexed by variable: delta[j-1] shifts variable j.
struct Shift {
    std::vector<double> delta;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Uniform [0,1) value for (seed, shift q, coordinate j); independent of call order.
inline double shift_component(std::uint64_t seed, std::uint64_t q, std::uint64_t j) noexcept {
    const std::uint64_t h = detail::splitmix64(detail::splitmix64(detail::splitmix64(seed) ^ q) ^ j);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline Shift random_shift(std::uint64_t seed, std::uint64_t q, std::size_t dims) {
    Shift s;
    s.delta.resize(dims);
    for (std::size_t j = 0; j < dims; ++j) s.delta[j] = shift_component(seed, q, j);
    return s;
}

/// tent_translate(frac(t^(i) + delta)) over the first delta.size() coordinates.
inline std::vector<double> shifted_point(const LatticeSequence& seq, std::uint64_t i, std::span<const double> delta) {
    auto x = seq.point(i, delta.size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = tent_translate(frac(x[j] + delta[j]));
    return x;
}

}  // namespace mdm
