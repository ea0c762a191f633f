#pragma once

// Stochastic clique sampling for the fully connected pixel graph.
//
// Every pixel is a candidate partner of every other pixel (optionally
// truncated to a radius R). A candidate pair (i, j) becomes an active clique
// according to the product of a spatial affinity P^s and a data affinity Q^d
// compared against the sparsity factor gamma:
//
//   threshold mode:   active iff P^s * Q^d >= gamma
//   stochastic mode:  active iff U_ij * gamma <= P^s * Q^d,  U_ij ~ U(0,1)
//
// U_ij comes from a counter-based hash of (seed, iteration, min(i,j), max(i,j)),
// so a draw does not depend on enumeration order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grid.hpp"

namespace cdsfcrf {

enum class SamplingMode { threshold, stochastic };

inline std::string to_string(SamplingMode m) { return m == SamplingMode::threshold ? "threshold" : "stochastic"; }

inline SamplingMode sampling_mode_from_string(const std::string& s) {
    if (s == "threshold" || s == "deterministic") return SamplingMode::threshold;
    if (s == "stochastic") return SamplingMode::stochastic;
    throw ParameterError("unknown clique sampling mode '" + s + "'");
}

struct CliqueSamplingConfig {
    double gamma = 0.5;   // sparsity factor
    double sigma_s = 1.5; // spatial scale, pixels
    double sigma_d = 0.05; // data scale, intensity units
    SamplingMode mode = SamplingMode::stochastic;
    // Candidate radius in pixels; 0 = every other pixel. Unset = ceil(6 sigma_s).
    std::optional<std::size_t> candidate_radius;
    std::uint64_t seed = 0;

    friend bool operator==(const CliqueSamplingConfig&, const CliqueSamplingConfig&) = default;
};

inline void validate(const CliqueSamplingConfig& c) {
    if (!(c.sigma_s > 0.0) || !std::isfinite(c.sigma_s)) throw ParameterError("clique sampling: sigma_s must be > 0");
    if (!(c.sigma_d > 0.0) || !std::isfinite(c.sigma_d)) throw ParameterError("clique sampling: sigma_d must be > 0");
    if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) throw ParameterError("clique sampling: gamma must be >= 0");
}

// P^s beyond 6 sigma_s is below 1.5e-8.
inline std::size_t effective_radius(const CliqueSamplingConfig& c) {
    return c.candidate_radius ? *c.candidate_radius : static_cast<std::size_t>(std::ceil(6.0 * c.sigma_s));
}

inline double spatial_affinity(std::size_t i, std::size_t j, double sigma_s, Dims dims) {
    if (i == j) throw DomainError("spatial_affinity: a node is not its own neighbor");
    if (i >= dims.size() || j >= dims.size()) throw DimensionError("spatial_affinity: node index out of range");
    if (!(sigma_s > 0.0)) throw ParameterError("spatial_affinity: sigma_s must be > 0");
    const double dr = static_cast<double>(i / dims.width) - static_cast<double>(j / dims.width);
    const double dc = static_cast<double>(i % dims.width) - static_cast<double>(j % dims.width);
    return std::exp(-(dr * dr + dc * dc) / (2.0 * sigma_s * sigma_s));
}

inline double data_affinity(double v_i, double v_j, double sigma_d) {
    if (!std::isfinite(v_i) || !std::isfinite(v_j)) throw DomainError("data_affinity: non-finite intensity");
    if (!(sigma_d > 0.0)) throw ParameterError("data_affinity: sigma_d must be > 0");
    const double d = v_i - v_j;
    return std::exp(-(d * d) / (2.0 * sigma_d * sigma_d));
}

// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform draw in (0, 1) keyed by the unordered pair {i, j}.
inline double pair_uniform(std::uint64_t seed, std::uint64_t iteration, std::uint64_t i, std::uint64_t j) noexcept {
    const std::uint64_t lo = std::min(i, j), hi = std::max(i, j);
    std::uint64_t x = mix64(seed);
    x = mix64(x ^ iteration);
    x = mix64(x ^ lo);
    x = mix64(x ^ hi);
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Undirected active-pair structure in compressed adjacency form. Each node's
// partner list is sorted ascending; every pair appears in both lists.
struct CliqueMetadata {
    std::uint64_t seed = 0;
    std::uint64_t iteration = 0;
    SamplingMode mode = SamplingMode::stochastic;
    double gamma = 0.0, sigma_s = 0.0, sigma_d = 0.0;
    std::size_t candidate_radius = 0;
};

class CliqueSet {
public:
    using Metadata = CliqueMetadata;

    CliqueSet() = default;

    // Builds from a list of pairs (i, j), i != j; each unordered pair once.
    CliqueSet(Dims dims, std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs, Metadata meta = {})
        : dims_(dims), meta_(meta), offsets_(dims.size() + 1, 0) {
        for (auto [i, j] : pairs) {
            if (i == j) throw DomainError("CliqueSet: self-clique");
            if (i >= dims.size() || j >= dims.size()) throw DimensionError("CliqueSet: node index out of range");
            ++offsets_[i + 1];
            ++offsets_[j + 1];
        }
        for (std::size_t k = 1; k < offsets_.size(); ++k) offsets_[k] += offsets_[k - 1];
        partners_.resize(offsets_.back());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (auto [i, j] : pairs) {
            partners_[fill[i]++] = j;
            partners_[fill[j]++] = i;
        }
        for (std::size_t k = 0; k < dims.size(); ++k) {
            std::sort(partners_.begin() + static_cast<std::ptrdiff_t>(offsets_[k]),
                      partners_.begin() + static_cast<std::ptrdiff_t>(offsets_[k + 1]));
        }
    }

    Dims dims() const noexcept { return dims_; }
    const Metadata& metadata() const noexcept { return meta_; }
    std::size_t num_nodes() const noexcept { return dims_.size(); }
    std::size_t num_pairs() const noexcept { return partners_.size() / 2; }

    std::span<const std::uint32_t> partners(std::size_t i) const {
        return std::span<const std::uint32_t>(partners_).subspan(offsets_[i], offsets_[i + 1] - offsets_[i]);
    }

    std::size_t degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }

    bool contains(std::size_t i, std::size_t j) const {
        if (i >= num_nodes() || j >= num_nodes()) return false;
        auto p = partners(i);
        return std::binary_search(p.begin(), p.end(), static_cast<std::uint32_t>(j));
    }

    // Visits each unordered pair once as (i, j) with i < j, in ascending order.
    template <typename F>
    void for_each_pair(F&& f) const {
        for (std::size_t i = 0; i < num_nodes(); ++i) {
            for (std::uint32_t j : partners(i)) {
                if (j > i) f(i, static_cast<std::size_t>(j));
            }
        }
    }

    // Debug dump: '#' header lines with generation metadata, then "i j" per pair.
    std::string dump() const {
        std::string out = "# width " + std::to_string(dims_.width) + " height " + std::to_string(dims_.height) + "\n";
        out += "# mode " + to_string(meta_.mode) + " seed " + std::to_string(meta_.seed) + " iteration " +
               std::to_string(meta_.iteration) + " radius " + std::to_string(meta_.candidate_radius) + "\n";
        for_each_pair([&](std::size_t i, std::size_t j) { out += std::to_string(i) + " " + std::to_string(j) + "\n"; });
        return out;
    }

private:
    Dims dims_;
    Metadata meta_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> partners_;
};

namespace detail {

struct PairOffset {
    long dr, dc;
    double spatial; // P^s at this offset
};

// Offsets (dr, dc) that map node i to a larger index j, within radius R
// (R = 0: unbounded).
inline std::vector<PairOffset> forward_offsets(Dims d, std::size_t radius, double sigma_s) {
    const long h = static_cast<long>(d.height), w = static_cast<long>(d.width);
    const long rr = radius == 0 ? std::max(h, w) : static_cast<long>(radius);
    const double r2 = static_cast<double>(radius) * static_cast<double>(radius);
    std::vector<PairOffset> out;
    for (long dr = 0; dr <= std::min(rr, h - 1); ++dr) {
        for (long dc = -std::min(rr, w - 1); dc <= std::min(rr, w - 1); ++dc) {
            if (dr == 0 && dc <= 0) continue;
            const double dist2 = static_cast<double>(dr * dr + dc * dc);
            if (radius != 0 && dist2 > r2) continue;
            out.push_back({dr, dc, std::exp(-dist2 / (2.0 * sigma_s * sigma_s))});
        }
    }
    return out;
}

// Calls visit(i, j, p) for every in-bounds candidate pair i < j with p = P^s * Q^d.
template <typename Visit>
void for_each_candidate(const Image& obs, const CliqueSamplingConfig& cfg, Visit&& visit) {
    const Dims d = obs.dims();
    const auto offsets = forward_offsets(d, effective_radius(cfg), cfg.sigma_s);
    const long h = static_cast<long>(d.height), w = static_cast<long>(d.width);
    const double inv_two_sd2 = 1.0 / (2.0 * cfg.sigma_d * cfg.sigma_d);
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r * w + c);
            const double vi = obs[i];
            for (const auto& o : offsets) {
                const long r2 = r + o.dr, c2 = c + o.dc;
                if (r2 >= h || c2 < 0 || c2 >= w) continue;
                const std::size_t j = static_cast<std::size_t>(r2 * w + c2);
                const double dv = vi - obs[j];
                visit(i, j, o.spatial * std::exp(-dv * dv * inv_two_sd2));
            }
        }
    }
}

} // namespace detail

// Samples with a caller-supplied uniform source u(i, j) in [0, 1]. Exposed so
// the stochastic rule can be checked against fixed draws.
template <typename Uniform>
CliqueSet sample_cliques_with(const Image& obs_spatial, const CliqueSamplingConfig& cfg, std::uint64_t iteration,
                              Uniform&& uniform) {
    validate(cfg);
    validate(obs_spatial, "sample_cliques observation");
    if (obs_spatial.size() > std::size_t{0xFFFFFFFFu}) throw DimensionError("sample_cliques: image too large");
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    const double gamma = cfg.gamma;
    detail::for_each_candidate(obs_spatial, cfg, [&](std::size_t i, std::size_t j, double p) {
        bool active;
        if (cfg.mode == SamplingMode::threshold) {
            active = p >= gamma;
        } else {
            // U < 1, so p >= gamma is always active; skip the draw.
            active = p >= gamma || uniform(i, j) * gamma <= p;
        }
        if (active) pairs.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    });
    CliqueMetadata meta{cfg.seed, iteration, cfg.mode, cfg.gamma, cfg.sigma_s, cfg.sigma_d, effective_radius(cfg)};
    return CliqueSet(obs_spatial.dims(), pairs, meta);
}

inline CliqueSet sample_cliques(const Image& obs_spatial, const CliqueSamplingConfig& cfg, std::uint64_t iteration = 0) {
    return sample_cliques_with(obs_spatial, cfg, iteration, [&](std::size_t i, std::size_t j) {
        return pair_uniform(cfg.seed, iteration, i, j);
    });
}

// Mean number of active partners per node: the expectation over draws in
// stochastic mode, the exact count in threshold mode.
inline double expected_degree(const CliqueSamplingConfig& cfg, const Image& obs_spatial) {
    validate(cfg);
    validate(obs_spatial, "expected_degree observation");
    double total = 0.0;
    detail::for_each_candidate(obs_spatial, cfg, [&](std::size_t, std::size_t, double p) {
        if (cfg.gamma == 0.0) {
            total += 1.0;
        } else if (cfg.mode == SamplingMode::threshold) {
            total += p >= cfg.gamma ? 1.0 : 0.0;
        } else {
            total += std::min(1.0, p / cfg.gamma);
        }
    });
    return 2.0 * total / static_cast<double>(obs_spatial.size());
}

} // namespace cdsfcrf
