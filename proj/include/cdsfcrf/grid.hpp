#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace cdsfcrf {

using Complex = std::complex<double>;

struct Dims {
    std::size_t width = 0;
    std::size_t height = 0;

    std::size_t size() const noexcept { return width * height; }
    bool empty() const noexcept { return width == 0 || height == 0; }
    friend bool operator==(const Dims&, const Dims&) = default;
};

inline std::string to_string(Dims d) {
    return std::to_string(d.width) + "x" + std::to_string(d.height);
}

inline void require_same_dims(Dims a, Dims b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": dimension mismatch " + to_string(a) + " vs " +
                             to_string(b));
    }
}

inline void require_non_empty(Dims d, const char* what) {
    if (d.empty()) throw DimensionError(std::string(what) + ": zero-sized grid");
}

// Row-major 2-D grid. Index (row, col) maps to row * width + col.
template <typename T>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    explicit Grid(Dims dims, T fill = T{}) : dims_(dims), data_(dims.size(), fill) {}

    Grid(Dims dims, std::vector<T> data) : dims_(dims), data_(std::move(data)) {
        if (data_.size() != dims_.size()) {
            throw DimensionError("grid data length " + std::to_string(data_.size()) +
                                 " does not match " + to_string(dims_));
        }
    }

    Dims dims() const noexcept { return dims_; }
    std::size_t width() const noexcept { return dims_.width; }
    std::size_t height() const noexcept { return dims_.height; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    T& at(std::size_t row, std::size_t col) { return data_[row * dims_.width + col]; }
    const T& at(std::size_t row, std::size_t col) const { return data_[row * dims_.width + col]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Dims dims_;
    std::vector<T> data_;
};

// Real intensities in the spatial domain.
using Image = Grid<double>;

// Complex coefficients, DC-centered: DC sits at (height/2, width/2).
using KSpace = Grid<Complex>;

// true = acquired bin. Stored as bytes to keep contiguous storage and spans.
using SamplingMask = Grid<std::uint8_t>;

inline bool all_finite(const Image& img) {
    return std::all_of(img.begin(), img.end(), [](double v) { return std::isfinite(v); });
}

inline bool all_finite(const KSpace& ks) {
    return std::all_of(ks.begin(), ks.end(), [](const Complex& c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

inline std::size_t kept_count(const SamplingMask& m) {
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](std::uint8_t v) { return v != 0; }));
}

inline void validate(const Image& img, const char* what = "image") {
    require_non_empty(img.dims(), what);
    if (!all_finite(img)) throw DomainError(std::string(what) + ": non-finite pixel");
}

inline void validate(const KSpace& ks, const char* what = "k-space") {
    require_non_empty(ks.dims(), what);
    if (!all_finite(ks)) throw DomainError(std::string(what) + ": non-finite coefficient");
}

inline void validate(const SamplingMask& m, const char* what = "mask") {
    require_non_empty(m.dims(), what);
    if (kept_count(m) == 0) throw ParameterError(std::string(what) + ": no bin kept");
}

} // namespace cdsfcrf
