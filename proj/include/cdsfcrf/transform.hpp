#pragma once

// Spatial <-> k-space transforms, radial undersampling masks and zero-filled
// reconstruction.
//
// Both directions use unitary scaling (1/sqrt(width*height)), so Parseval holds
// exactly and the k-space fidelity term has the same scale as the image. The
// spectrum is stored DC-centered: frequency (0,0) lives at (height/2, width/2).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "grid.hpp"

namespace cdsfcrf {

namespace detail {

// FFTW's planner is not thread-safe; executing an existing plan on new arrays
// is. Plans are built once per (width, height, direction) and kept for the
// process lifetime.
class FftPlanCache {
public:
    static FftPlanCache& instance() {
        static FftPlanCache cache;
        return cache;
    }

    fftw_plan get(Dims d, int sign) {
        const std::lock_guard<std::mutex> lock(mutex_);
        auto key = std::make_tuple(d.width, d.height, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        std::vector<Complex> in(d.size()), out(d.size());
        fftw_plan p = fftw_plan_dft_2d(static_cast<int>(d.height), static_cast<int>(d.width),
                                       reinterpret_cast<fftw_complex*>(in.data()),
                                       reinterpret_cast<fftw_complex*>(out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, p);
        return p;
    }

    FftPlanCache(const FftPlanCache&) = delete;
    FftPlanCache& operator=(const FftPlanCache&) = delete;

private:
    FftPlanCache() = default;
    ~FftPlanCache() {
        for (auto& [key, p] : plans_) fftw_destroy_plan(p);
    }

    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

// Unitary 2-D DFT on natural (DC at index 0) ordering.
inline std::vector<Complex> fft2(const std::vector<Complex>& in, Dims d, int sign) {
    std::vector<Complex> out(d.size());
    fftw_plan p = FftPlanCache::instance().get(d, sign);
    // fftw_execute_dft never writes to `in` for out-of-place complex plans.
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(d.size()));
    for (auto& v : out) v *= scale;
    return out;
}

// natural -> centered: value at natural index k moves to (k + n/2) mod n.
inline std::vector<Complex> fftshift(const std::vector<Complex>& in, Dims d) {
    std::vector<Complex> out(in.size());
    const std::size_t w = d.width, h = d.height;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rs = (r + h / 2) % h;
        for (std::size_t c = 0; c < w; ++c) out[rs * w + (c + w / 2) % w] = in[r * w + c];
    }
    return out;
}

inline std::vector<Complex> ifftshift(const std::vector<Complex>& in, Dims d) {
    std::vector<Complex> out(in.size());
    const std::size_t w = d.width, h = d.height;
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t rs = (r + h / 2) % h;
        for (std::size_t c = 0; c < w; ++c) out[r * w + c] = in[rs * w + (c + w / 2) % w];
    }
    return out;
}

} // namespace detail

inline KSpace dft2_forward(const Image& img) {
    require_non_empty(img.dims(), "dft2_forward");
    std::vector<Complex> buf(img.begin(), img.end());
    auto spectrum = detail::fft2(buf, img.dims(), FFTW_FORWARD);
    return KSpace(img.dims(), detail::fftshift(spectrum, img.dims()));
}

// Full complex inverse; the spatial result is not projected to real.
inline Grid<Complex> dft2_inverse_complex(const KSpace& ks) {
    require_non_empty(ks.dims(), "dft2_inverse");
    std::vector<Complex> natural = detail::ifftshift({ks.begin(), ks.end()}, ks.dims());
    return Grid<Complex>(ks.dims(), detail::fft2(natural, ks.dims(), FFTW_BACKWARD));
}

struct InverseResult {
    Image image;
    double max_imag = 0.0; // largest |Im| dropped by the real projection
};

inline InverseResult dft2_inverse_detailed(const KSpace& ks) {
    auto full = dft2_inverse_complex(ks);
    InverseResult out{Image(ks.dims()), 0.0};
    for (std::size_t i = 0; i < full.size(); ++i) {
        out.image[i] = full[i].real();
        out.max_imag = std::max(out.max_imag, std::abs(full[i].imag()));
    }
    return out;
}

inline Image dft2_inverse(const KSpace& ks) { return dft2_inverse_detailed(ks).image; }

// Index of the DC bin in centered layout.
inline std::size_t dc_row(Dims d) { return d.height / 2; }
inline std::size_t dc_col(Dims d) { return d.width / 2; }

// Radial pattern of `num_lines` lines through DC at angles k*pi/num_lines.
// Each line is walked along its major axis across the whole grid, keeping
// the nearest bin on the minor axis (Bresenham; halves round away from DC).
inline SamplingMask radial_mask(std::size_t width, std::size_t height, std::size_t num_lines) {
    if (num_lines < 1) throw ParameterError("radial_mask: num_lines must be >= 1");
    const Dims d{width, height};
    require_non_empty(d, "radial_mask");

    SamplingMask mask(d, 0);
    const auto cx = static_cast<long>(dc_col(d));
    const auto cy = static_cast<long>(dc_row(d));
    const long xmin = -cx, xmax = static_cast<long>(width) - 1 - cx;
    const long ymin = -cy, ymax = static_cast<long>(height) - 1 - cy;
    for (std::size_t k = 0; k < num_lines; ++k) {
        double cs, sn;
        if (k == 0) {
            cs = 1.0, sn = 0.0;
        } else if (2 * k == num_lines) {
            cs = 0.0, sn = 1.0;
        } else {
            const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(num_lines);
            cs = std::cos(theta), sn = std::sin(theta);
        }
        if (std::abs(cs) >= std::abs(sn)) {
            const double slope = sn / cs;
            for (long x = xmin; x <= xmax; ++x) {
                const long y = std::lround(slope * static_cast<double>(x));
                if (y >= ymin && y <= ymax) mask.at(static_cast<std::size_t>(y + cy), static_cast<std::size_t>(x + cx)) = 1;
            }
        } else {
            const double slope = cs / sn;
            for (long y = ymin; y <= ymax; ++y) {
                const long x = std::lround(slope * static_cast<double>(y));
                if (x >= xmin && x <= xmax) mask.at(static_cast<std::size_t>(y + cy), static_cast<std::size_t>(x + cx)) = 1;
            }
        }
    }
    mask.at(dc_row(d), dc_col(d)) = 1;
    return mask;
}

inline double sampling_ratio(const SamplingMask& m) {
    validate(m, "sampling_ratio");
    return static_cast<double>(kept_count(m)) / static_cast<double>(m.size());
}

// Smallest line count whose radial mask reaches `target_ratio`.
inline std::size_t lines_for_ratio(std::size_t width, std::size_t height, double target_ratio) {
    if (!(target_ratio > 0.0) || target_ratio > 1.0) {
        throw ParameterError("lines_for_ratio: target ratio must be in (0, 1]");
    }
    const std::size_t cap = 8 * std::max(width, height) + 8;
    for (std::size_t lines = 1; lines <= cap; ++lines) {
        if (sampling_ratio(radial_mask(width, height, lines)) >= target_ratio) return lines;
    }
    throw ParameterError("lines_for_ratio: ratio " + std::to_string(target_ratio) + " unreachable on " +
                         to_string(Dims{width, height}));
}

inline KSpace apply_mask(const KSpace& ks, const SamplingMask& m) {
    require_same_dims(ks.dims(), m.dims(), "apply_mask");
    KSpace out(ks.dims());
    for (std::size_t i = 0; i < ks.size(); ++i) out[i] = m[i] ? ks[i] : Complex{0.0, 0.0};
    return out;
}

// Inverse transform of a spectrum whose unsampled bins are zero.
inline Image zero_filled_recon(const KSpace& ks_masked) { return dft2_inverse(ks_masked); }

} // namespace cdsfcrf
