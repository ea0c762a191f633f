#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "grid.hpp"

namespace cdsfcrf {

inline constexpr double kPsnrExact = std::numeric_limits<double>::infinity();

// 10 log10(peak^2 / MSE); +infinity when the images are identical.
inline double psnr(const Image& truth, const Image& test, double peak = 1.0) {
    require_same_dims(truth.dims(), test.dims(), "psnr");
    require_non_empty(truth.dims(), "psnr");
    if (!(peak > 0.0)) throw ParameterError("psnr: peak must be > 0");
    double sse = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double d = test[i] - truth[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrExact;
    const double mse = sse / static_cast<double>(truth.size());
    return 10.0 * std::log10(peak * peak / mse);
}

// Mean SSIM over every fully contained window x window block (no padding).
// Uniform window, population moments, C1 = (0.01 peak)^2, C2 = (0.03 peak)^2.
inline double ssim(const Image& truth, const Image& test, std::size_t window = 7, double peak = 1.0) {
    require_same_dims(truth.dims(), test.dims(), "ssim");
    if (window < 3 || window % 2 == 0) throw ParameterError("ssim: window must be odd and >= 3");
    if (truth.width() < window || truth.height() < window) throw DimensionError("ssim: window larger than image");
    if (!(peak > 0.0)) throw ParameterError("ssim: peak must be > 0");

    const std::size_t w = truth.width(), h = truth.height();
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const double n = static_cast<double>(window * window);
    double total = 0.0;
    for (std::size_t r0 = 0; r0 + window <= h; ++r0) {
        for (std::size_t c0 = 0; c0 + window <= w; ++c0) {
            double mu_a = 0.0, mu_b = 0.0;
            for (std::size_t r = r0; r < r0 + window; ++r) {
                for (std::size_t c = c0; c < c0 + window; ++c) {
                    mu_a += truth.at(r, c);
                    mu_b += test.at(r, c);
                }
            }
            mu_a /= n;
            mu_b /= n;
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (std::size_t r = r0; r < r0 + window; ++r) {
                for (std::size_t c = c0; c < c0 + window; ++c) {
                    const double da = truth.at(r, c) - mu_a, db = test.at(r, c) - mu_b;
                    var_a += da * da;
                    var_b += db * db;
                    cov += da * db;
                }
            }
            var_a /= n;
            var_b /= n;
            cov /= n;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                     ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
    }
    return total / static_cast<double>((h - window + 1) * (w - window + 1));
}

// ||test - truth|| / ||truth||; not symmetric in its arguments.
inline double rel_l2(const Image& truth, const Image& test) {
    require_same_dims(truth.dims(), test.dims(), "rel_l2");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        num += (test[i] - truth[i]) * (test[i] - truth[i]);
        den += truth[i] * truth[i];
    }
    if (den == 0.0) throw DomainError("rel_l2: reference image has zero norm");
    return std::sqrt(num / den);
}

struct QualityReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double rel_l2 = 0.0;
    Dims dims;
};

inline QualityReport evaluate_quality(const Image& truth, const Image& test, double peak = 1.0,
                                      std::size_t window = 7) {
    return {psnr(truth, test, peak), ssim(truth, test, window, peak), rel_l2(truth, test), truth.dims()};
}

inline std::string format_metric(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// CSV schema: width,height,psnr,ssim,rel_l2 (psnr "inf" for identical images).
inline std::string quality_csv_header() { return "width,height,psnr,ssim,rel_l2"; }

inline std::string to_csv_row(const QualityReport& q) {
    return std::to_string(q.dims.width) + "," + std::to_string(q.dims.height) + "," + format_metric(q.psnr) + "," +
           format_metric(q.ssim) + "," + format_metric(q.rel_l2);
}

} // namespace cdsfcrf
