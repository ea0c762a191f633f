#pragma once

// Synthetic single-slice prostate phantom: elliptical gland in a background,
// three hypointense lesions and a central urethra.
//
// Geometry is in fractions: x-coordinates and the ellipse x semi-axis are
// fractions of width, y-coordinates and the y semi-axis fractions of height,
// disc radii fractions of min(width, height). Continuous coordinates run over
// [0, width] x [0, height] with pixel (r, c) covering [c, c+1) x [r, r+1).

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "grid.hpp"
#include "keyvalue.hpp"

namespace cdsfcrf {

struct EllipseShape {
    double cx = 0.5, cy = 0.5;
    double ax = 0.0, ay = 0.0; // semi-axes
    double intensity = 0.0;
    friend bool operator==(const EllipseShape&, const EllipseShape&) = default;
};

struct DiscShape {
    double cx = 0.5, cy = 0.5;
    double radius = 0.0;
    double intensity = 0.0;
    friend bool operator==(const DiscShape&, const DiscShape&) = default;
};

struct PhantomSpec {
    std::size_t width = 0, height = 0;
    double background = 0.0;
    std::optional<EllipseShape> prostate;
    std::vector<DiscShape> lesions;
    std::optional<DiscShape> urethra;
    std::uint64_t seed = 0;
    friend bool operator==(const PhantomSpec&, const PhantomSpec&) = default;
};

// Default material intensities.
inline constexpr double kBackgroundLevel = 0.15;
inline constexpr double kProstateLevel = 0.6;
inline constexpr double kLesionLevel = 0.35;
inline constexpr double kUrethraLevel = 0.1;

// Physical proportions of the reference phantom, in cm.
inline constexpr double kProstateMajorCm = 5.0;
inline constexpr double kProstateMinorCm = 4.5;
inline constexpr double kLesionMinDiameterCm = 0.5;
inline constexpr double kLesionMaxDiameterCm = 1.0;
inline constexpr double kUrethraDiameterCm = 0.7;
inline constexpr std::size_t kLesionCount = 3;
// Full prostate major axis as a fraction of image width.
inline constexpr double kProstateWidthFraction = 0.4;

namespace detail {

inline bool inside(const EllipseShape& e, double x, double y, std::size_t w, std::size_t h) {
    const double dx = (x - e.cx * static_cast<double>(w)) / (e.ax * static_cast<double>(w));
    const double dy = (y - e.cy * static_cast<double>(h)) / (e.ay * static_cast<double>(h));
    return dx * dx + dy * dy <= 1.0;
}

inline bool inside(const DiscShape& d, double x, double y, std::size_t w, std::size_t h) {
    const double m = static_cast<double>(std::min(w, h));
    const double dx = x - d.cx * static_cast<double>(w);
    const double dy = y - d.cy * static_cast<double>(h);
    const double r = d.radius * m;
    return dx * dx + dy * dy <= r * r;
}

inline double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

inline void check_level(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("phantom spec: " + what + " intensity outside [0,1]");
}

} // namespace detail

inline void validate(const PhantomSpec& s) {
    if (s.width == 0 || s.height == 0) throw ParameterError("phantom spec: zero-sized canvas");
    detail::check_level(s.background, "background");
    const double w = static_cast<double>(s.width), h = static_cast<double>(s.height);
    const double m = static_cast<double>(std::min(s.width, s.height));
    if (s.prostate) {
        const auto& e = *s.prostate;
        detail::check_level(e.intensity, "prostate");
        if (!(e.ax > 0.0 && e.ay > 0.0)) throw ParameterError("phantom spec: prostate semi-axes must be > 0");
        if (e.cx - e.ax < 0.0 || e.cx + e.ax > 1.0 || e.cy - e.ay < 0.0 || e.cy + e.ay > 1.0) {
            throw ParameterError("phantom spec: prostate extends outside the image");
        }
    }
    auto check_disc = [&](const DiscShape& d, const std::string& what) {
        detail::check_level(d.intensity, what);
        if (!(d.radius > 0.0)) throw ParameterError("phantom spec: " + what + " radius must be > 0");
        const double r = d.radius * m;
        if (d.cx * w - r < 0.0 || d.cx * w + r > w || d.cy * h - r < 0.0 || d.cy * h + r > h) {
            throw ParameterError("phantom spec: " + what + " extends outside the image");
        }
    };
    for (std::size_t i = 0; i < s.lesions.size(); ++i) check_disc(s.lesions[i], "lesion " + std::to_string(i));
    if (s.urethra) check_disc(*s.urethra, "urethra");
}

// Renders with 4x4 supersampling per pixel. Draw order: background, prostate,
// lesions, urethra; each later shape replaces what is under it.
inline Image generate_phantom(const PhantomSpec& spec) {
    validate(spec);
    constexpr int ss = 4;
    const std::size_t w = spec.width, h = spec.height;
    Image img(Dims{w, h});
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
            double acc = 0.0;
            for (int sy = 0; sy < ss; ++sy) {
                const double y = static_cast<double>(r) + (sy + 0.5) / ss;
                for (int sx = 0; sx < ss; ++sx) {
                    const double x = static_cast<double>(c) + (sx + 0.5) / ss;
                    double v = spec.background;
                    if (spec.prostate && detail::inside(*spec.prostate, x, y, w, h)) v = spec.prostate->intensity;
                    for (const auto& l : spec.lesions) {
                        if (detail::inside(l, x, y, w, h)) v = l.intensity;
                    }
                    if (spec.urethra && detail::inside(*spec.urethra, x, y, w, h)) v = spec.urethra->intensity;
                    acc += v;
                }
            }
            img.at(r, c) = acc / (ss * ss);
        }
    }
    return img;
}

// Default scene for a width x height canvas; lesion placement is drawn from `seed`.
inline PhantomSpec default_prostate_spec(std::size_t width, std::size_t height, std::uint64_t seed = 0) {
    if (width < 32 || height < 32) throw ParameterError("default_prostate_spec: canvas must be at least 32x32");
    const double w = static_cast<double>(width), h = static_cast<double>(height);
    const double m = static_cast<double>(std::min(width, height));
    const double px_per_cm = kProstateWidthFraction * w / kProstateMajorCm;

    PhantomSpec s;
    s.width = width;
    s.height = height;
    s.background = kBackgroundLevel;
    s.seed = seed;

    EllipseShape prostate;
    prostate.ax = 0.5 * kProstateMajorCm * px_per_cm / w;
    prostate.ay = 0.5 * kProstateMinorCm * px_per_cm / h;
    prostate.intensity = kProstateLevel;
    s.prostate = prostate;

    DiscShape urethra;
    urethra.radius = 0.5 * kUrethraDiameterCm * px_per_cm / m;
    urethra.intensity = kUrethraLevel;
    s.urethra = urethra;

    // Rejection-sample lesion centers so each disc (plus one pixel of margin)
    // lies inside the gland and clear of the urethra and the other lesions.
    std::mt19937_64 gen(seed);
    const double gx = prostate.cx * w, gy = prostate.cy * h;
    const double gax = prostate.ax * w, gay = prostate.ay * h;
    auto fits = [&](double x, double y, double r_px) {
        constexpr int probes = 72;
        for (int k = 0; k < probes; ++k) {
            const double t = 2.0 * std::numbers::pi * k / probes;
            const double px = x + (r_px + 1.0) * std::cos(t), py = y + (r_px + 1.0) * std::sin(t);
            const double dx = (px - gx) / gax, dy = (py - gy) / gay;
            if (dx * dx + dy * dy > 1.0) return false;
        }
        const double ur = urethra.radius * m;
        if (std::hypot(x - gx, y - gy) < r_px + ur + 1.0) return false;
        for (const auto& l : s.lesions) {
            if (std::hypot(x - l.cx * w, y - l.cy * h) < r_px + l.radius * m + 1.0) return false;
        }
        return true;
    };
    for (std::size_t i = 0; i < kLesionCount; ++i) {
        const double diameter_cm =
            kLesionMinDiameterCm + (kLesionMaxDiameterCm - kLesionMinDiameterCm) * detail::unit_uniform(gen);
        const double r_px = 0.5 * diameter_cm * px_per_cm;
        bool placed = false;
        for (int attempt = 0; attempt < 10000 && !placed; ++attempt) {
            const double x = gx + gax * (2.0 * detail::unit_uniform(gen) - 1.0);
            const double y = gy + gay * (2.0 * detail::unit_uniform(gen) - 1.0);
            if (fits(x, y, r_px)) {
                s.lesions.push_back(DiscShape{x / w, y / h, r_px / m, kLesionLevel});
                placed = true;
            }
        }
        if (!placed) throw ParameterError("default_prostate_spec: could not place lesion " + std::to_string(i));
    }
    return s;
}

// Lesion radius relative to the full prostate major axis.
inline double lesion_radius_fraction_of_major_axis(const PhantomSpec& s, std::size_t lesion) {
    const double m = static_cast<double>(std::min(s.width, s.height));
    return s.lesions.at(lesion).radius * m / (2.0 * s.prostate.value().ax * static_cast<double>(s.width));
}

inline std::string to_text(const PhantomSpec& s) {
    using kv::format_double;
    std::string out = "# phantom spec\n";
    auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    put("width", std::to_string(s.width));
    put("height", std::to_string(s.height));
    put("background", format_double(s.background));
    put("seed", std::to_string(s.seed));
    if (s.prostate) {
        put("prostate.cx", format_double(s.prostate->cx));
        put("prostate.cy", format_double(s.prostate->cy));
        put("prostate.ax", format_double(s.prostate->ax));
        put("prostate.ay", format_double(s.prostate->ay));
        put("prostate.intensity", format_double(s.prostate->intensity));
    }
    auto put_disc = [&](const std::string& p, const DiscShape& d) {
        put(p + ".cx", format_double(d.cx));
        put(p + ".cy", format_double(d.cy));
        put(p + ".radius", format_double(d.radius));
        put(p + ".intensity", format_double(d.intensity));
    };
    put("lesion_count", std::to_string(s.lesions.size()));
    for (std::size_t i = 0; i < s.lesions.size(); ++i) put_disc("lesion." + std::to_string(i), s.lesions[i]);
    if (s.urethra) put_disc("urethra", *s.urethra);
    return out;
}

inline PhantomSpec phantom_spec_from_text(std::string_view text) {
    const auto t = kv::parse(text);
    auto num = [&](const std::string& k) { return kv::to_double(k, kv::require(t, k)); };
    auto uint = [&](const std::string& k) { return kv::to_uint(k, kv::require(t, k)); };
    PhantomSpec s;
    s.width = uint("width");
    s.height = uint("height");
    s.background = num("background");
    if (t.contains("seed")) s.seed = uint("seed");
    if (t.contains("prostate.cx")) {
        s.prostate = EllipseShape{num("prostate.cx"), num("prostate.cy"), num("prostate.ax"), num("prostate.ay"),
                                  num("prostate.intensity")};
    }
    auto disc = [&](const std::string& p) {
        return DiscShape{num(p + ".cx"), num(p + ".cy"), num(p + ".radius"), num(p + ".intensity")};
    };
    const std::size_t n = t.contains("lesion_count") ? uint("lesion_count") : 0;
    for (std::size_t i = 0; i < n; ++i) s.lesions.push_back(disc("lesion." + std::to_string(i)));
    if (t.contains("urethra.cx")) s.urethra = disc("urethra");
    validate(s);
    return s;
}

} // namespace cdsfcrf
