#pragma once

// Cross-domain energy
//
//   psi(Y | X) = lambda_u * U(Y) + lambda_p * P(Y)
//
//   U(Y) = sum_{kept w} |F(Y)_w - x_w|^2                  (k-space fidelity)
//   P(Y) = sum_{active (i,j)} 1 - f(y_i, y_j, X)           (spatial smoothness)
//   f    = exp(-(y_i - y_j)^2 (x_i - x_j)^2 / (3 sigma^2))
//
// F is the unitary DFT and x_i are pixels of the zero-filled observation image.
// The pairwise term uses the penalty 1 - f so that agreeing neighbors cost
// nothing.

#include <cmath>
#include <numeric>

#include "graph.hpp"
#include "transform.hpp"

namespace cdsfcrf {

struct EnergyParams {
    double lambda_u = 1.0;
    double lambda_p = 0.0;
    double sigma = 0.05;

    friend bool operator==(const EnergyParams&, const EnergyParams&) = default;
};

inline void validate(const EnergyParams& p) {
    if (!(p.lambda_u >= 0.0) || !(p.lambda_p >= 0.0)) throw ParameterError("energy: weights must be >= 0");
    if (!(p.lambda_u + p.lambda_p > 0.0)) throw ParameterError("energy: lambda_u + lambda_p must be > 0");
    if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw ParameterError("energy: sigma must be > 0");
}

struct EnergyBreakdown {
    double unary = 0.0;
    double pairwise = 0.0;
    double total = 0.0;
};

namespace detail {

inline void check_inputs(const Image& y, const KSpace& x, const SamplingMask& m, const char* what) {
    require_non_empty(y.dims(), what);
    require_same_dims(y.dims(), x.dims(), what);
    require_same_dims(y.dims(), m.dims(), what);
}

inline void check_pairwise_inputs(const Image& y, const Image& obs, const CliqueSet& cliques, double sigma,
                                  const char* what) {
    require_non_empty(y.dims(), what);
    require_same_dims(y.dims(), obs.dims(), what);
    // A default-constructed (empty) clique set fits any image.
    if (cliques.dims() != Dims{} && cliques.dims() != y.dims()) {
        throw DimensionError(std::string(what) + ": clique set built for " + to_string(cliques.dims()) +
                             ", image is " + to_string(y.dims()));
    }
    if (!(sigma > 0.0)) throw ParameterError(std::string(what) + ": sigma must be > 0");
}

// mask * (F(Y) - X), DC-centered.
inline KSpace masked_residual(const Image& y, const KSpace& x, const SamplingMask& m) {
    KSpace r = dft2_forward(y);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = m[k] ? r[k] - x[k] : Complex{0.0, 0.0};
    return r;
}

inline double squared_norm(const KSpace& r) {
    double s = 0.0;
    for (const auto& c : r) s += std::norm(c);
    return s;
}

} // namespace detail

inline double unary_energy(const Image& y, const KSpace& x, const SamplingMask& m) {
    detail::check_inputs(y, x, m, "unary_energy");
    return detail::squared_norm(detail::masked_residual(y, x, m));
}

// d/dY of unary_energy = 2 Re F^-1(mask * (F(Y) - X)).
inline Image unary_gradient(const Image& y, const KSpace& x, const SamplingMask& m) {
    detail::check_inputs(y, x, m, "unary_gradient");
    Image g = dft2_inverse(detail::masked_residual(y, x, m));
    for (auto& v : g) v *= 2.0;
    return g;
}

// Pairwise penalty and, when `grad` is non-null, its gradient added into *grad.
inline double pairwise_accumulate(const Image& y, const Image& obs, const CliqueSet& cliques, double sigma,
                                  Image* grad) {
    const double inv = 1.0 / (3.0 * sigma * sigma);
    double energy = 0.0;
    cliques.for_each_pair([&](std::size_t i, std::size_t j) {
        const double dy = y[i] - y[j];
        const double dx2 = (obs[i] - obs[j]) * (obs[i] - obs[j]);
        const double a = dy * dy * dx2 * inv;
        energy += -std::expm1(-a); // 1 - f, without cancellation for small a
        if (grad) {
            const double g = std::exp(-a) * 2.0 * dy * dx2 * inv;
            (*grad)[i] += g;
            (*grad)[j] -= g;
        }
    });
    return energy;
}

inline double pairwise_energy(const Image& y, const Image& obs, const CliqueSet& cliques, double sigma) {
    detail::check_pairwise_inputs(y, obs, cliques, sigma, "pairwise_energy");
    return pairwise_accumulate(y, obs, cliques, sigma, nullptr);
}

inline Image pairwise_gradient(const Image& y, const Image& obs, const CliqueSet& cliques, double sigma) {
    detail::check_pairwise_inputs(y, obs, cliques, sigma, "pairwise_gradient");
    Image g(y.dims(), 0.0);
    pairwise_accumulate(y, obs, cliques, sigma, &g);
    return g;
}

inline EnergyBreakdown total_energy(const Image& y, const KSpace& x, const SamplingMask& m, const Image& obs,
                                    const CliqueSet& cliques, const EnergyParams& p) {
    validate(p);
    EnergyBreakdown b;
    b.unary = unary_energy(y, x, m);
    b.pairwise = pairwise_energy(y, obs, cliques, p.sigma);
    b.total = p.lambda_u * b.unary + p.lambda_p * b.pairwise;
    return b;
}

inline Image total_gradient(const Image& y, const KSpace& x, const SamplingMask& m, const Image& obs,
                            const CliqueSet& cliques, const EnergyParams& p) {
    validate(p);
    Image gu = unary_gradient(y, x, m);
    Image gp = pairwise_gradient(y, obs, cliques, p.sigma);
    for (std::size_t k = 0; k < gu.size(); ++k) gu[k] = p.lambda_u * gu[k] + p.lambda_p * gp[k];
    return gu;
}

struct EnergyAndGradient {
    EnergyBreakdown energy;
    Image gradient;
};

// One forward and one inverse transform for both the energy and its gradient.
inline EnergyAndGradient evaluate_energy(const Image& y, const KSpace& x, const SamplingMask& m, const Image& obs,
                                         const CliqueSet& cliques, const EnergyParams& p) {
    validate(p);
    detail::check_inputs(y, x, m, "evaluate_energy");
    detail::check_pairwise_inputs(y, obs, cliques, p.sigma, "evaluate_energy");
    const KSpace r = detail::masked_residual(y, x, m);
    EnergyAndGradient out;
    out.energy.unary = detail::squared_norm(r);
    out.gradient = dft2_inverse(r);
    for (auto& v : out.gradient) v *= 2.0 * p.lambda_u;
    Image gp(y.dims(), 0.0);
    out.energy.pairwise = pairwise_accumulate(y, obs, cliques, p.sigma, &gp);
    for (std::size_t k = 0; k < gp.size(); ++k) out.gradient[k] += p.lambda_p * gp[k];
    out.energy.total = p.lambda_u * out.energy.unary + p.lambda_p * out.energy.pairwise;
    return out;
}

} // namespace cdsfcrf
