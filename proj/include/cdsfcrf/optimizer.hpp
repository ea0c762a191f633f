#pragma once

// Gradient-descent MAP reconstruction.
//
//   Y0 = zero-filled reconstruction of the masked spectrum (also the fixed
//        observation image used by clique sampling and the pairwise term)
//   for t = 0, 1, ...
//       resample cliques when t mod resample_every == 0 (key: iteration t)
//       g = grad psi(Y_t);   Y_{t+1} = Y_t - step_size * g
//
// Stopping is checked at Y_t before the update, in this order: gradient norm
// below tol_grad_norm, relative energy change |E_{t-3} - E_t| / |E_{t-3}| below
// tol_rel_energy, then max_iters. Trace entry t is the state at Y_t, so the
// trace holds exactly one entry per update performed.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "energy.hpp"
#include "graph.hpp"
#include "keyvalue.hpp"
#include "metrics.hpp"
#include "transform.hpp"

namespace cdsfcrf {

inline constexpr std::size_t kNeverResample = std::numeric_limits<std::size_t>::max();

struct ReconConfig {
    EnergyParams energy{1.0, 0.002, 0.005};
    CliqueSamplingConfig cliques{};
    double step_size = 0.1;
    std::size_t max_iters = 500;
    double tol_rel_energy = 1e-6;
    double tol_grad_norm = 1e-8;
    std::size_t resample_every = 1; // kNeverResample: sample once at t = 0
    bool record_trace = true;

    friend bool operator==(const ReconConfig&, const ReconConfig&) = default;
};

inline void validate(const ReconConfig& c) {
    validate(c.energy);
    validate(c.cliques);
    if (!(c.step_size > 0.0) || !std::isfinite(c.step_size)) throw ParameterError("recon: step_size must be > 0");
    if (!(c.tol_rel_energy >= 0.0)) throw ParameterError("recon: tol_rel_energy must be >= 0");
    if (!(c.tol_grad_norm >= 0.0)) throw ParameterError("recon: tol_grad_norm must be >= 0");
    if (c.resample_every < 1) throw ParameterError("recon: resample_every must be >= 1");
}

enum class StopReason { max_iters, energy_tol, grad_tol };

inline std::string to_string(StopReason r) {
    switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::energy_tol: return "energy_tol";
    case StopReason::grad_tol: return "grad_tol";
    }
    return "unknown";
}

struct TraceEntry {
    std::size_t iteration = 0;
    EnergyBreakdown energy;
    double grad_norm = 0.0;
};

struct ReconResult {
    Image image;
    std::size_t iterations_run = 0;
    StopReason stop_reason = StopReason::max_iters;
    std::vector<TraceEntry> trace;
};

// Iteration index whose RNG key produced the cliques in use at iteration t.
inline std::uint64_t clique_epoch(std::size_t t, std::size_t resample_every) {
    if (resample_every == kNeverResample) return 0;
    return t - t % resample_every;
}

inline ReconResult reconstruct(const KSpace& x_masked, const SamplingMask& mask, const ReconConfig& cfg) {
    validate(cfg);
    validate(x_masked, "reconstruct k-space");
    validate(mask, "reconstruct mask");
    require_same_dims(x_masked.dims(), mask.dims(), "reconstruct");

    ReconResult result;
    result.image = zero_filled_recon(x_masked);
    const Image obs = result.image;
    Image& y = result.image;

    CliqueSet cliques;
    std::vector<double> energies;
    for (std::size_t t = 0; t < cfg.max_iters; ++t) {
        if (t == 0 || (cfg.resample_every != kNeverResample && t % cfg.resample_every == 0)) {
            cliques = sample_cliques(obs, cfg.cliques, t);
        }
        auto eval = evaluate_energy(y, x_masked, mask, obs, cliques, cfg.energy);
        if (!std::isfinite(eval.energy.total)) throw DivergenceError(t, "non-finite energy");

        double g2 = 0.0;
        for (double g : eval.gradient) g2 += g * g;
        const double grad_norm = std::sqrt(g2);
        if (!std::isfinite(grad_norm)) throw DivergenceError(t, "non-finite gradient");

        if (grad_norm < cfg.tol_grad_norm) {
            result.stop_reason = StopReason::grad_tol;
            return result;
        }
        if (t >= 3 && cfg.tol_rel_energy > 0.0) {
            const double before = energies[t - 3];
            const double change = std::abs(before - eval.energy.total);
            const bool converged = before == 0.0 ? change == 0.0 : change / std::abs(before) < cfg.tol_rel_energy;
            if (converged) {
                result.stop_reason = StopReason::energy_tol;
                return result;
            }
        }
        energies.push_back(eval.energy.total);
        if (cfg.record_trace) result.trace.push_back({t, eval.energy, grad_norm});

        for (std::size_t k = 0; k < y.size(); ++k) y[k] -= cfg.step_size * eval.gradient[k];
        ++result.iterations_run;
    }
    if (!all_finite(y)) throw DivergenceError(cfg.max_iters, "non-finite estimate");
    result.stop_reason = StopReason::max_iters;
    return result;
}

// CSV: iteration,unary,pairwise,total,grad_norm
inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::string out = "iteration,unary,pairwise,total,grad_norm\n";
    for (const auto& e : trace) {
        out += std::to_string(e.iteration) + "," + kv::format_double(e.energy.unary) + "," +
               kv::format_double(e.energy.pairwise) + "," + kv::format_double(e.energy.total) + "," +
               kv::format_double(e.grad_norm) + "\n";
    }
    return out;
}

struct TuneCell {
    ReconConfig config;
    double psnr = -std::numeric_limits<double>::infinity();
    std::string error; // empty when the reconstruction succeeded
};

struct TuneResult {
    ReconConfig best;
    std::size_t best_index = 0;
    std::vector<TuneCell> cells;
};

// Axes of a Cartesian parameter grid. Empty axes keep the base value.
struct ParamGrid {
    std::vector<double> lambda_u{}, lambda_p{}, sigma{}, gamma{}, step_size{};
};

// Cells in declaration order: lambda_u outermost, step_size innermost.
inline std::vector<ReconConfig> expand_grid(const ReconConfig& base, const ParamGrid& g) {
    auto axis = [](const std::vector<double>& v, double fallback) {
        return v.empty() ? std::vector<double>{fallback} : v;
    };
    std::vector<ReconConfig> out;
    for (double lu : axis(g.lambda_u, base.energy.lambda_u))
        for (double lp : axis(g.lambda_p, base.energy.lambda_p))
            for (double s : axis(g.sigma, base.energy.sigma))
                for (double ga : axis(g.gamma, base.cliques.gamma))
                    for (double eta : axis(g.step_size, base.step_size)) {
                        ReconConfig c = base;
                        c.energy = {lu, lp, s};
                        c.cliques.gamma = ga;
                        c.step_size = eta;
                        out.push_back(c);
                    }
    return out;
}

// Scores every cell by PSNR against `truth`. Ties go to the lower lambda_p,
// then the lower step size, then the earlier cell. Failed cells score -inf.
inline TuneResult grid_tune(const KSpace& x_masked, const SamplingMask& mask, const Image& truth,
                            const std::vector<ReconConfig>& cells) {
    if (cells.empty()) throw ParameterError("grid_tune: empty grid");
    require_same_dims(truth.dims(), x_masked.dims(), "grid_tune");
    TuneResult out;
    for (const auto& c : cells) {
        TuneCell cell{c, -std::numeric_limits<double>::infinity(), {}};
        try {
            cell.psnr = psnr(truth, reconstruct(x_masked, mask, c).image);
        } catch (const Error& e) {
            cell.error = e.what();
        }
        out.cells.push_back(std::move(cell));
    }
    auto better = [](const TuneCell& a, const TuneCell& b) {
        if (a.psnr != b.psnr) return a.psnr > b.psnr;
        if (a.config.energy.lambda_p != b.config.energy.lambda_p)
            return a.config.energy.lambda_p < b.config.energy.lambda_p;
        return a.config.step_size < b.config.step_size;
    };
    for (std::size_t i = 1; i < out.cells.size(); ++i) {
        if (better(out.cells[i], out.cells[out.best_index])) out.best_index = i;
    }
    out.best = out.cells[out.best_index].config;
    return out;
}

// Flat key-value form of a ReconConfig. Keys:
//   lambda_u lambda_p sigma gamma sigma_s sigma_d mode candidate_radius seed
//   step_size max_iters tol_rel_energy tol_grad_norm resample_every record_trace
// candidate_radius accepts "auto" (ceil(6 sigma_s)); resample_every accepts "never".
inline std::string to_text(const ReconConfig& c) {
    using kv::format_double;
    std::string out;
    auto put = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    put("lambda_u", format_double(c.energy.lambda_u));
    put("lambda_p", format_double(c.energy.lambda_p));
    put("sigma", format_double(c.energy.sigma));
    put("gamma", format_double(c.cliques.gamma));
    put("sigma_s", format_double(c.cliques.sigma_s));
    put("sigma_d", format_double(c.cliques.sigma_d));
    put("mode", to_string(c.cliques.mode));
    put("candidate_radius", c.cliques.candidate_radius ? std::to_string(*c.cliques.candidate_radius) : "auto");
    put("seed", std::to_string(c.cliques.seed));
    put("step_size", format_double(c.step_size));
    put("max_iters", std::to_string(c.max_iters));
    put("tol_rel_energy", format_double(c.tol_rel_energy));
    put("tol_grad_norm", format_double(c.tol_grad_norm));
    put("resample_every", c.resample_every == kNeverResample ? "never" : std::to_string(c.resample_every));
    put("record_trace", c.record_trace ? "true" : "false");
    return out;
}

// Applies the keys present in `t` on top of `c`; unknown keys are rejected.
inline void apply_config(ReconConfig& c, const kv::Table& t) {
    for (const auto& [k, v] : t) {
        if (k == "lambda_u") c.energy.lambda_u = kv::to_double(k, v);
        else if (k == "lambda_p") c.energy.lambda_p = kv::to_double(k, v);
        else if (k == "sigma") c.energy.sigma = kv::to_double(k, v);
        else if (k == "gamma") c.cliques.gamma = kv::to_double(k, v);
        else if (k == "sigma_s") c.cliques.sigma_s = kv::to_double(k, v);
        else if (k == "sigma_d") c.cliques.sigma_d = kv::to_double(k, v);
        else if (k == "mode") c.cliques.mode = sampling_mode_from_string(v);
        else if (k == "candidate_radius") {
            if (v == "auto") c.cliques.candidate_radius.reset();
            else c.cliques.candidate_radius = kv::to_uint(k, v);
        } else if (k == "seed") c.cliques.seed = kv::to_uint(k, v);
        else if (k == "step_size") c.step_size = kv::to_double(k, v);
        else if (k == "max_iters") c.max_iters = kv::to_uint(k, v);
        else if (k == "tol_rel_energy") c.tol_rel_energy = kv::to_double(k, v);
        else if (k == "tol_grad_norm") c.tol_grad_norm = kv::to_double(k, v);
        else if (k == "resample_every") c.resample_every = v == "never" ? kNeverResample : kv::to_uint(k, v);
        else if (k == "record_trace") c.record_trace = kv::to_bool(k, v);
        else throw FormatError("unknown config key '" + k + "'");
    }
}

inline ReconConfig recon_config_from_text(std::string_view text) {
    ReconConfig c;
    apply_config(c, kv::parse(text));
    validate(c);
    return c;
}

} // namespace cdsfcrf
