#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace cdsfcrf;
using namespace cdsfcrf::cli;

void add_overrides(CLI::App* cmd, ConfigOverrides& o) {
    cmd->add_option("--seed", o.seed, "RNG seed (overrides config)");
    cmd->add_option("--max-iters", o.max_iters, "Iteration cap (overrides config)");
    cmd->add_option("--lambda-u", o.lambda_u, "Unary weight (overrides config)");
    cmd->add_option("--lambda-p", o.lambda_p, "Pairwise weight (overrides config)");
    cmd->add_option("--step-size", o.step_size, "Gradient step (overrides config)");
}

constexpr const char* kFooter = R"(Files:
  .cdim  raw f64 image ("CDIM", u32 version, u32 width, u32 height, LE f64 row-major)
  .cdks  k-space ("CDKS", same header, LE (re, im) f64 pairs, DC-centered)
  .pbm   P4 sampling mask, 1 = acquired bin
  .pgm   16-bit preview; min/max of the rescale in <file>.range
CSV:
  trace     iteration,unary,pairwise,total,grad_norm
  evaluate  width,height,psnr,ssim,rel_l2   (psnr "inf" for identical images)
  sweep     ratio,method,psnr,ssim,rel_l2,lines,achieved_ratio,status
Config keys (key = value):
  lambda_u lambda_p sigma gamma sigma_s sigma_d mode candidate_radius seed
  step_size max_iters tol_rel_energy tol_grad_norm resample_every record_trace
Exit codes: 0 ok, 2 usage, 3 data/format, 4 divergence)";

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-domain stochastic CRF reconstruction for radially undersampled MRI"};
    app.footer(kFooter);
    app.require_subcommand(1);

    PhantomArgs phantom;
    auto* c_phantom = app.add_subcommand("phantom", "Generate the synthetic prostate phantom");
    c_phantom->add_option("--width", phantom.width)->check(CLI::Range(32, 1 << 14));
    c_phantom->add_option("--height", phantom.height)->check(CLI::Range(32, 1 << 14));
    c_phantom->add_option("--seed", phantom.seed, "Lesion placement seed");
    c_phantom->add_option("--out", phantom.out, "Output CDIM path")->required();

    MaskArgs mask;
    auto* c_mask = app.add_subcommand("mask", "Build a radial sampling mask");
    c_mask->add_option("--width", mask.width)->check(CLI::PositiveNumber);
    c_mask->add_option("--height", mask.height)->check(CLI::PositiveNumber);
    auto* o_lines = c_mask->add_option("--lines", mask.lines, "Number of radial lines");
    auto* o_ratio = c_mask->add_option("--ratio", mask.ratio, "Target sampling ratio");
    o_lines->excludes(o_ratio);
    c_mask->add_option("--out", mask.out, "Output PBM path")->required();

    UndersampleArgs under;
    auto* c_under = app.add_subcommand("undersample", "Transform an image and keep the masked bins");
    c_under->add_option("--image", under.image)->required();
    c_under->add_option("--mask", under.mask)->required();
    c_under->add_option("--out", under.out, "Output CDKS path")->required();

    ReconstructArgs recon;
    auto* c_recon = app.add_subcommand("reconstruct", "Run the CD-SFCRF reconstruction");
    c_recon->add_option("--kspace", recon.kspace)->required();
    c_recon->add_option("--mask", recon.mask)->required();
    c_recon->add_option("--config", recon.config, "key = value config file");
    c_recon->add_option("--out", recon.out, "Output CDIM path")->required();
    c_recon->add_option("--trace", recon.trace, "Trace CSV path");
    add_overrides(c_recon, recon.overrides);

    EvaluateArgs eval;
    auto* c_eval = app.add_subcommand("evaluate", "PSNR / SSIM / relative L2 against a reference");
    c_eval->add_option("--truth", eval.truth)->required();
    c_eval->add_option("--test", eval.test)->required();
    c_eval->add_option("--out", eval.out, "Output CSV path")->required();
    c_eval->add_option("--peak", eval.peak)->check(CLI::PositiveNumber);
    c_eval->add_option("--window", eval.window, "SSIM window (odd)");

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Compare CD-SFCRF and zero-filled over sampling ratios");
    c_sweep->add_option("--image", sweep.image)->required();
    c_sweep->add_option("--ratios", sweep.ratios, "Comma-separated ratios")->required()->delimiter(',');
    c_sweep->add_option("--config", sweep.config);
    c_sweep->add_option("--out-dir", sweep.out_dir)->required();
    add_overrides(c_sweep, sweep.overrides);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*c_phantom) return cmd_phantom(phantom, std::cout);
        if (*c_mask) return cmd_mask(mask, std::cout);
        if (*c_under) return cmd_undersample(under, std::cout);
        if (*c_recon) return cmd_reconstruct(recon, std::cout);
        if (*c_eval) return cmd_evaluate(eval, std::cout);
        if (*c_sweep) {
            cmd_sweep(sweep, std::cout);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return kUsage;
}
