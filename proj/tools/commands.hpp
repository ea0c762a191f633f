#pragma once

// Pipeline commands behind the `cdsfcrf` tool. Each command writes its outputs
// plus a JSON run manifest next to them ("<primary output>.manifest.json").

#include <cdsfcrf/cdsfcrf.hpp>

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace cdsfcrf::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kDataError = 3;
inline constexpr int kDiverged = 4;

// Thrown for argument combinations the parser cannot express.
class UsageError : public Error {
public:
    using Error::Error;
};

inline fs::path with_extension(fs::path p, const std::string& ext) { return p.replace_extension(ext); }

inline fs::path sidecar(const fs::path& p, const std::string& suffix) {
    auto out = p;
    out += suffix;
    return out;
}

class Manifest {
public:
    explicit Manifest(std::string command) : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["tool_version"] = kToolVersion;
        doc_["parameters"] = nlohmann::json::object();
        doc_["inputs"] = nlohmann::json::object();
        doc_["outputs"] = nlohmann::json::object();
    }

    nlohmann::json& parameters() { return doc_["parameters"]; }
    void input(const std::string& role, const fs::path& p) { doc_["inputs"][role] = p.string(); }
    void output(const std::string& role, const fs::path& p) { doc_["outputs"][role] = p.string(); }
    void seed(std::uint64_t s) { doc_["seed"] = s; }

    void write(const fs::path& path) {
        doc_["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        io::write_file_atomic(path, doc_.dump(2) + "\n");
    }

private:
    nlohmann::json doc_;
    std::chrono::steady_clock::time_point start_;
};

inline nlohmann::json config_json(const ReconConfig& c) {
    nlohmann::json j;
    for (const auto& [k, v] : kv::parse(to_text(c))) j[k] = v;
    return j;
}

// ---------------------------------------------------------------------------

struct PhantomArgs {
    std::size_t width = 256, height = 256;
    std::uint64_t seed = 0;
    fs::path out;
};

// Writes <out> (CDIM), <out>.pgm (+ .range), <out>.spec.
inline int cmd_phantom(const PhantomArgs& a, std::ostream& log) {
    Manifest manifest("phantom");
    const PhantomSpec spec = default_prostate_spec(a.width, a.height, a.seed);
    const Image img = generate_phantom(spec);
    const auto image_path = a.out;
    const auto preview = with_extension(a.out, ".pgm");
    const auto spec_path = with_extension(a.out, ".spec");
    io::write_image(image_path, img);
    io::write_preview(preview, img);
    io::write_file_atomic(spec_path, to_text(spec));
    manifest.parameters() = {{"width", a.width}, {"height", a.height}};
    manifest.seed(a.seed);
    manifest.output("image", image_path);
    manifest.output("preview", preview);
    manifest.output("spec", spec_path);
    manifest.write(sidecar(image_path, ".manifest.json"));
    log << "phantom " << a.width << "x" << a.height << " seed " << a.seed << " -> " << image_path.string() << "\n";
    return kOk;
}

// Regenerates a phantom from a spec file written by cmd_phantom.
inline Image phantom_from_spec_file(const fs::path& p) {
    return generate_phantom(phantom_spec_from_text(io::detail::read_all(p)));
}

struct MaskArgs {
    std::size_t width = 256, height = 256;
    std::optional<std::size_t> lines;
    std::optional<double> ratio;
    fs::path out;
};

inline int cmd_mask(const MaskArgs& a, std::ostream& log) {
    if (a.lines.has_value() == a.ratio.has_value()) throw UsageError("mask: give exactly one of --lines or --ratio");
    Manifest manifest("mask");
    const std::size_t lines = a.lines ? *a.lines : lines_for_ratio(a.width, a.height, *a.ratio);
    const SamplingMask m = radial_mask(a.width, a.height, lines);
    const double achieved = sampling_ratio(m);
    io::write_mask(a.out, m);
    manifest.parameters() = {{"width", a.width}, {"height", a.height}, {"lines", lines}, {"achieved_ratio", achieved}};
    if (a.ratio) manifest.parameters()["target_ratio"] = *a.ratio;
    manifest.output("mask", a.out);
    manifest.write(sidecar(a.out, ".manifest.json"));
    log << "lines " << lines << " achieved_ratio " << kv::format_double(achieved) << "\n";
    return kOk;
}

struct UndersampleArgs {
    fs::path image, mask, out;
};

inline int cmd_undersample(const UndersampleArgs& a, std::ostream& log) {
    Manifest manifest("undersample");
    const Image img = io::read_image(a.image);
    const SamplingMask m = io::read_mask(a.mask);
    require_same_dims(img.dims(), m.dims(), "undersample");
    const KSpace ks = apply_mask(dft2_forward(img), m);
    io::write_kspace(a.out, ks);
    manifest.input("image", a.image);
    manifest.input("mask", a.mask);
    manifest.output("kspace", a.out);
    manifest.parameters()["sampling_ratio"] = sampling_ratio(m);
    manifest.write(sidecar(a.out, ".manifest.json"));
    log << "undersampled " << to_string(img.dims()) << " at ratio " << kv::format_double(sampling_ratio(m)) << "\n";
    return kOk;
}

// Command-line overrides applied on top of the config file.
struct ConfigOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_iters;
    std::optional<double> lambda_u, lambda_p, step_size;
};

inline ReconConfig load_config(const std::optional<fs::path>& file, const ConfigOverrides& o) {
    ReconConfig c;
    if (file) apply_config(c, kv::parse(io::detail::read_all(*file)));
    if (o.seed) c.cliques.seed = *o.seed;
    if (o.max_iters) c.max_iters = *o.max_iters;
    if (o.lambda_u) c.energy.lambda_u = *o.lambda_u;
    if (o.lambda_p) c.energy.lambda_p = *o.lambda_p;
    if (o.step_size) c.step_size = *o.step_size;
    validate(c);
    return c;
}

struct ReconstructArgs {
    fs::path kspace, mask, out;
    std::optional<fs::path> config, trace;
    ConfigOverrides overrides;
};

// Writes <out> (CDIM), <out>.pgm preview, <out>.manifest.json and optionally the trace CSV.
inline int cmd_reconstruct(const ReconstructArgs& a, std::ostream& log) {
    Manifest manifest("reconstruct");
    ReconConfig cfg = load_config(a.config, a.overrides);
    if (a.trace) cfg.record_trace = true;
    const KSpace ks = io::read_kspace(a.kspace);
    const SamplingMask m = io::read_mask(a.mask);
    const ReconResult r = reconstruct(ks, m, cfg);
    io::write_image(a.out, r.image);
    io::write_preview(with_extension(a.out, ".pgm"), r.image);
    if (a.trace) io::write_file_atomic(*a.trace, trace_csv(r.trace));

    manifest.parameters() = config_json(cfg);
    manifest.parameters()["iterations_run"] = r.iterations_run;
    manifest.parameters()["stop_reason"] = to_string(r.stop_reason);
    manifest.seed(cfg.cliques.seed);
    manifest.input("kspace", a.kspace);
    manifest.input("mask", a.mask);
    if (a.config) manifest.input("config", *a.config);
    manifest.output("image", a.out);
    if (a.trace) manifest.output("trace", *a.trace);
    manifest.write(sidecar(a.out, ".manifest.json"));
    log << "iterations " << r.iterations_run << " stop " << to_string(r.stop_reason) << "\n";
    return kOk;
}

struct EvaluateArgs {
    fs::path truth, test, out;
    double peak = 1.0;
    std::size_t window = 7;
};

// Writes a header line plus one QualityReport row.
inline int cmd_evaluate(const EvaluateArgs& a, std::ostream& log) {
    Manifest manifest("evaluate");
    const Image truth = io::read_image(a.truth);
    const Image test = io::read_image(a.test);
    const QualityReport q = evaluate_quality(truth, test, a.peak, a.window);
    io::write_file_atomic(a.out, quality_csv_header() + "\n" + to_csv_row(q) + "\n");
    manifest.parameters() = {{"peak", a.peak}, {"window", a.window}};
    manifest.input("truth", a.truth);
    manifest.input("test", a.test);
    manifest.output("report", a.out);
    manifest.write(sidecar(a.out, ".manifest.json"));
    log << to_csv_row(q) << "\n";
    return kOk;
}

struct SweepArgs {
    fs::path image, out_dir;
    std::vector<double> ratios;
    std::optional<fs::path> config;
    ConfigOverrides overrides;
};

struct SweepRow {
    double ratio = 0.0;
    std::string method;
    QualityReport quality;
    std::size_t lines = 0;
    double achieved_ratio = 0.0;
    std::string status = "ok";
};

inline std::string sweep_csv_header() { return "ratio,method,psnr,ssim,rel_l2,lines,achieved_ratio,status"; }

inline std::string to_csv_row(const SweepRow& r) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    return kv::format_double(r.ratio) + "," + r.method + "," + format_metric(r.quality.psnr) + "," +
           format_metric(r.quality.ssim) + "," + format_metric(r.quality.rel_l2) + "," + std::to_string(r.lines) +
           "," + kv::format_double(r.achieved_ratio) + "," + status;
}

inline std::string ratio_dir_name(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ratio_%.4f", ratio);
    return buf;
}

// For each ratio (ascending): mask, undersample, zero-filled and CD-SFCRF
// reconstructions, metrics. A failing ratio is recorded and the sweep goes on.
// Table: <out_dir>/sweep.csv; per-ratio artifacts in <out_dir>/ratio_<r>/.
inline std::vector<SweepRow> cmd_sweep(const SweepArgs& a, std::ostream& log) {
    if (a.ratios.empty()) throw UsageError("sweep: no ratios given");
    Manifest manifest("sweep");
    const ReconConfig cfg = load_config(a.config, a.overrides);
    const Image truth = io::read_image(a.image);
    fs::create_directories(a.out_dir);

    std::vector<double> ratios = a.ratios;
    std::sort(ratios.begin(), ratios.end());
    ratios.erase(std::unique(ratios.begin(), ratios.end()), ratios.end());

    std::vector<SweepRow> rows;
    for (double ratio : ratios) {
        const fs::path dir = a.out_dir / ratio_dir_name(ratio);
        SweepRow zf, cd;
        zf.ratio = cd.ratio = ratio;
        zf.method = "zero_filled";
        cd.method = "cd_sfcrf";
        try {
            fs::create_directories(dir);
            const std::size_t lines = lines_for_ratio(truth.width(), truth.height(), ratio);
            const SamplingMask m = radial_mask(truth.width(), truth.height(), lines);
            zf.lines = cd.lines = lines;
            zf.achieved_ratio = cd.achieved_ratio = sampling_ratio(m);
            const KSpace ks = apply_mask(dft2_forward(truth), m);
            io::write_mask(dir / "mask.pbm", m);
            io::write_kspace(dir / "kspace.cdks", ks);

            const Image baseline = zero_filled_recon(ks);
            io::write_image(dir / "zero_filled.cdim", baseline);
            zf.quality = evaluate_quality(truth, baseline);

            const ReconResult r = reconstruct(ks, m, cfg);
            io::write_image(dir / "cd_sfcrf.cdim", r.image);
            io::write_file_atomic(dir / "trace.csv", trace_csv(r.trace));
            cd.quality = evaluate_quality(truth, r.image);
        } catch (const std::exception& e) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            for (SweepRow* row : {&zf, &cd}) {
                if (row->status == "ok" && row->quality.dims == Dims{}) {
                    row->quality = {nan, nan, nan, truth.dims()};
                    row->status = std::string("error: ") + e.what();
                }
            }
        }
        log << to_csv_row(zf) << "\n" << to_csv_row(cd) << "\n";
        rows.push_back(zf);
        rows.push_back(cd);
    }

    std::string table = sweep_csv_header() + "\n";
    for (const auto& r : rows) table += to_csv_row(r) + "\n";
    io::write_file_atomic(a.out_dir / "sweep.csv", table);

    manifest.parameters() = config_json(cfg);
    manifest.parameters()["ratios"] = ratios;
    manifest.seed(cfg.cliques.seed);
    manifest.input("image", a.image);
    if (a.config) manifest.input("config", *a.config);
    manifest.output("table", a.out_dir / "sweep.csv");
    manifest.write(a.out_dir / "sweep.manifest.json");
    return rows;
}

} // namespace cdsfcrf::cli
