// Batch CLI for TOF-MRA preprocessing, loss evaluation and metric reporting.
// Subcommands: preprocess, metrics, losses, report.
// Exit codes: 0 success, 1 total failure, 2 partial failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vesselprep/pipeline.hpp"

namespace vp = vesselprep;

namespace {

std::vector<double> parse_scales(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

int cmd_preprocess(const std::string& config_path, const std::optional<std::string>& input,
                   const std::optional<std::string>& output,
                   const std::optional<std::string>& manifest,
                   const std::optional<double>& crop_percent,
                   const std::optional<std::int64_t>& min_region,
                   const std::optional<std::string>& frangi_scales,
                   const std::optional<double>& alpha, const std::optional<double>& beta,
                   const std::optional<double>& frangi_c,
                   const std::optional<double>& coarse_percent, const std::optional<int>& components,
                   const std::optional<int>& connectivity, const std::optional<int>& threads,
                   bool overwrite, bool no_normalize, bool no_mip) {
    vp::PipelineConfig cfg;
    if (!config_path.empty()) cfg = vp::load_config(config_path);

    // Flags win over config-file values.
    if (input) cfg.input_dir = *input;
    if (output) cfg.output_dir = *output;
    if (manifest) cfg.manifest_path = *manifest;
    if (crop_percent) cfg.crop.top_percent = *crop_percent;
    if (min_region) cfg.crop.min_region_px = *min_region;
    if (frangi_scales) cfg.frangi.scales = parse_scales(*frangi_scales);
    if (alpha) cfg.frangi.alpha = *alpha;
    if (beta) cfg.frangi.beta = *beta;
    if (frangi_c) cfg.frangi.c = *frangi_c;
    if (coarse_percent) cfg.coarse.top_percent = *coarse_percent;
    if (components) cfg.coarse.k = *components;
    if (connectivity) cfg.coarse.connectivity = *connectivity;
    if (threads) cfg.threads = *threads;
    if (overwrite) cfg.overwrite = true;
    if (no_normalize) cfg.normalize = false;
    if (no_mip) cfg.emit_mip = false;

    const vp::RunReport report = vp::run_preprocess(cfg);
    for (const auto& r : report.records) {
        std::cerr << r.subject_id << ": " << r.status;
        if (r.status == "ok")
            std::cerr << "  cr=" << r.cr << "  dims " << r.orig_dims.x << "x" << r.orig_dims.y << "x"
                      << r.orig_dims.z << " -> " << r.cropped_dims.x << "x" << r.cropped_dims.y << "x"
                      << r.cropped_dims.z << "  (" << r.wall_time_sec << " s)";
        else
            std::cerr << "  " << r.error;
        for (const auto& w : r.warnings) std::cerr << "\n  warning: " << w;
        std::cerr << "\n";
    }
    std::cerr << report.subject_count - report.failures << "/" << report.subject_count
              << " subjects processed, mean CR " << report.mean_cr << "\n";
    return report.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TOF-MRA volume preprocessing toolkit: projection-based cropping, multiscale "
                 "vesselness enhancement, coarse vessel segmentation, pretraining losses and "
                 "segmentation metrics"};
    app.require_subcommand(1);

    // ---- preprocess ----
    auto* pre = app.add_subcommand("preprocess", "Batch-preprocess a directory of volumes");
    std::string config_path;
    std::optional<std::string> input, output, manifest, frangi_scales;
    std::optional<double> crop_percent, alpha, beta, frangi_c, coarse_percent;
    std::optional<std::int64_t> min_region;
    std::optional<int> components, connectivity, threads;
    bool overwrite = false, no_normalize = false, no_mip = false;
    pre->add_option("--config", config_path, "JSON config file (flags override it)");
    pre->add_option("--input", input, "Input directory of .nii/.nii.gz volumes");
    pre->add_option("--output", output, "Output directory");
    pre->add_option("--manifest", manifest, "CSV manifest 'subject_id,relative_path'");
    pre->add_option("--crop-percent", crop_percent, "Top fraction for projection masks (default 0.35)");
    pre->add_option("--min-region", min_region, "Minimum 2D region size in pixels (default 200)");
    pre->add_option("--frangi-scales", frangi_scales, "Comma-separated sigmas (default 0.5,1,2,4)");
    pre->add_option("--alpha", alpha, "Frangi alpha (default 0.5)");
    pre->add_option("--beta", beta, "Frangi beta (default 0.5)");
    pre->add_option("--frangi-c", frangi_c, "Frangi structureness constant (default: auto per scale)");
    pre->add_option("--coarse-percent", coarse_percent, "Top fraction for the CVS threshold (default 0.05)");
    pre->add_option("--components", components, "Largest components kept in the CVS (default 4)");
    pre->add_option("--connectivity", connectivity, "3D connectivity 6|18|26 (default 26)");
    pre->add_option("--threads", threads, "Worker threads (default: all cores)");
    pre->add_flag("--overwrite", overwrite, "Replace existing outputs");
    pre->add_flag("--no-normalize", no_normalize, "Skip min-max intensity normalization");
    pre->add_flag("--no-mip", no_mip, "Skip the 2D MIP-of-VEI output");

    // ---- metrics ----
    auto* met = app.add_subcommand("metrics", "Evaluate Dice / clDice / HD95 on (pred, gt) mask pairs");
    std::string pred_dir, gt_dir, metrics_out = "metrics.csv";
    bool voxel_units = false, hd95_pooled = false;
    int metrics_threads = 0;
    met->add_option("--pred", pred_dir, "Directory of predicted masks")->required();
    met->add_option("--gt", gt_dir, "Directory of ground-truth masks")->required();
    met->add_option("--out", metrics_out, "Output CSV path (default metrics.csv)");
    met->add_flag("--voxel-units", voxel_units, "Measure HD95 in voxels instead of mm");
    met->add_flag("--hd95-pooled", hd95_pooled, "Pool both directed distance sets before the percentile");
    met->add_option("--threads", metrics_threads, "Worker threads");

    // ---- losses ----
    auto* los = app.add_subcommand("losses", "Evaluate the pretraining losses on five volumes");
    std::string pred_vei, target_vei, pred_seg, target_seg, input_vol, losses_out;
    vp::LossWeights weights;
    los->add_option("--pred-vei", pred_vei, "Predicted vessel-enhanced volume")->required();
    los->add_option("--target-vei", target_vei, "Target vessel-enhanced volume")->required();
    los->add_option("--pred-seg", pred_seg, "Predicted segmentation probabilities in [0,1]")->required();
    los->add_option("--target-seg", target_seg, "Target segmentation mask")->required();
    los->add_option("--input", input_vol, "Raw input volume")->required();
    los->add_option("--g1", weights.gamma1, "Regression weight (default 0.4)");
    los->add_option("--g2", weights.gamma2, "Segmentation weight (default 0.4)");
    los->add_option("--g3", weights.gamma3, "Consistency weight (default 0.2)");
    los->add_option("--out", losses_out, "Write the JSON report here instead of stdout");

    // ---- report ----
    auto* rep = app.add_subcommand("report", "Aggregate cropping rates from sidecar records");
    std::string report_dir, report_out;
    double threshold = 0.3849;
    rep->add_option("--dir", report_dir, "Preprocess output directory (or its sidecar/ subdirectory)")
        ->required();
    rep->add_option("--out", report_out, "Histogram CSV path (default <dir>/cr_report.csv)");
    rep->add_option("--threshold", threshold, "CR threshold for the coverage fraction (default 0.3849)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (pre->parsed()) {
            return cmd_preprocess(config_path, input, output, manifest, crop_percent, min_region,
                                  frangi_scales, alpha, beta, frangi_c, coarse_percent, components,
                                  connectivity, threads, overwrite, no_normalize, no_mip);
        }
        if (met->parsed()) {
            const vp::MetricsRunResult r =
                vp::run_metrics(pred_dir, gt_dir, metrics_out, voxel_units, hd95_pooled, metrics_threads);
            for (const auto& s : r.unmatched_pred) std::cerr << "unmatched (pred only): " << s << "\n";
            for (const auto& s : r.unmatched_gt) std::cerr << "unmatched (gt only): " << s << "\n";
            for (const auto& s : r.skipped) std::cerr << "skipped (dims mismatch): " << s << "\n";
            std::cerr << r.rows.size() << " pairs evaluated -> " << metrics_out << "\n";
            return r.exit_code;
        }
        if (los->parsed()) {
            const vp::LossReport r =
                vp::run_losses(pred_vei, target_vei, pred_seg, target_seg, input_vol, weights);
            const std::string text = vp::loss_report_to_json(r);
            if (losses_out.empty()) {
                std::cout << text << "\n";
            } else {
                std::ofstream f(losses_out, std::ios::trunc);
                if (!f) throw std::runtime_error("cannot write " + losses_out);
                f << text << "\n";
            }
            return 0;
        }
        if (rep->parsed()) {
            if (report_out.empty()) report_out = report_dir + "/cr_report.csv";
            const vp::CrSummary s = vp::run_report(report_dir, report_out, threshold);
            std::cout << "subjects: " << s.subject_count << "\n"
                      << "mean CR: " << s.mean_cr << "\n"
                      << "median CR: " << s.median_cr << "\n"
                      << "fraction with CR >= " << s.threshold << ": " << s.fraction_at_or_above << "\n"
                      << "histogram CSV: " << report_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
