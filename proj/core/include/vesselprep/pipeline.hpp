#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vesselprep/coarse_seg.hpp"
#include "vesselprep/frangi.hpp"
#include "vesselprep/losses.hpp"
#include "vesselprep/metrics.hpp"
#include "vesselprep/projection.hpp"
#include "vesselprep/volume.hpp"

namespace vesselprep {

struct PipelineConfig {
    std::string input_dir;
    std::string output_dir;
    std::optional<std::string> manifest_path;   // otherwise input_dir is scanned
    CropParams crop;
    FrangiParams frangi;
    CoarseSegParams coarse;
    bool normalize = true;
    bool emit_mip = true;
    int threads = 0;                            // 0 = auto
    bool overwrite = false;
    std::string output_format = "nii.gz";       // "nii" or "nii.gz"

    void validate() const;
};

/// Reads a JSON config file into a PipelineConfig (all fields optional,
/// defaults apply). See README for the schema.
PipelineConfig load_config(const std::string& path);

struct SubjectEntry {
    std::string subject_id;
    std::string path;         // absolute or relative to the manifest's directory
};

/// Unique, sorted subject list. Built from a directory scan of *.nii /
/// *.nii.gz or from a CSV manifest of "subject_id,relative_path" lines.
struct SubjectManifest {
    std::vector<SubjectEntry> entries;

    static SubjectManifest scan_directory(const std::string& dir);
    static SubjectManifest from_file(const std::string& manifest_path);
};

struct SubjectRecord {
    std::string subject_id;
    std::string status;            // "ok" | "failed"
    std::string error;             // diagnostic when failed
    Dims3 orig_dims;
    CropBox crop_box;
    Dims3 cropped_dims;
    double cr = 0.0;
    std::string vei_path;
    std::string cvs_path;
    std::vector<std::string> warnings;
    double wall_time_sec = 0.0;
};

struct RunReport {
    std::vector<SubjectRecord> records;   // one per manifest entry, manifest order
    std::int64_t subject_count = 0;
    std::int64_t failures = 0;
    double mean_cr = 0.0;                 // over successful subjects
    std::vector<std::int64_t> cr_histogram = std::vector<std::int64_t>(20, 0);   // [0,1) in 20 bins

    int exit_code() const {
        if (subject_count == 0 || failures == subject_count) return 1;
        return failures > 0 ? 2 : 0;
    }
};

/// Batch preprocessing: per subject, load -> (optional) min-max normalize ->
/// crop -> multiscale vesselness (VEI) -> coarse segmentation (CVS), writing
/// cropped/vei/cvs volumes, an optional MIP of the VEI, and a sidecar JSON
/// record under output_dir/{cropped,vei,cvs,mip,sidecar}/. A subject failure
/// is recorded and does not abort the batch. Outputs are byte-identical for
/// any thread count.
RunReport run_preprocess(const PipelineConfig& config);

struct MetricsRow {
    std::string subject_id;
    MetricsReport metrics;
    bool hd95_defined = true;
};

struct MetricsRunResult {
    std::vector<MetricsRow> rows;
    std::vector<std::string> unmatched_pred;    // stems present on one side only
    std::vector<std::string> unmatched_gt;
    std::vector<std::string> skipped;           // dim-mismatched pairs
    int exit_code = 0;
};

/// Evaluates (pred, gt) NIfTI pairs matched by filename stem and writes a CSV
/// with per-subject rows plus an aggregate mean/std row.
MetricsRunResult run_metrics(const std::string& pred_dir, const std::string& gt_dir,
                             const std::string& out_csv, bool voxel_units = false,
                             bool hd95_pooled = false, int threads = 0);

/// Evaluates the pretraining losses on five NIfTI files and returns the
/// report; the CLI serializes it as JSON.
LossReport run_losses(const std::string& pred_vei, const std::string& target_vei,
                      const std::string& pred_seg, const std::string& target_seg,
                      const std::string& input, const LossWeights& weights);

std::string loss_report_to_json(const LossReport& report);

struct CrSummary {
    std::int64_t subject_count = 0;
    double mean_cr = 0.0;
    double median_cr = 0.0;
    double fraction_at_or_above = 0.0;
    double threshold = 0.3849;
    std::vector<std::int64_t> histogram = std::vector<std::int64_t>(20, 0);
};

/// Aggregates the sidecar JSONs under a preprocessing output directory (or a
/// direct sidecar directory) into a cropping-rate histogram CSV and summary.
CrSummary run_report(const std::string& dir, const std::string& out_csv, double threshold = 0.3849);

}  // namespace vesselprep
