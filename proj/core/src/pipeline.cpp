#include "vesselprep/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "vesselprep/nifti.hpp"
#include "vesselprep/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace vesselprep {

namespace {

constexpr const char* kArtifactDirs[] = {"cropped", "vei", "cvs", "mip", "sidecar"};

bool has_nifti_extension(const fs::path& p) {
    const std::string name = p.filename().string();
    auto ends_with = [&](const std::string& suffix) {
        return name.size() > suffix.size() &&
               name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    return ends_with(".nii") || ends_with(".nii.gz");
}

std::string stem_of(const std::string& filename) {
    std::string s = filename;
    auto strip = [&](const std::string& suffix) {
        if (s.size() > suffix.size() &&
            s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
            s.resize(s.size() - suffix.size());
    };
    strip(".gz");
    strip(".nii");
    return s;
}

json dims_to_json(const Dims3& d) { return json::array({d.x, d.y, d.z}); }

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void PipelineConfig::validate() const {
    if (input_dir.empty() || output_dir.empty())
        throw std::invalid_argument("config: input_dir and output_dir are required");
    if (fs::weakly_canonical(fs::path(input_dir)) == fs::weakly_canonical(fs::path(output_dir)))
        throw std::invalid_argument("config: input_dir and output_dir must be distinct");
    if (!(crop.top_percent > 0.0) || crop.top_percent > 1.0)
        throw std::invalid_argument("config: crop.top_percent must be in (0, 1]");
    if (crop.min_region_px < 0) throw std::invalid_argument("config: crop.min_region_px must be >= 0");
    if (crop.region_connectivity != 4 && crop.region_connectivity != 8)
        throw std::invalid_argument("config: crop.connectivity must be 4 or 8");
    frangi.validate();
    coarse.validate();
    if (output_format != "nii" && output_format != "nii.gz")
        throw std::invalid_argument("config: output_format must be 'nii' or 'nii.gz'");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }

    PipelineConfig c;
    c.input_dir = j.value("input_dir", "");
    c.output_dir = j.value("output_dir", "");
    if (j.contains("manifest")) c.manifest_path = j.at("manifest").get<std::string>();
    if (j.contains("crop")) {
        const auto& jc = j.at("crop");
        c.crop.top_percent = jc.value("top_percent", c.crop.top_percent);
        c.crop.min_region_px = jc.value("min_region_px", c.crop.min_region_px);
        c.crop.region_connectivity = jc.value("connectivity", c.crop.region_connectivity);
        if (jc.contains("top_percent_aip")) c.crop.top_percent_aip = jc.at("top_percent_aip").get<double>();
        if (jc.contains("top_percent_mip")) c.crop.top_percent_mip = jc.at("top_percent_mip").get<double>();
        if (jc.contains("top_percent_ivm")) c.crop.top_percent_ivm = jc.at("top_percent_ivm").get<double>();
    }
    if (j.contains("frangi")) {
        const auto& jf = j.at("frangi");
        if (jf.contains("scales")) c.frangi.scales = jf.at("scales").get<std::vector<double>>();
        c.frangi.alpha = jf.value("alpha", c.frangi.alpha);
        c.frangi.beta = jf.value("beta", c.frangi.beta);
        if (jf.contains("c") && !jf.at("c").is_null()) c.frangi.c = jf.at("c").get<double>();
        c.frangi.gamma_norm = jf.value("gamma_norm", c.frangi.gamma_norm);
        c.frangi.truncation = jf.value("truncation", c.frangi.truncation);
        const std::string pol = jf.value("polarity", "bright");
        if (pol == "bright") c.frangi.polarity = Polarity::BrightOnDark;
        else if (pol == "dark") c.frangi.polarity = Polarity::DarkOnBright;
        else throw std::runtime_error("config: frangi.polarity must be 'bright' or 'dark'");
    }
    if (j.contains("coarse")) {
        const auto& jc = j.at("coarse");
        c.coarse.top_percent = jc.value("top_percent", c.coarse.top_percent);
        c.coarse.k = jc.value("components", c.coarse.k);
        c.coarse.connectivity = jc.value("connectivity", c.coarse.connectivity);
        c.coarse.only_nonzero = jc.value("only_nonzero", c.coarse.only_nonzero);
    }
    c.normalize = j.value("normalize", c.normalize);
    c.emit_mip = j.value("emit_mip", c.emit_mip);
    c.threads = j.value("threads", c.threads);
    c.overwrite = j.value("overwrite", c.overwrite);
    c.output_format = j.value("output_format", c.output_format);
    return c;
}

SubjectManifest SubjectManifest::scan_directory(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("input directory not found: " + dir);
    SubjectManifest m;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || !has_nifti_extension(e.path())) continue;
        m.entries.push_back({stem_of(e.path().filename().string()), e.path().string()});
    }
    std::sort(m.entries.begin(), m.entries.end(),
              [](const SubjectEntry& a, const SubjectEntry& b) { return a.subject_id < b.subject_id; });
    for (std::size_t i = 1; i < m.entries.size(); ++i)
        if (m.entries[i].subject_id == m.entries[i - 1].subject_id)
            throw std::runtime_error("duplicate subject id in input directory: " + m.entries[i].subject_id);
    return m;
}

SubjectManifest SubjectManifest::from_file(const std::string& manifest_path) {
    std::ifstream f(manifest_path);
    if (!f) throw std::runtime_error("cannot read manifest: " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    SubjectManifest m;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("manifest line is not 'subject_id,relative_path': " + line);
        SubjectEntry e;
        e.subject_id = line.substr(0, comma);
        const std::string rel = line.substr(comma + 1);
        e.path = (fs::path(rel).is_absolute() ? fs::path(rel) : base / rel).string();
        if (e.subject_id.empty() || rel.empty())
            throw std::runtime_error("manifest line is not 'subject_id,relative_path': " + line);
        m.entries.push_back(std::move(e));
    }
    std::sort(m.entries.begin(), m.entries.end(),
              [](const SubjectEntry& a, const SubjectEntry& b) { return a.subject_id < b.subject_id; });
    for (std::size_t i = 1; i < m.entries.size(); ++i)
        if (m.entries[i].subject_id == m.entries[i - 1].subject_id)
            throw std::runtime_error("duplicate subject id in manifest: " + m.entries[i].subject_id);
    for (const auto& e : m.entries)
        if (!fs::exists(e.path)) throw std::runtime_error("manifest path missing: " + e.path);
    return m;
}

namespace {

struct SubjectPaths {
    std::string cropped, vei, cvs, mip, sidecar;
};

SubjectPaths subject_paths(const PipelineConfig& cfg, const std::string& subject_id) {
    const fs::path out(cfg.output_dir);
    const std::string ext = "." + cfg.output_format;
    SubjectPaths p;
    p.cropped = (out / "cropped" / (subject_id + ext)).string();
    p.vei = (out / "vei" / (subject_id + ext)).string();
    p.cvs = (out / "cvs" / (subject_id + ext)).string();
    p.mip = (out / "mip" / (subject_id + ext)).string();
    p.sidecar = (out / "sidecar" / (subject_id + ".json")).string();
    return p;
}

void write_sidecar(const SubjectRecord& rec, const std::string& path) {
    json j;
    j["subject_id"] = rec.subject_id;
    j["orig_dims"] = dims_to_json(rec.orig_dims);
    j["box"] = {{"x0", rec.crop_box.x0}, {"x1", rec.crop_box.x1},
                {"y0", rec.crop_box.y0}, {"y1", rec.crop_box.y1}};
    j["cropped_dims"] = dims_to_json(rec.cropped_dims);
    j["cr"] = rec.cr;
    if (!rec.warnings.empty()) j["warnings"] = rec.warnings;
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write sidecar: " + path);
    f << j.dump(2) << "\n";
}

SubjectRecord process_subject(const PipelineConfig& cfg, const SubjectEntry& entry, int threads) {
    SubjectRecord rec;
    rec.subject_id = entry.subject_id;
    const auto t0 = std::chrono::steady_clock::now();
    const SubjectPaths paths = subject_paths(cfg, entry.subject_id);

    try {
        Volume3 vol = load_nifti(entry.path);
        rec.orig_dims = vol.dims;
        if (cfg.normalize) vol = minmax_normalize(vol);

        CropPipelineResult crop = crop_pipeline(vol, cfg.crop, threads);
        vol = Volume3{};  // release the uncropped copy early
        rec.crop_box = crop.box;
        rec.cropped_dims = crop.volume.dims;
        rec.cr = cropping_rate(rec.orig_dims, rec.cropped_dims);
        if (crop.full_extent_fallback)
            rec.warnings.push_back("empty crop mask; fell back to the full extent");

        const Volume3 vei = frangi_multiscale(crop.volume, cfg.frangi, threads);
        const BinaryMask3 cvs = coarse_segmentation(vei, cfg.coarse);
        if (vei.data.empty() || *std::max_element(vei.data.begin(), vei.data.end()) == 0.0f)
            rec.warnings.push_back("vesselness response is identically zero; CVS keeps the tie-rule threshold output");

        save_nifti(crop.volume, paths.cropped);
        save_nifti(vei, paths.vei);
        save_nifti(cvs, paths.cvs);
        if (cfg.emit_mip) {
            const ProjectionSet proj = z_projections(vei, threads);
            save_nifti(proj.mip, paths.mip, vei.spacing);
        }
        rec.vei_path = paths.vei;
        rec.cvs_path = paths.cvs;
        write_sidecar(rec, paths.sidecar);
        rec.status = "ok";
    } catch (const std::exception& e) {
        rec.status = "failed";
        rec.error = e.what();
    }
    rec.wall_time_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

}  // namespace

RunReport run_preprocess(const PipelineConfig& config) {
    config.validate();

    const SubjectManifest manifest = config.manifest_path
                                         ? SubjectManifest::from_file(*config.manifest_path)
                                         : SubjectManifest::scan_directory(config.input_dir);
    if (manifest.entries.empty()) throw std::runtime_error("empty manifest: no input volumes found");

    // Refuse to clobber existing outputs unless asked.
    if (!config.overwrite) {
        std::vector<std::string> collisions;
        for (const auto& e : manifest.entries) {
            const SubjectPaths p = subject_paths(config, e.subject_id);
            for (const auto& path : {p.cropped, p.vei, p.cvs, p.mip, p.sidecar})
                if (fs::exists(path)) collisions.push_back(path);
        }
        if (!collisions.empty()) {
            std::string msg = "output collision (pass --overwrite to replace):";
            for (const auto& p : collisions) msg += "\n  " + p;
            throw std::runtime_error(msg);
        }
    }
    for (const char* d : kArtifactDirs)
        fs::create_directories(fs::path(config.output_dir) / d);

    const int total_threads = resolve_threads(config.threads);
    const int n_subjects = static_cast<int>(manifest.entries.size());
    const int subject_workers = std::max(1, std::min(total_threads, n_subjects));
    const int intra_threads = std::max(1, total_threads / subject_workers);

    RunReport report;
    report.records.resize(manifest.entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.entries.size()) break;
            report.records[i] = process_subject(config, manifest.entries[i], intra_threads);
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < subject_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    report.subject_count = static_cast<std::int64_t>(report.records.size());
    double cr_sum = 0.0;
    std::int64_t ok = 0;
    for (const auto& r : report.records) {
        if (r.status != "ok") {
            ++report.failures;
            continue;
        }
        ++ok;
        cr_sum += r.cr;
        const int bin = std::min(19, static_cast<int>(r.cr * 20.0));
        ++report.cr_histogram[static_cast<std::size_t>(std::max(0, bin))];
    }
    report.mean_cr = ok > 0 ? cr_sum / static_cast<double>(ok) : 0.0;
    return report;
}

namespace {

std::map<std::string, std::string> stems_in(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("directory not found: " + dir);
    std::map<std::string, std::string> m;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || !has_nifti_extension(e.path())) continue;
        m[stem_of(e.path().filename().string())] = e.path().string();
    }
    return m;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

MetricsRunResult run_metrics(const std::string& pred_dir, const std::string& gt_dir,
                             const std::string& out_csv, bool voxel_units, bool hd95_pooled,
                             int threads) {
    const auto preds = stems_in(pred_dir);
    const auto gts = stems_in(gt_dir);

    MetricsRunResult result;
    for (const auto& [stem, path] : preds)
        if (!gts.count(stem)) result.unmatched_pred.push_back(stem);
    for (const auto& [stem, path] : gts)
        if (!preds.count(stem)) result.unmatched_gt.push_back(stem);

    std::vector<std::pair<std::string, std::pair<std::string, std::string>>> pairs;
    for (const auto& [stem, path] : preds) {
        auto it = gts.find(stem);
        if (it != gts.end()) pairs.push_back({stem, {path, it->second}});
    }
    if (pairs.empty()) {
        std::string msg = "no matching filename stems between " + pred_dir + " and " + gt_dir;
        for (const auto& s : result.unmatched_pred) msg += "\n  pred only: " + s;
        for (const auto& s : result.unmatched_gt) msg += "\n  gt only: " + s;
        throw std::runtime_error(msg);
    }

    for (const auto& [stem, paths] : pairs) {
        const Volume3 pv = load_nifti(paths.first);
        const Volume3 gv = load_nifti(paths.second);
        if (!(pv.dims == gv.dims)) {
            result.skipped.push_back(stem);
            continue;
        }
        const BinaryMask3 pred = volume_to_mask(pv);
        const BinaryMask3 gt = volume_to_mask(gv);
        const Spacing3 spacing = voxel_units ? Spacing3{1.0f, 1.0f, 1.0f} : gv.spacing;

        MetricsRow row;
        row.subject_id = stem;
        row.metrics.dice = dice_coefficient(pred, gt);
        row.metrics.cldice = cl_dice(pred, gt);
        if (pred.popcount() == 0 || gt.popcount() == 0) {
            row.hd95_defined = false;
            row.metrics.hd95 = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.metrics.hd95 = hd95(pred, gt, spacing, Hd95Options{hd95_pooled}, threads);
        }
        result.rows.push_back(std::move(row));
    }

    if (!out_csv.empty()) {
        const fs::path csv_path(out_csv);
        if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
        std::ofstream f(out_csv, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write CSV: " + out_csv);
        f << "subject_id,dice,cldice,hd95_mm\n";
        std::vector<double> dices, cldices, hds;
        for (const auto& row : result.rows) {
            f << row.subject_id << "," << format_double(row.metrics.dice) << ","
              << format_double(row.metrics.cldice) << ",";
            if (row.hd95_defined) {
                f << format_double(row.metrics.hd95);
                hds.push_back(row.metrics.hd95);
            } else {
                f << "nan";
            }
            f << "\n";
            dices.push_back(row.metrics.dice);
            cldices.push_back(row.metrics.cldice);
        }
        f << "mean," << format_double(mean_of(dices)) << "," << format_double(mean_of(cldices))
          << "," << format_double(mean_of(hds)) << "\n";
        f << "std," << format_double(population_std(dices)) << ","
          << format_double(population_std(cldices)) << "," << format_double(population_std(hds))
          << "\n";
    }

    result.exit_code = result.skipped.empty() ? 0 : 2;
    return result;
}

LossReport run_losses(const std::string& pred_vei, const std::string& target_vei,
                      const std::string& pred_seg, const std::string& target_seg,
                      const std::string& input, const LossWeights& weights) {
    const Volume3 pv = load_nifti(pred_vei);
    const Volume3 tv = load_nifti(target_vei);
    const Volume3 ps = load_nifti(pred_seg);
    const Volume3 ts = load_nifti(target_seg);
    const Volume3 in = load_nifti(input);
    return compute_losses(pv, tv, ps, volume_to_mask(ts), in, weights);
}

std::string loss_report_to_json(const LossReport& report) {
    json j;
    j["rgn"] = report.rgn;
    j["seg"] = report.seg;
    j["dice_part"] = report.dice_part;
    j["bce_part"] = report.bce_part;
    j["consistency"] = report.consistency;
    j["total"] = report.total;
    j["weights"] = {{"gamma1", report.weights.gamma1},
                    {"gamma2", report.weights.gamma2},
                    {"gamma3", report.weights.gamma3}};
    return j.dump(2);
}

CrSummary run_report(const std::string& dir, const std::string& out_csv, double threshold) {
    fs::path sidecar_dir(dir);
    if (fs::is_directory(sidecar_dir / "sidecar")) sidecar_dir /= "sidecar";
    if (!fs::is_directory(sidecar_dir)) throw std::runtime_error("directory not found: " + dir);

    std::vector<double> crs;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sidecar_dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        std::ifstream f(p);
        json j;
        try {
            f >> j;
        } catch (const json::exception& e) {
            throw std::runtime_error("bad sidecar " + p.string() + ": " + e.what());
        }
        if (j.contains("cr")) crs.push_back(j.at("cr").get<double>());
    }
    if (crs.empty()) throw std::runtime_error("no sidecar records with a cropping rate found in " + dir);

    CrSummary s;
    s.threshold = threshold;
    s.subject_count = static_cast<std::int64_t>(crs.size());
    s.mean_cr = mean_of(crs);
    std::vector<double> sorted = crs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    s.median_cr = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    std::int64_t above = 0;
    for (double cr : crs) {
        const int bin = std::clamp(static_cast<int>(cr * 20.0), 0, 19);
        ++s.histogram[static_cast<std::size_t>(bin)];
        if (cr >= threshold) ++above;
    }
    s.fraction_at_or_above = static_cast<double>(above) / static_cast<double>(n);

    if (!out_csv.empty()) {
        const fs::path csv_path(out_csv);
        if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
        std::ofstream f(out_csv, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write CSV: " + out_csv);
        f << "bin_low,bin_high,count\n";
        for (int b = 0; b < 20; ++b)
            f << format_double(b * 0.05) << "," << format_double((b + 1) * 0.05) << ","
              << s.histogram[static_cast<std::size_t>(b)] << "\n";
    }
    return s;
}

}  // namespace vesselprep
