#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evrobust/dvs.hpp"
#include "evrobust/metrics.hpp"
#include "evrobust/rps.hpp"

namespace evrobust {

enum class SweepMode { under_report, noise_inject };

std::string to_string(SweepMode mode);

// Flat `key = value` sweep configuration (`#` comments allowed).
struct SweepConfig {
    std::filesystem::path input;
    SweepMode mode = SweepMode::under_report;
    std::vector<double> levels;
    Index bins = 6;
    double theta = 0.2;
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::filesystem::path out;
    std::filesystem::path weights;  // optional; enables forward smoke runs
    Index crop = 64;
    int workers = 1;

    void validate() const;
};

// Parses config text. `base_dir` resolves relative paths.
SweepConfig parse_sweep_config(const std::string& text, const std::filesystem::path& base_dir);

// Reads the file, applies the EVROBUST_SEED environment override, and records
// the canonical config hash.
struct LoadedSweepConfig {
    SweepConfig cfg;
    std::uint64_t config_hash = 0;
};
LoadedSweepConfig load_sweep_config(const std::filesystem::path& path);

// FNV-1a over the canonicalized (key-sorted, whitespace-stripped) key=value
// lines, so field order and comments never change the hash.
std::uint64_t config_hash(const std::string& config_text);

struct SweepRow {
    double level = 0.0;
    double empirical_ur = 0.0;  // realized injected ratio in noise_inject mode
    Index nonzero_before = 0;
    Index nonzero_after = 0;
    double abs_count_before = 0.0;
    double abs_count_after = 0.0;
    double psnr_proxy = 0.0;    // degraded-vs-clean voxel projection
    double ssim_proxy = 0.0;
    bool has_ssim = false;      // false when the grid is smaller than the SSIM window
    double feat_mean = 0.0;     // forward-pass feature statistics (weights supplied)
    double feat_std = 0.0;
    double feat_max = 0.0;
    bool has_features = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    SweepMode mode = SweepMode::under_report;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::string timestamp;  // in-memory run metadata; never serialized, so reruns stay byte-identical
};

SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t cfg_hash = 0);

// Fixed column order; written atomically (temp file + rename).
void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);

// Dataset directory contents: frames (PGM + timestamps), an EVT1 event file,
// and paired blur/sharp image directories, each optional.
struct DatasetBundle {
    std::optional<FrameSequence> frames;
    std::optional<EventStream> events;
    std::vector<std::pair<std::filesystem::path, std::filesystem::path>> blur_sharp;
    std::string summary;
};

DatasetBundle ingest_dataset(const std::filesystem::path& root);

// frames -> blur + events per theta -> voxel grids -> thinned variants per
// level, all dumped under out_dir with a checksum manifest.
struct PipelineConfig {
    std::filesystem::path frames_dir;
    std::filesystem::path out_dir;
    std::vector<double> thetas;
    std::vector<double> levels;
    Index bins = 6;
    NoiseModel noise;
    std::uint64_t seed = 0;
};

struct PipelineManifest {
    std::vector<std::pair<std::string, std::uint64_t>> files;  // (name, checksum)
};

PipelineManifest simulate_pipeline(const PipelineConfig& cfg);

struct CompareRow {
    double level = 0.0;
    double result_psnr = 0.0;
    double reference_psnr = 0.0;
    double result_ssim = 0.0;
    double reference_ssim = 0.0;
};

struct CompareReport {
    std::vector<CompareRow> rows;
    std::vector<CurveDelta> deltas;
    bool result_psnr_non_increasing = false;
    bool reference_psnr_non_increasing = false;
    bool ur_checked = false;
    bool ur_ok = true;
    double ur_failing_level = 0.0;
    std::string ur_message;
};

// Result may be a sweep CSV or a plain curve CSV; the reference is a curve CSV.
// Sweep results in under_report mode additionally get a 3-sigma binomial check
// of empirical UR against the configured level.
CompareReport compare_to_reference(const std::filesystem::path& result_csv,
                                   const std::filesystem::path& reference_csv);

// Temp-file + rename write; a killed run never leaves a partial file at `path`.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::uint64_t file_checksum(const std::filesystem::path& path);

std::string hash_hex(std::uint64_t h);

}  // namespace evrobust
