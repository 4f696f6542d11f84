#include "evrobust/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "evrobust/event_io.hpp"
#include "evrobust/image.hpp"
#include "evrobust/interact.hpp"
#include "evrobust/weights_io.hpp"

namespace evrobust {

namespace fs = std::filesystem;

std::string to_string(SweepMode mode) {
    return mode == SweepMode::under_report ? "under_report" : "noise_inject";
}

void SweepConfig::validate() const {
    require(!levels.empty(), "sweep config: at least one level required");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        require(levels[i] >= 0.0 && levels[i] <= 1.0, "sweep config: levels must be in [0,1]");
        if (i > 0)
            require(levels[i] > levels[i - 1], "sweep config: levels must be strictly increasing");
    }
    require(bins >= 1, "sweep config: bins must be >= 1");
    require(theta > 0.0, "sweep config: theta must be > 0");
    require(crop >= 2, "sweep config: crop must be >= 2");
    require(workers >= 1, "sweep config: workers must be >= 1");
    require(!input.empty(), "sweep config: input path required");
    require(!out.empty(), "sweep config: out path required");
    noise.validate();
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        require(eq != std::string::npos,
                "sweep config line " + std::to_string(line_no) + ": expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        require(!key.empty(), "sweep config line " + std::to_string(line_no) + ": empty key");
        require(!kv.count(key), "sweep config: duplicate key `" + key + "`");
        kv[key] = value;
    }
    return kv;
}

std::vector<double> parse_levels(const std::string& value) {
    std::vector<double> levels;
    std::istringstream in(value);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) levels.push_back(std::stod(tok));
    }
    return levels;
}

}  // namespace

std::uint64_t config_hash(const std::string& config_text) {
    const auto kv = parse_kv(config_text);
    std::string canon;
    for (const auto& [k, v] : kv) {
        if (k == "workers") continue;  // scheduling knob, never affects results
        canon += k;
        canon += '=';
        canon += v;
        canon += '\n';
    }
    return fnv1a64(canon.data(), canon.size());
}

SweepConfig parse_sweep_config(const std::string& text, const fs::path& base_dir) {
    SweepConfig cfg;
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    for (const auto& [key, value] : parse_kv(text)) {
        if (key == "input") {
            cfg.input = resolve(value);
        } else if (key == "mode") {
            if (value == "under_report")
                cfg.mode = SweepMode::under_report;
            else if (value == "noise_inject")
                cfg.mode = SweepMode::noise_inject;
            else
                throw ValidationError("sweep config: unknown mode `" + value + "`");
        } else if (key == "levels") {
            cfg.levels = parse_levels(value);
        } else if (key == "bins") {
            cfg.bins = std::stoll(value);
        } else if (key == "theta") {
            cfg.theta = std::stod(value);
        } else if (key == "lambda") {
            cfg.noise.lambda = std::stod(value);
        } else if (key == "sigma_n") {
            cfg.noise.sigma_n = std::stod(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "out") {
            cfg.out = resolve(value);
        } else if (key == "weights") {
            cfg.weights = resolve(value);
        } else if (key == "crop") {
            cfg.crop = std::stoll(value);
        } else if (key == "workers") {
            cfg.workers = std::stoi(value);
        } else {
            throw ValidationError("sweep config: unknown key `" + key + "`");
        }
    }
    cfg.validate();
    return cfg;
}

LoadedSweepConfig load_sweep_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open sweep config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    LoadedSweepConfig loaded;
    loaded.cfg = parse_sweep_config(buf.str(), path.parent_path());
    loaded.config_hash = config_hash(buf.str());
    if (const char* env = std::getenv("EVROBUST_SEED"); env && *env)
        loaded.cfg.seed = std::stoull(env);
    return loaded;
}

namespace {

// Per-pixel projection of a voxel grid: sum of |counts| over bins, scaled by
// the clean grid's maximum so degraded grids land in the same [0,1] range.
ImageF voxel_projection(const VoxelGrid& grid, double scale) {
    ImageF img(grid.height(), grid.width(), 1, 1.0);
    for (Index y = 0; y < grid.height(); ++y) {
        for (Index x = 0; x < grid.width(); ++x) {
            double acc = 0.0;
            for (Index tau = 0; tau < grid.bins(); ++tau) acc += std::abs(grid(tau, y, x));
            img.at(0, y, x) = std::min(1.0, acc / scale);
        }
    }
    return img;
}

struct ForwardStats {
    double mean = 0.0;
    double stddev = 0.0;
    double max_abs = 0.0;
};

Tensor4d event_tensor_from_grid(const VoxelGrid& grid, const MrmConfig& cfg, Index y0, Index x0,
                                Index side) {
    const double scale = std::max(1.0, grid.raw().abs().maxCoeff());
    Tensor4d t(1, cfg.feature_channels(), side, side);
    for (Index c = 0; c < cfg.channels_c; ++c)
        for (Index tau = 0; tau < cfg.temporal_t; ++tau) {
            const Index bin = tau % grid.bins();
            for (Index y = 0; y < side; ++y)
                for (Index x = 0; x < side; ++x)
                    t(0, c * cfg.temporal_t + tau, y, x) = grid(bin, y0 + y, x0 + x) / scale;
        }
    return t;
}

Tensor4d image_tensor_from_plane(const std::optional<ImagePlane>& blur, const MrmConfig& cfg,
                                 Index y0, Index x0, Index side) {
    Tensor4d t = Tensor4d::constant(1, cfg.feature_channels(), side, side, 0.5);
    if (blur) {
        for (Index n = 0; n < cfg.feature_channels(); ++n)
            for (Index y = 0; y < side; ++y)
                for (Index x = 0; x < side; ++x) t(0, n, y, x) = (*blur)(y0 + y, x0 + x);
    }
    return t;
}

ForwardStats forward_smoke(const VoxelGrid& degraded, const std::optional<ImagePlane>& blur,
                           const WeightsFile& wf, Index crop) {
    const MrmConfig& cfg = wf.cfg;
    Index side = std::min({crop, degraded.height(), degraded.width()});
    side -= side % 2;  // MSEM's high-frequency path needs even spatial dims
    require(side >= 2, "forward smoke: grid too small for an even crop");
    const Index y0 = (degraded.height() - side) / 2;
    const Index x0 = (degraded.width() - side) / 2;

    const Tensor4d f_event = event_tensor_from_grid(degraded, cfg, y0, x0, side);
    const Tensor4d f_image = image_tensor_from_plane(blur, cfg, y0, x0, side);

    const MrmWeights<double> mrm_w = bind_mrm(wf);
    const MsemWeights<double> msem_w = bind_msem(wf);
    const EsemWeights<double> esem_w = bind_esem(wf);

    const Tensor4d sem = semantic_attention(f_image, cfg, mrm_w.semantic);
    const Tensor4d mot = motion_attention(f_event, cfg, mrm_w.motion);
    const Tensor4d fused = cross_modality(sem, mot, cfg, mrm_w);
    const Tensor4d to_image = msem_forward(mot, sem, msem_w);
    const Tensor4d to_event = esem_forward(sem, mot, cfg, esem_w);

    const Index total = fused.size() + to_image.size() + to_event.size();
    double sum = 0.0, sq = 0.0, mx = 0.0;
    for (const Tensor4d* t : {&fused, &to_image, &to_event}) {
        sum += t->raw().sum();
        sq += t->raw().square().sum();
        mx = std::max(mx, static_cast<double>(t->raw().abs().maxCoeff()));
    }
    ForwardStats st;
    st.mean = sum / static_cast<double>(total);
    st.stddev = std::sqrt(std::max(0.0, sq / static_cast<double>(total) - st.mean * st.mean));
    st.max_abs = mx;
    return st;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, std::uint64_t cfg_hash) {
    cfg.validate();
    const DatasetBundle data = ingest_dataset(cfg.input);

    VoxelGrid grid;
    if (data.events) {
        grid = encode_voxel(*data.events, cfg.bins);
    } else if (data.frames) {
        DvsConfig dvs;
        dvs.theta = cfg.theta;
        dvs.noise = cfg.noise;
        grid = encode_voxel(simulate_events(*data.frames, dvs, cfg.seed), cfg.bins);
    } else {
        throw ValidationError("run_sweep: dataset has neither events nor frames: " +
                              cfg.input.string());
    }

    std::optional<ImagePlane> blur;
    if (data.frames) blur = synthesize_blur(*data.frames);

    std::optional<WeightsFile> wf;
    if (!cfg.weights.empty()) wf = read_weights(cfg.weights);

    double proxy_scale = 1.0;
    for (Index y = 0; y < grid.height(); ++y)
        for (Index x = 0; x < grid.width(); ++x) {
            double acc = 0.0;
            for (Index tau = 0; tau < grid.bins(); ++tau) acc += std::abs(grid(tau, y, x));
            proxy_scale = std::max(proxy_scale, acc);
        }
    const ImageF clean_proxy = voxel_projection(grid, proxy_scale);
    const bool ssim_feasible = std::min(grid.height(), grid.width()) >= 11;

    SweepResult result;
    result.mode = cfg.mode;
    result.seed = cfg.seed;
    result.config_hash = cfg_hash;
    result.timestamp = timestamp_now();
    result.rows.resize(cfg.levels.size());

    // Levels are independent; each derives its RNG substream from (seed, index),
    // so the outcome does not depend on the worker count.
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= cfg.levels.size()) return;
            const double level = cfg.levels[i];
            CounterRng level_rng(cfg.seed, 0x11e7u, i);
            const std::uint64_t level_seed = level_rng.next_u64();

            VoxelGrid degraded;
            if (cfg.mode == SweepMode::under_report) {
                degraded = thin(grid, survival_map_from_alpha(level, grid.bins(), grid.height(),
                                                              grid.width()),
                                level_seed);
            } else {
                degraded = noise_inject(grid, level, level_seed);
            }

            SweepRow row;
            row.level = level;
            row.nonzero_before = grid.nonzero_count();
            row.nonzero_after = degraded.nonzero_count();
            row.abs_count_before = grid.abs_sum();
            row.abs_count_after = degraded.abs_sum();
            if (cfg.mode == SweepMode::under_report) {
                row.empirical_ur = empirical_ur(grid, degraded);
            } else {
                const double nnz = static_cast<double>(row.nonzero_before);
                row.empirical_ur =
                    nnz == 0.0 ? 0.0 : static_cast<double>(std::llround(level * nnz)) / nnz;
            }

            const ImageF degraded_proxy = voxel_projection(degraded, proxy_scale);
            row.psnr_proxy = psnr(clean_proxy, degraded_proxy).db;
            if (ssim_feasible) {
                row.ssim_proxy = ssim(clean_proxy, degraded_proxy);
                row.has_ssim = true;
            }
            if (wf) {
                const ForwardStats st = forward_smoke(degraded, blur, *wf, cfg.crop);
                row.feat_mean = st.mean;
                row.feat_std = st.stddev;
                row.feat_max = st.max_abs;
                row.has_features = true;
            }
            result.rows[i] = row;
        }
    };

    if (cfg.workers == 1 || cfg.levels.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<int>(cfg.workers, static_cast<int>(cfg.levels.size()));
        pool.reserve(n);
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return result;
}

void write_sweep_csv(const SweepResult& result, const fs::path& path) {
    std::string text = "# evrobust-sweep seed=" + std::to_string(result.seed) +
                       " config=" + hash_hex(result.config_hash) + " mode=" +
                       to_string(result.mode) + "\n";
    text +=
        "level,empirical_ur,nonzero_before,nonzero_after,abs_count_before,abs_count_after,"
        "psnr,ssim,feat_mean,feat_std,feat_max\n";
    for (const SweepRow& r : result.rows) {
        text += format_double(r.level) + ',' + format_double(r.empirical_ur) + ',' +
                std::to_string(r.nonzero_before) + ',' + std::to_string(r.nonzero_after) + ',' +
                format_double(r.abs_count_before) + ',' + format_double(r.abs_count_after) + ',' +
                format_double(r.psnr_proxy) + ',';
        text += r.has_ssim ? format_double(r.ssim_proxy) : std::string("na");
        if (r.has_features) {
            text += ',' + format_double(r.feat_mean) + ',' + format_double(r.feat_std) + ',' +
                    format_double(r.feat_max);
        } else {
            text += ",na,na,na";
        }
        text += '\n';
    }
    atomic_write_text(path, text);
}

DatasetBundle ingest_dataset(const fs::path& root) {
    require(fs::exists(root), "dataset path does not exist: " + root.string());
    DatasetBundle bundle;
    std::string summary;

    fs::path frames_dir;
    if (fs::exists(root / "frames" / "timestamps.txt"))
        frames_dir = root / "frames";
    else if (fs::exists(root / "timestamps.txt"))
        frames_dir = root;
    if (!frames_dir.empty()) {
        bundle.frames = load_frame_sequence(frames_dir);
        summary += "frames: " + std::to_string(bundle.frames->frames.size()) + " @ " +
                   std::to_string(bundle.frames->width()) + "x" +
                   std::to_string(bundle.frames->height()) + "\n";
    }

    if (fs::exists(root / "events.evt")) {
        bundle.events = read_events(root / "events.evt");
        summary += "events: " + std::to_string(bundle.events->size()) + "\n";
    }

    const fs::path blur_dir = root / "blur";
    const fs::path sharp_dir = root / "sharp";
    if (fs::exists(blur_dir) || fs::exists(sharp_dir)) {
        require(fs::exists(blur_dir) && fs::exists(sharp_dir),
                "dataset: blur/ and sharp/ must both be present for pairing");
        auto names = [](const fs::path& dir) {
            std::vector<std::string> out;
            for (const auto& entry : fs::directory_iterator(dir))
                if (entry.is_regular_file()) out.push_back(entry.path().filename().string());
            std::sort(out.begin(), out.end());
            return out;
        };
        const auto blur_names = names(blur_dir);
        const auto sharp_names = names(sharp_dir);
        std::size_t i = 0, j = 0;
        while (i < blur_names.size() || j < sharp_names.size()) {
            if (i < blur_names.size() && j < sharp_names.size() &&
                blur_names[i] == sharp_names[j]) {
                bundle.blur_sharp.emplace_back(blur_dir / blur_names[i], sharp_dir / sharp_names[j]);
                ++i;
                ++j;
            } else if (j >= sharp_names.size() ||
                       (i < blur_names.size() && blur_names[i] < sharp_names[j])) {
                throw ValidationError("dataset: blur/" + blur_names[i] + " has no sharp/ pair");
            } else {
                throw ValidationError("dataset: sharp/" + sharp_names[j] + " has no blur/ pair");
            }
        }
        summary += "pairs: " + std::to_string(bundle.blur_sharp.size()) + "\n";
    }

    require(bundle.frames || bundle.events || !bundle.blur_sharp.empty(),
            "dataset: nothing ingestible under " + root.string());
    bundle.summary = summary;
    return bundle;
}

PipelineManifest simulate_pipeline(const PipelineConfig& cfg) {
    require(!cfg.thetas.empty(), "simulate_pipeline: at least one theta required");
    for (double theta : cfg.thetas) require(theta > 0.0, "simulate_pipeline: theta must be > 0");
    for (double level : cfg.levels)
        require(level >= 0.0 && level <= 1.0, "simulate_pipeline: levels must be in [0,1]");

    const FrameSequence seq = load_frame_sequence(cfg.frames_dir);
    fs::create_directories(cfg.out_dir);

    std::vector<std::string> emitted;
    auto emit = [&](const std::string& name) { emitted.push_back(name); };

    write_pgm(synthesize_blur(seq), cfg.out_dir / "blur.pgm");
    emit("blur.pgm");

    for (std::size_t ti = 0; ti < cfg.thetas.size(); ++ti) {
        const double theta = cfg.thetas[ti];
        DvsConfig dvs;
        dvs.theta = theta;
        dvs.noise = cfg.noise;
        // One seed across the theta grid: common random numbers keep the
        // count-vs-theta comparison free of sampling noise.
        const EventStream stream = simulate_events(seq, dvs, cfg.seed);
        const std::string theta_tag = "theta" + format_double(theta);
        write_events(stream, cfg.out_dir / ("events_" + theta_tag + ".evt"));
        emit("events_" + theta_tag + ".evt");

        const VoxelGrid grid = encode_voxel(stream, cfg.bins);
        write_voxel(grid, cfg.out_dir / ("grid_" + theta_tag + ".vox"));
        emit("grid_" + theta_tag + ".vox");

        for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
            CounterRng rng(cfg.seed, ti, li);
            const VoxelGrid thinned =
                thin(grid,
                     survival_map_from_alpha(cfg.levels[li], grid.bins(), grid.height(),
                                             grid.width()),
                     rng.next_u64());
            const std::string name =
                "grid_" + theta_tag + "_alpha" + format_double(cfg.levels[li]) + ".vox";
            write_voxel(thinned, cfg.out_dir / name);
            emit(name);
        }
    }

    std::sort(emitted.begin(), emitted.end());
    PipelineManifest manifest;
    std::string text;
    for (const std::string& name : emitted) {
        const std::uint64_t sum = file_checksum(cfg.out_dir / name);
        manifest.files.emplace_back(name, sum);
        text += hash_hex(sum) + "  " + name + "\n";
    }
    atomic_write_text(cfg.out_dir / "manifest.txt", text);
    manifest.files.emplace_back("manifest.txt", file_checksum(cfg.out_dir / "manifest.txt"));
    return manifest;
}

namespace {

struct ResultRow {
    double level = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    bool has_ssim = true;
    double empirical_ur = 0.0;
    Index nonzero_before = 0;
    bool is_sweep = false;
};

struct ResultTable {
    std::vector<ResultRow> rows;
    bool is_sweep = false;
    SweepMode mode = SweepMode::under_report;
};

ResultTable read_result_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open result CSV: " + path.string());
    ResultTable table;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("mode=noise_inject") != std::string::npos)
                table.mode = SweepMode::noise_inject;
            continue;
        }
        if (!header_seen) {
            if (line.rfind("level,psnr,ssim", 0) == 0)
                table.is_sweep = false;
            else if (line.rfind("level,empirical_ur,", 0) == 0)
                table.is_sweep = true;
            else
                throw ValidationError(path.string() + ": unrecognized CSV header `" + line + "`");
            header_seen = true;
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) fields.push_back(tok);
        ResultRow row;
        row.is_sweep = table.is_sweep;
        if (table.is_sweep) {
            require(fields.size() >= 8, path.string() + ":" + std::to_string(line_no) +
                                            ": truncated sweep row");
            row.level = std::stod(fields[0]);
            row.empirical_ur = std::stod(fields[1]);
            row.nonzero_before = std::stoll(fields[2]);
            row.psnr = std::stod(fields[6]);
            if (fields[7] == "na")
                row.has_ssim = false;
            else
                row.ssim = std::stod(fields[7]);
        } else {
            require(fields.size() == 3, path.string() + ":" + std::to_string(line_no) +
                                            ": malformed curve row");
            row.level = std::stod(fields[0]);
            row.psnr = std::stod(fields[1]);
            row.ssim = std::stod(fields[2]);
        }
        table.rows.push_back(row);
    }
    require(header_seen, path.string() + ": empty CSV");
    return table;
}

}  // namespace

CompareReport compare_to_reference(const fs::path& result_csv, const fs::path& reference_csv) {
    const ResultTable result = read_result_table(result_csv);
    const RobustnessCurve reference = read_curve_csv(reference_csv);

    require(result.rows.size() == reference.points.size(),
            "compare: level grids differ in size (" + std::to_string(result.rows.size()) + " vs " +
                std::to_string(reference.points.size()) + ")");

    CompareReport report;
    report.result_psnr_non_increasing = true;
    report.reference_psnr_non_increasing = true;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const ResultRow& r = result.rows[i];
        const CurvePoint& ref = reference.points[i];
        require(r.level == ref.level, "compare: level grids must match exactly (at level " +
                                          format_double(r.level) + " vs " +
                                          format_double(ref.level) + ")");
        require(r.has_ssim, "compare: result row at level " + format_double(r.level) +
                                " has no ssim value");
        report.rows.push_back({r.level, r.psnr, ref.psnr, r.ssim, ref.ssim});
        report.deltas.push_back({r.level, r.psnr - ref.psnr, r.ssim - ref.ssim});
        if (i > 0) {
            if (result.rows[i].psnr > result.rows[i - 1].psnr)
                report.result_psnr_non_increasing = false;
            if (reference.points[i].psnr > reference.points[i - 1].psnr)
                report.reference_psnr_non_increasing = false;
        }
    }

    if (result.is_sweep && result.mode == SweepMode::under_report) {
        report.ur_checked = true;
        for (const ResultRow& r : result.rows) {
            const double n = static_cast<double>(r.nonzero_before);
            if (n <= 0.0) continue;
            const double tol =
                (r.level <= 0.0 || r.level >= 1.0)
                    ? 0.0
                    : 3.0 * std::sqrt(r.level * (1.0 - r.level) / n);
            if (std::abs(r.empirical_ur - r.level) > tol) {
                report.ur_ok = false;
                report.ur_failing_level = r.level;
                report.ur_message = "empirical UR " + format_double(r.empirical_ur) +
                                    " deviates from level " + format_double(r.level) +
                                    " by more than 3 sigma (" + format_double(tol) + ")";
                break;
            }
        }
    }
    return report;
}

void atomic_write_text(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw ValidationError("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint64_t file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open for checksum: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return h;
}

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

}  // namespace evrobust
