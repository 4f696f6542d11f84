#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "evrobust/event_io.hpp"
#include "evrobust/harness.hpp"
#include "evrobust/image.hpp"
#include "evrobust/metrics.hpp"
#include "evrobust/weights_io.hpp"

namespace {

using namespace evrobust;

int cmd_sweep(const std::string& config_path) {
    const LoadedSweepConfig loaded = load_sweep_config(config_path);
    const SweepResult result = run_sweep(loaded.cfg, loaded.config_hash);
    write_sweep_csv(result, loaded.cfg.out);
    std::printf("sweep: %zu levels, mode=%s, seed=%llu, config=%s\n", result.rows.size(),
                to_string(result.mode).c_str(), static_cast<unsigned long long>(result.seed),
                hash_hex(result.config_hash).c_str());
    std::printf("wrote %s\n", loaded.cfg.out.string().c_str());
    return 0;
}

int cmd_simulate(const PipelineConfig& cfg) {
    const PipelineManifest manifest = simulate_pipeline(cfg);
    std::printf("simulate: wrote %zu files under %s\n", manifest.files.size(),
                cfg.out_dir.string().c_str());
    return 0;
}

int cmd_thin(const std::string& in_path, double alpha, std::uint64_t seed,
             const std::string& out_path) {
    const VoxelGrid grid = read_voxel(in_path);
    const VoxelGrid thinned =
        thin(grid, survival_map_from_alpha(alpha, grid.bins(), grid.height(), grid.width()), seed);
    write_voxel(thinned, out_path);
    std::printf("thin: alpha=%s seed=%llu empirical_ur=%s\n", format_double(alpha).c_str(),
                static_cast<unsigned long long>(seed),
                format_double(empirical_ur(grid, thinned)).c_str());
    return 0;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path) {
    const ImageF a = read_image(a_path);
    const ImageF b = read_image(b_path);
    const PsnrResult p = psnr(a, b);
    std::printf("psnr_db=%s exact=%d\n", format_double(p.db).c_str(), p.exact_match ? 1 : 0);
    if (std::min(a.height, a.width) >= 11)
        std::printf("ssim=%s\n", format_double(ssim(a, b)).c_str());
    else
        std::printf("ssim=na\n");
    return 0;
}

int cmd_compare(const std::string& result_path, const std::string& reference_path) {
    const CompareReport report = compare_to_reference(result_path, reference_path);
    std::printf("level,result_psnr,reference_psnr,delta_psnr,result_ssim,reference_ssim,delta_ssim\n");
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const CompareRow& r = report.rows[i];
        const CurveDelta& d = report.deltas[i];
        std::printf("%s,%s,%s,%s,%s,%s,%s\n", format_double(r.level).c_str(),
                    format_double(r.result_psnr).c_str(), format_double(r.reference_psnr).c_str(),
                    format_double(d.d_psnr).c_str(), format_double(r.result_ssim).c_str(),
                    format_double(r.reference_ssim).c_str(), format_double(d.d_ssim).c_str());
    }
    std::printf("result_psnr_non_increasing=%d\n", report.result_psnr_non_increasing ? 1 : 0);
    std::printf("reference_psnr_non_increasing=%d\n", report.reference_psnr_non_increasing ? 1 : 0);
    if (report.ur_checked) {
        std::printf("ur_check=%s\n", report.ur_ok ? "pass" : "fail");
        if (!report.ur_ok) {
            std::printf("ur_failure: level %s: %s\n",
                        format_double(report.ur_failing_level).c_str(), report.ur_message.c_str());
            return 2;
        }
    }
    return 0;
}

int cmd_gen_weights(Index c, Index t, Index l, std::uint64_t seed, double scale,
                    const std::string& out_path) {
    MrmConfig cfg;
    cfg.channels_c = c;
    cfg.temporal_t = t;
    cfg.heads = l;
    const WeightsFile wf = make_random_weights(cfg, seed, scale);
    write_weights(wf, out_path);
    std::printf("gen-weights: C=%lld T=%lld L=%lld -> %s (%zu tensors)\n",
                static_cast<long long>(c), static_cast<long long>(t), static_cast<long long>(l),
                out_path.c_str(), wf.tensors.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-robustness simulation and benchmark harness"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sweep = app.add_subcommand("sweep", "run a robustness sweep from a config file");
    sweep->add_option("--config", config_path, "sweep config file")->required();

    PipelineConfig pipeline;
    std::string frames_dir, sim_out;
    auto* simulate = app.add_subcommand("simulate", "frames -> blur/events/grids/thinned grids");
    simulate->add_option("--frames", frames_dir, "frame directory (PGM + timestamps.txt)")
        ->required();
    simulate->add_option("--theta", pipeline.thetas, "contrast threshold grid")
        ->required()
        ->delimiter(',');
    simulate->add_option("--out", sim_out, "output directory")->required();
    simulate->add_option("--levels", pipeline.levels, "thinning levels")->delimiter(',');
    simulate->add_option("--bins", pipeline.bins, "voxel temporal bins");
    simulate->add_option("--lambda", pipeline.noise.lambda, "Poisson noise rate per frame interval");
    simulate->add_option("--sigma-n", pipeline.noise.sigma_n, "Gaussian noise stddev");
    simulate->add_option("--seed", pipeline.seed, "RNG seed");

    std::string thin_in, thin_out;
    double thin_alpha = 0.0;
    std::uint64_t thin_seed = 0;
    auto add_thin_options = [&](CLI::App* cmd) {
        cmd->add_option("--in", thin_in, "input VOX1 grid")->required();
        cmd->add_option("--alpha", thin_alpha, "under-reporting ratio in [0,1]")->required();
        cmd->add_option("--seed", thin_seed, "RNG seed");
        cmd->add_option("--out", thin_out, "output VOX1 grid")->required();
    };
    add_thin_options(app.add_subcommand("thin", "Bernoulli-thin a voxel grid"));
    add_thin_options(app.add_subcommand("rps-thin", "alias of `thin`"));

    std::string met_a, met_b;
    auto* metrics_cmd = app.add_subcommand("metrics", "PSNR/SSIM between two images");
    metrics_cmd->add_option("--a", met_a, "first image (PGM/PPM)")->required();
    metrics_cmd->add_option("--b", met_b, "second image (PGM/PPM)")->required();

    std::string cmp_result, cmp_reference;
    auto* compare_cmd = app.add_subcommand("compare", "compare a result CSV against a reference curve");
    compare_cmd->add_option("--result", cmp_result, "sweep or curve CSV")->required();
    compare_cmd->add_option("--reference", cmp_reference, "reference curve CSV")->required();

    Index gw_c = 4, gw_t = 2, gw_l = 2;
    std::uint64_t gw_seed = 0;
    double gw_scale = 0.05;
    std::string gw_out;
    auto* gen = app.add_subcommand("gen-weights", "emit a random MRMW1 weights file");
    gen->add_option("--channels", gw_c, "semantic channels C");
    gen->add_option("--temporal", gw_t, "temporal slots T");
    gen->add_option("--heads", gw_l, "attention heads L");
    gen->add_option("--seed", gw_seed, "RNG seed");
    gen->add_option("--scale", gw_scale, "kernel scale");
    gen->add_option("--out", gw_out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(config_path);
        if (simulate->parsed()) {
            pipeline.frames_dir = frames_dir;
            pipeline.out_dir = sim_out;
            return cmd_simulate(pipeline);
        }
        if (app.got_subcommand("thin") || app.got_subcommand("rps-thin"))
            return cmd_thin(thin_in, thin_alpha, thin_seed, thin_out);
        if (metrics_cmd->parsed()) return cmd_metrics(met_a, met_b);
        if (compare_cmd->parsed()) return cmd_compare(cmp_result, cmp_reference);
        if (gen->parsed()) return cmd_gen_weights(gw_c, gw_t, gw_l, gw_seed, gw_scale, gw_out);
    } catch (const InvariantFailure& e) {
        std::fprintf(stderr, "invariant failure: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
