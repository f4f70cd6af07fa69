#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cbseg/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_dataset_name(const fs::path& input_dir) {
    fs::path dir = input_dir;
    if (dir.filename().empty())
        dir = dir.parent_path();
    std::string name = dir.filename().string();
    if (name == "input" && !dir.parent_path().filename().empty())
        name = dir.parent_path().filename().string();
    return name.empty() ? "dataset" : name;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Foreground-background segmentation: codebook model fused with edge "
                 "detection, plus a mixture-of-gaussians baseline"};
    app.set_config("--config", "", "Config file mirroring the flags (key=value); flags override");

    std::string input, pattern = "in%06d.jpg", method_str = "cb";
    std::string gt_dir, out_dir, report, dataset, preset, save_model_path, load_model_path;
    int train = 0, first = 1, last = 0, bench = 0, threads = 0;
    std::size_t min_area = 0;
    bool macro = false, timing = false;
    cbseg::CodebookParams cb;
    cbseg::MogParams mog;
    cbseg::EdgeParams edges;
    double canny_low = -1.0, canny_high = -1.0;

    app.add_option("--input", input, "Input frame directory")->required();
    app.add_option("--pattern", pattern, "Frame filename template")->capture_default_str();
    app.add_option("--train", train, "Training frame count N");
    app.add_option("--method", method_str, "cb | mog | cb+sobel | cb+log | cb+canny")->capture_default_str();
    app.add_option("--epsilon", cb.epsilon, "Codebook color-distortion threshold")->capture_default_str();
    app.add_option("--alpha", cb.alpha, "Codebook brightness lower-bound factor")->capture_default_str();
    app.add_option("--beta", cb.beta, "Codebook brightness upper-bound factor")->capture_default_str();
    app.add_option("--theta", edges.theta, "Edge threshold selectivity in [0,1]")->capture_default_str();
    app.add_option("--gt", gt_dir, "Ground-truth directory (gt%06d.png)");
    app.add_option("--out", out_dir, "Mask output directory (bin%06d.png)");
    app.add_option("--report", report, "Metrics CSV path");
    app.add_option("--bench", bench, "Benchmark mode with this many repetitions");
    app.add_option("--preset", preset, "canoe | fountain01 (per-dataset defaults)");
    app.add_option("--first", first, "First frame index")->capture_default_str();
    app.add_option("--last", last, "Last frame index (default: probe the directory)");
    app.add_option("--dataset", dataset, "Dataset name for reports (default: input dir name)");
    app.add_option("--threads", threads, "Worker threads (0 = hardware)")->capture_default_str();
    app.add_option("--min-area", min_area, "Skip components below this pixel count before hulling")->capture_default_str();
    app.add_flag("--macro", macro, "Macro-average metrics over frames instead of summing counts");
    app.add_flag("--timing", timing, "Report mean per-frame segmentation time");
    app.add_option("--prune-factor", cb.mnrl_prune_factor, "MNRL prune factor (fraction of N)")->capture_default_str();
    app.add_option("--cache-promote", cb.cache_promote_freq, "Cache hits required for promotion")->capture_default_str();
    app.add_option("--cache-stale", cb.cache_stale_frames, "Frames before an unmatched cache word is dropped")->capture_default_str();
    app.add_option("--log-sigma", edges.log_sigma, "Laplacian-of-Gaussian scale")->capture_default_str();
    app.add_option("--canny-sigma", edges.canny_sigma, "Canny smoothing scale")->capture_default_str();
    app.add_option("--canny-low", canny_low, "Canny low hysteresis threshold (default: 0.4*Otsu)");
    app.add_option("--canny-high", canny_high, "Canny high hysteresis threshold (default: Otsu)");
    app.add_option("--mog-alpha", mog.learning_rate, "MoG learning rate")->capture_default_str();
    app.add_option("--mog-rho", mog.second_rate, "MoG mean/variance blend rate")->capture_default_str();
    app.add_option("--mog-k", mog.component_count, "MoG component count")->capture_default_str();
    app.add_option("--mog-t", mog.background_fraction, "MoG background weight fraction")->capture_default_str();
    app.add_option("--mog-sigma", mog.match_sigma, "MoG match radius in standard deviations")->capture_default_str();
    app.add_option("--save-model", save_model_path, "Write the trained model dump here");
    app.add_option("--load-model", load_model_path, "Load a model dump instead of training");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!preset.empty()) {
            double preset_theta;
            if (preset == "canoe")
                preset_theta = 0.85;
            else if (preset == "fountain01")
                preset_theta = 0.80;
            else
                throw cbseg::ConfigError("unknown preset: " + preset);
            // Presets fill in only what the user left untouched.
            if (app.count("--theta") == 0)
                edges.theta = preset_theta;
            if (app.count("--alpha") == 0)
                cb.alpha = 0.4;
            if (app.count("--beta") == 0)
                cb.beta = 1.25;
        }

        const auto method = cbseg::parse_method(method_str);
        if (!method)
            throw cbseg::ConfigError("unknown method: " + method_str);

        cbseg::PipelineConfig config;
        config.input_dir = input;
        config.pattern = pattern;
        config.first = first;
        if (app.count("--last") > 0)
            config.last = last;
        if (app.count("--train") > 0)
            config.train_frames = train;
        config.method = *method;
        config.cb = cb;
        config.mog = mog;
        config.edges = edges;
        if (canny_low >= 0.0)
            config.edges.canny_low = canny_low;
        if (canny_high >= 0.0)
            config.edges.canny_high = canny_high;
        if (!gt_dir.empty())
            config.gt_dir = gt_dir;
        if (!out_dir.empty())
            config.out_dir = out_dir;
        if (!report.empty())
            config.report_path = report;
        config.dataset_name = dataset.empty() ? default_dataset_name(config.input_dir) : dataset;
        config.min_hull_area = min_area;
        config.macro_average = macro;
        config.timing = timing;
        config.threads = threads;
        if (!save_model_path.empty())
            config.save_model_path = save_model_path;
        if (!load_model_path.empty())
            config.load_model_path = load_model_path;

        if (bench > 0) {
            const cbseg::TimingReport t = cbseg::benchmark(config, bench);
            std::cout << cbseg::render_timing(t);
            return 0;
        }

        const cbseg::RunResult result = cbseg::run(config);
        std::cout << "frames segmented: " << result.frames_segmented << "\n";
        if (result.report) {
            std::cout << "frames evaluated: " << result.frames_evaluated << "\n";
            std::cout << cbseg::render_table(
                {{config.dataset_name, cbseg::method_name(config.method), *result.report}});
        }
        if (result.mean_seg_ms)
            std::cout << "segmentation: " << *result.mean_seg_ms << " ms/frame\n";
        return 0;
    } catch (const cbseg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
