#include "cbseg/pipeline.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <sstream>
#include <variant>

#include "cbseg/geometry.hpp"
#include "cbseg/image_io.hpp"
#include "cbseg/model_io.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace cbseg {

namespace {

#ifndef NDEBUG
bool mask_subset(const BinaryMask& a, const BinaryMask& b) {
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x)
            if (a.foreground(x, y) && !b.foreground(x, y))
                return false;
    return true;
}
#endif

struct ResolvedConfig {
    int last = 0;
    int train_frames = 0;
    std::optional<std::pair<int, int>> temporal_roi;
};

std::optional<fs::path> find_temporal_roi_file(const PipelineConfig& config) {
    std::vector<fs::path> candidates;
    if (config.gt_dir) {
        candidates.push_back(*config.gt_dir / "temporalROI.txt");
        candidates.push_back(config.gt_dir->parent_path() / "temporalROI.txt");
    }
    candidates.push_back(config.input_dir / "temporalROI.txt");
    candidates.push_back(config.input_dir.parent_path() / "temporalROI.txt");
    for (const fs::path& p : candidates)
        if (fs::exists(p))
            return p;
    return std::nullopt;
}

void validate_config(const PipelineConfig& config) {
    try {
        config.cb.validate();
        config.mog.validate();
        format_sequence_name(config.pattern, config.first);
        if (is_fused(config.method)) {
            if (config.edges.theta < 0.0 || config.edges.theta > 1.0)
                throw std::invalid_argument("theta must be in [0, 1]");
            if (config.edges.log_sigma <= 0.0 || config.edges.canny_sigma <= 0.0)
                throw std::invalid_argument("edge sigmas must be positive");
            if (config.edges.canny_low && config.edges.canny_high &&
                *config.edges.canny_low > *config.edges.canny_high)
                throw std::invalid_argument("canny low threshold exceeds high threshold");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!fs::is_directory(config.input_dir))
        throw ConfigError("input directory does not exist: " + config.input_dir.string());
}

ResolvedConfig resolve(const PipelineConfig& config, std::optional<int> model_train_frames) {
    validate_config(config);

    ResolvedConfig r;
    if (config.last) {
        r.last = *config.last;
    } else {
        const auto probed = probe_sequence_end(config.input_dir, config.pattern, config.first);
        if (!probed)
            throw ConfigError("no frames matching " + config.pattern + " in " +
                              config.input_dir.string());
        r.last = *probed;
    }

    if (const auto roi_file = find_temporal_roi_file(config))
        r.temporal_roi = read_temporal_roi(*roi_file);

    if (model_train_frames) {
        r.train_frames = *model_train_frames; // loaded models fix the window
        if (r.train_frames < 0)
            throw ConfigError("train frame count must be >= 0");
    } else {
        if (config.train_frames) {
            r.train_frames = *config.train_frames;
        } else if (r.temporal_roi && r.temporal_roi->first > config.first) {
            // Default to everything before the evaluated window.
            r.train_frames = r.temporal_roi->first - config.first;
        } else {
            throw ConfigError("train frame count not given and no temporal ROI to derive it from");
        }
        if (r.train_frames < 1)
            throw ConfigError("train frame count must be >= 1");
    }

    const int total = r.last - config.first + 1;
    if (config.gt_dir && total <= r.train_frames)
        throw ConfigError("sequence too short: " + std::to_string(total) +
                          " frames with train window " + std::to_string(r.train_frames));
    return r;
}

using Model = std::variant<CodebookModel, MogModel>;

// One segmentation step; everything inside is what the timing covers.
BinaryMask segment_frame(Model& model, const Frame& frame, int t_rel, const PipelineConfig& config,
                         BinaryMask* psi_out, BinaryMask* t1_out, BinaryMask* t2_out) {
    BinaryMask psi = std::holds_alternative<CodebookModel>(model)
                         ? std::get<CodebookModel>(model).segment(frame, t_rel, config.threads)
                         : std::get<MogModel>(model).segment(frame, config.threads);
    if (!is_fused(config.method)) {
        if (psi_out)
            *psi_out = psi;
        return psi;
    }
    EdgeParams edge_params = config.edges;
    edge_params.threads = config.threads;
    const Frame gray = to_grayscale(frame);
    const ResponseImage response = detect_edges(gray, edge_params);
    const BinaryMask omega = threshold(response, edge_params.theta);
    BinaryMask t1 = fill_hulls(psi, config.min_hull_area);
    BinaryMask t2 = fill_hulls(omega, config.min_hull_area);
    BinaryMask r = intersect(t1, t2);
    assert(mask_subset(r, t1) && mask_subset(r, t2));
    if (psi_out)
        *psi_out = std::move(psi);
    if (t1_out)
        *t1_out = std::move(t1);
    if (t2_out)
        *t2_out = std::move(t2);
    return r;
}

Model build_model(const PipelineConfig& config, int width, int height, int train_frames) {
    if (config.method == Method::mog)
        return MogModel(width, height, config.mog);
    CodebookParams p = config.cb;
    p.train_frames = train_frames;
    return CodebookModel(width, height, p);
}

} // namespace

std::string method_name(Method method) {
    switch (method) {
    case Method::cb:
        return "cb";
    case Method::mog:
        return "mog";
    case Method::cb_sobel:
        return "cb+sobel";
    case Method::cb_log:
        return "cb+log";
    case Method::cb_canny:
        return "cb+canny";
    }
    return "?";
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "cb")
        return Method::cb;
    if (name == "mog")
        return Method::mog;
    if (name == "cb+sobel")
        return Method::cb_sobel;
    if (name == "cb+log")
        return Method::cb_log;
    if (name == "cb+canny")
        return Method::cb_canny;
    return std::nullopt;
}

bool is_fused(Method method) {
    return method == Method::cb_sobel || method == Method::cb_log || method == Method::cb_canny;
}

RunResult run(const PipelineConfig& config) {
    validate_config(config); // reject bad configurations before touching data
    std::optional<int> model_train_frames;
    std::optional<Model> loaded;
    if (config.load_model_path) {
        const ModelKind kind = peek_model_kind(*config.load_model_path);
        if ((kind == ModelKind::mog) != (config.method == Method::mog))
            throw ConfigError("model dump kind does not match --method: " +
                              config.load_model_path->string());
        if (config.method == Method::mog) {
            loaded = load_mog_model(*config.load_model_path);
            // A mixture dump carries no training count; by default resume
            // segmenting from the first frame of the range.
            model_train_frames = config.train_frames.value_or(0);
        } else {
            CodebookModel m = load_codebook_model(*config.load_model_path);
            model_train_frames = m.params().train_frames;
            loaded = std::move(m);
        }
    }

    const ResolvedConfig rc = resolve(config, model_train_frames);
    const int n = rc.train_frames;
    SequenceReader reader(config.input_dir, config.pattern, config.first, rc.last);

    // Detector selection applied through config.edges.detector must agree
    // with the method.
    PipelineConfig cfg = config;
    if (config.method == Method::cb_sobel)
        cfg.edges.detector = Detector::sobel;
    else if (config.method == Method::cb_log)
        cfg.edges.detector = Detector::log;
    else if (config.method == Method::cb_canny)
        cfg.edges.detector = Detector::canny;

    std::optional<Model> model;
    if (loaded) {
        model = std::move(*loaded);
        // Frames inside the training window were consumed by the saved model.
        reader.skip_to(config.first + n);
    } else {
        std::optional<Frame> first_frame = reader.next();
        if (!first_frame)
            throw ConfigError("empty sequence");
        model = build_model(cfg, first_frame->width(), first_frame->height(), n);
        int t_rel = 1;
        std::optional<Frame> frame = std::move(first_frame);
        while (frame && t_rel <= n) {
            if (std::holds_alternative<CodebookModel>(*model))
                std::get<CodebookModel>(*model).observe_training_frame(*frame, t_rel, cfg.threads);
            else
                std::get<MogModel>(*model).segment(*frame, cfg.threads); // warm-up, mask discarded
            ++t_rel;
            if (t_rel <= n)
                frame = reader.next();
        }
        if (t_rel <= n)
            throw ConfigError("sequence shorter than the training window");
        if (std::holds_alternative<CodebookModel>(*model))
            std::get<CodebookModel>(*model).finalize_training(cfg.threads);
    }

    if (config.save_model_path) {
        if (std::holds_alternative<CodebookModel>(*model))
            save_model(std::get<CodebookModel>(*model), *config.save_model_path);
        else
            save_model(std::get<MogModel>(*model), *config.save_model_path);
    }

    if (config.out_dir)
        fs::create_directories(*config.out_dir);

    RunResult result;
    std::vector<ConfusionCounts> per_frame;
    double seg_ms_total = 0.0;

    const bool want_artifacts = static_cast<bool>(config.frame_observer);
    while (auto frame = reader.next()) {
        const int abs_index = reader.current_index() - 1;
        const int t_rel = abs_index - config.first + 1;

        BinaryMask psi, t1, t2;
        const auto start = Clock::now();
        const BinaryMask r = segment_frame(*model, *frame, t_rel, cfg,
                                           want_artifacts ? &psi : nullptr,
                                           want_artifacts ? &t1 : nullptr,
                                           want_artifacts ? &t2 : nullptr);
        seg_ms_total += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        ++result.frames_segmented;

        if (config.out_dir)
            write_mask(r, *config.out_dir / format_sequence_name(config.out_pattern, abs_index));

        const bool in_window = !rc.temporal_roi || (abs_index >= rc.temporal_roi->first &&
                                                    abs_index <= rc.temporal_roi->second);
        if (config.gt_dir && in_window) {
            const Frame truth = load_groundtruth(*config.gt_dir, abs_index, config.gt_pattern);
            const ConfusionCounts c = confusion(r, truth);
            // A frame whose truth is entirely excluded contributes nothing.
            if (c.total() > 0) {
                per_frame.push_back(c);
                result.totals += c;
                ++result.frames_evaluated;
            }
        }

        if (want_artifacts) {
            FrameArtifacts art;
            art.index = abs_index;
            art.psi = &psi;
            art.t1 = is_fused(cfg.method) ? &t1 : nullptr;
            art.t2 = is_fused(cfg.method) ? &t2 : nullptr;
            art.result = &r;
            config.frame_observer(art);
        }
    }

    if (!per_frame.empty())
        result.report = aggregate(per_frame, config.macro_average);
    if (config.timing && result.frames_segmented > 0)
        result.mean_seg_ms = seg_ms_total / result.frames_segmented;

    if (config.report_path) {
        std::vector<ReportRow> rows;
        if (result.report)
            rows.push_back({config.dataset_name, method_name(config.method), *result.report});
        write_csv(*config.report_path, rows);
    }
    return result;
}

TimingReport benchmark(const PipelineConfig& config, int repetitions,
                       const std::vector<Method>& methods) {
    if (repetitions < 3)
        throw ConfigError("benchmark needs at least 3 repetitions");
    const ResolvedConfig rc = resolve(config, std::nullopt);
    const int n = rc.train_frames;

    SequenceReader reader(config.input_dir, config.pattern, config.first, rc.last);
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(reader.total()));
    while (auto f = reader.next())
        frames.push_back(std::move(*f));
    if (static_cast<int>(frames.size()) <= n)
        throw ConfigError("sequence too short to benchmark past the training window");

    // Shared trained models; each pass runs on a fresh copy so every
    // repetition sees identical state.
    std::optional<CodebookModel> trained_cb;
    std::optional<MogModel> trained_mog;
    for (Method m : methods) {
        if (m != Method::mog && !trained_cb) {
            CodebookParams p = config.cb;
            p.train_frames = n;
            trained_cb = train_codebook(std::vector<Frame>(frames.begin(), frames.begin() + n), p,
                                        config.threads);
        }
        if (m == Method::mog && !trained_mog) {
            trained_mog = MogModel(frames.front().width(), frames.front().height(), config.mog);
            for (int i = 0; i < n; ++i)
                trained_mog->segment(frames[i], config.threads);
        }
    }

    std::vector<PipelineConfig> cfgs;
    for (Method m : methods) {
        PipelineConfig cfg = config;
        cfg.method = m;
        if (m == Method::cb_sobel)
            cfg.edges.detector = Detector::sobel;
        else if (m == Method::cb_log)
            cfg.edges.detector = Detector::log;
        else if (m == Method::cb_canny)
            cfg.edges.detector = Detector::canny;
        cfgs.push_back(std::move(cfg));
    }

    auto one_pass = [&](const PipelineConfig& cfg) {
        Model model = (cfg.method == Method::mog) ? Model(*trained_mog) : Model(*trained_cb);
        double total_ms = 0.0;
        int count = 0;
        for (std::size_t i = static_cast<std::size_t>(n); i < frames.size(); ++i) {
            const int t_rel = static_cast<int>(i) + 1;
            const auto start = Clock::now();
            segment_frame(model, frames[i], t_rel, cfg, nullptr, nullptr, nullptr);
            total_ms += std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            ++count;
        }
        return total_ms / count;
    };

    // Repetitions are interleaved across methods so load drift during the
    // benchmark biases every method alike rather than whichever ran last.
    std::vector<std::vector<double>> means(cfgs.size());
    for (int rep = 0; rep <= repetitions; ++rep) { // round 0 is the warm-up
        for (std::size_t mi = 0; mi < cfgs.size(); ++mi) {
            const double mean = one_pass(cfgs[mi]);
            if (rep > 0)
                means[mi].push_back(mean);
        }
    }

    TimingReport report;
    double cb_mean = 0.0;
    for (std::size_t mi = 0; mi < cfgs.size(); ++mi) {
        std::sort(means[mi].begin(), means[mi].end());
        const std::size_t k = means[mi].size();
        const double median =
            k % 2 == 1 ? means[mi][k / 2] : 0.5 * (means[mi][k / 2 - 1] + means[mi][k / 2]);
        TimingReport::Row row;
        row.method = methods[mi];
        row.mean_frame_ms = median;
        report.rows.push_back(row);
        if (methods[mi] == Method::cb)
            cb_mean = median;
    }
    if (cb_mean > 0.0) {
        for (auto& row : report.rows)
            if (is_fused(row.method))
                row.overhead_pct = (row.mean_frame_ms - cb_mean) / cb_mean * 100.0;
    }
    return report;
}

std::string render_timing(const TimingReport& report) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof(line), "%-10s %14s %12s\n", "method", "ms/frame", "overhead");
    out << line;
    for (const auto& row : report.rows) {
        if (row.overhead_pct)
            std::snprintf(line, sizeof(line), "%-10s %14.3f %11.2f%%\n",
                          method_name(row.method).c_str(), row.mean_frame_ms, *row.overhead_pct);
        else
            std::snprintf(line, sizeof(line), "%-10s %14.3f %12s\n",
                          method_name(row.method).c_str(), row.mean_frame_ms, "");
        out << line;
    }
    return out.str();
}

} // namespace cbseg
