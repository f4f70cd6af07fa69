#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbseg/codebook.hpp"
#include "cbseg/edges.hpp"
#include "cbseg/evaluation.hpp"
#include "cbseg/mog.hpp"

namespace cbseg {

enum class Method { cb, mog, cb_sobel, cb_log, cb_canny };

std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);
bool is_fused(Method method);

/// Configuration problems; the CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Per-frame intermediates handed to the observer. t1/t2 are null for
// non-fused methods.
struct FrameArtifacts {
    int index = 0; // absolute frame index
    const BinaryMask* psi = nullptr;
    const BinaryMask* t1 = nullptr;
    const BinaryMask* t2 = nullptr;
    const BinaryMask* result = nullptr;
};

struct PipelineConfig {
    std::filesystem::path input_dir;
    std::string pattern = "in%06d.jpg";
    int first = 1;
    std::optional<int> last;         // unset: probe the directory
    std::optional<int> train_frames; // unset: frames before the temporal ROI
    Method method = Method::cb;
    CodebookParams cb;
    MogParams mog;
    EdgeParams edges;
    std::optional<std::filesystem::path> gt_dir;
    std::string gt_pattern = "gt%06d.png";
    std::optional<std::filesystem::path> out_dir;
    std::string out_pattern = "bin%06d.png";
    std::optional<std::filesystem::path> report_path;
    std::string dataset_name = "dataset";
    std::size_t min_hull_area = 0;
    bool macro_average = false;
    bool timing = false;
    int threads = 0;
    std::optional<std::filesystem::path> save_model_path;
    std::optional<std::filesystem::path> load_model_path;
    std::function<void(const FrameArtifacts&)> frame_observer;
};

struct RunResult {
    int frames_segmented = 0;
    int frames_evaluated = 0;
    ConfusionCounts totals;
    std::optional<MetricsReport> report;  // present when ground truth was evaluated
    std::optional<double> mean_seg_ms;    // present when config.timing is set
};

// Full pipeline: train (or load) the model on the first N frames, then for
// every later frame produce the segmentation, write the mask, and accumulate
// ground-truth confusion within the temporal ROI.
RunResult run(const PipelineConfig& config);

struct TimingReport {
    struct Row {
        Method method = Method::cb;
        double mean_frame_ms = 0.0;
        std::optional<double> overhead_pct; // fused methods, relative to plain cb
    };
    std::vector<Row> rows;
};

// Times the per-frame segmentation call (file I/O excluded) over the shared
// frame set: one warm-up pass per method, then `repetitions` measured passes,
// reporting the median of the per-pass means. Requires repetitions >= 3.
TimingReport benchmark(const PipelineConfig& config, int repetitions,
                       const std::vector<Method>& methods = {Method::cb, Method::cb_sobel,
                                                             Method::cb_log, Method::cb_canny});

std::string render_timing(const TimingReport& report);

} // namespace cbseg
