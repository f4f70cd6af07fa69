#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    std::uint64_t total() const { return tp + fp + fn + tn; }
    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

// changedetection.net 2012 label alphabet. Shadow counts as negative;
// outside-ROI and unknown pixels are excluded from the confusion counts.
namespace gt_label {
constexpr std::uint8_t kNegative = 0;
constexpr std::uint8_t kShadow = 50;
constexpr std::uint8_t kOutsideRoi = 85;
constexpr std::uint8_t kUnknown = 170;
constexpr std::uint8_t kPositive = 255;
} // namespace gt_label

// Per-pixel comparison of a system mask against a labeled truth frame.
// Pixels outside the optional ROI mask are skipped. Labels outside the
// alphabet above raise an error (garbled file).
ConfusionCounts confusion(const BinaryMask& mask, const Frame& truth, const BinaryMask* roi = nullptr);

// The six ratio metrics as fractions in [0, 1]; a zero-denominator metric is
// left unset rather than reported as 0.
struct MetricsReport {
    std::optional<double> fpr;
    std::optional<double> tpr;
    std::optional<double> pr;
    std::optional<double> fm;
    std::optional<double> pcc;
    std::optional<double> jc;
};

/// Throws on all-zero counts.
MetricsReport metrics(const ConfusionCounts& c);

// Micro-averaging sums counts over frames before computing ratios; macro
// averages each metric over the frames where it is defined.
MetricsReport aggregate(const std::vector<ConfusionCounts>& per_frame, bool macro = false);

/// Loads gt%06d.png (label values preserved; RGB files must be gray-valued).
Frame load_groundtruth(const std::filesystem::path& directory, int index,
                       const std::string& pattern = "gt%06d.png");

/// First/last evaluated frame from a temporalROI.txt, or nullopt if absent.
std::optional<std::pair<int, int>> read_temporal_roi(const std::filesystem::path& file);

struct ReportRow {
    std::string dataset;
    std::string method;
    MetricsReport m;
};

/// "12.34" (percent, two decimals) or an em dash for undefined.
std::string format_percent(const std::optional<double>& fraction);

std::string render_table(const std::vector<ReportRow>& rows);

/// Schema: dataset,method,FPR,TPR,PR,FM,PCC,JC — percentages, 2 decimals.
void write_csv(const std::filesystem::path& path, const std::vector<ReportRow>& rows);

} // namespace cbseg
