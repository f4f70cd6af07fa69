#include "cbseg/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cbseg/image_io.hpp"

namespace fs = std::filesystem;

namespace cbseg {

ConfusionCounts confusion(const BinaryMask& mask, const Frame& truth, const BinaryMask* roi) {
    if (truth.channels() != 1)
        throw std::invalid_argument("confusion: truth frame must be single-channel");
    if (mask.width() != truth.width() || mask.height() != truth.height())
        throw std::invalid_argument("confusion: dimension mismatch");
    if (roi && !mask.same_size(*roi))
        throw std::invalid_argument("confusion: ROI dimension mismatch");

    ConfusionCounts c;
    for (int y = 0; y < mask.height(); ++y) {
        const std::uint8_t* mrow = mask.row(y);
        const std::uint8_t* trow = truth.row(y);
        for (int x = 0; x < mask.width(); ++x) {
            if (roi && !roi->foreground(x, y))
                continue;
            bool truth_fg;
            switch (trow[x]) {
            case gt_label::kPositive:
                truth_fg = true;
                break;
            case gt_label::kNegative:
            case gt_label::kShadow:
                truth_fg = false;
                break;
            case gt_label::kOutsideRoi:
            case gt_label::kUnknown:
                continue;
            default:
                throw std::runtime_error("confusion: unexpected ground-truth label " +
                                         std::to_string(static_cast<int>(trow[x])));
            }
            const bool mask_fg = mrow[x] != BinaryMask::kBg;
            if (mask_fg && truth_fg)
                ++c.tp;
            else if (mask_fg && !truth_fg)
                ++c.fp;
            else if (!mask_fg && truth_fg)
                ++c.fn;
            else
                ++c.tn;
        }
    }
    return c;
}

MetricsReport metrics(const ConfusionCounts& c) {
    if (c.total() == 0)
        throw std::invalid_argument("metrics: all-zero confusion counts");
    const double tp = static_cast<double>(c.tp);
    const double fp = static_cast<double>(c.fp);
    const double fn = static_cast<double>(c.fn);
    const double tn = static_cast<double>(c.tn);

    MetricsReport r;
    if (c.tn + c.fp > 0)
        r.fpr = 1.0 - tn / (tn + fp);
    if (c.tp + c.fn > 0)
        r.tpr = tp / (tp + fn);
    if (c.tp + c.fp > 0)
        r.pr = tp / (tp + fp);
    if (r.pr && r.tpr && *r.pr + *r.tpr > 0.0)
        r.fm = 2.0 * *r.pr * *r.tpr / (*r.pr + *r.tpr);
    r.pcc = (tp + tn) / static_cast<double>(c.total());
    if (c.tp + c.fp + c.fn > 0)
        r.jc = tp / (tp + fp + fn);
    return r;
}

MetricsReport aggregate(const std::vector<ConfusionCounts>& per_frame, bool macro) {
    if (per_frame.empty())
        throw std::invalid_argument("aggregate: empty frame list");
    if (!macro) {
        ConfusionCounts sum;
        for (const ConfusionCounts& c : per_frame)
            sum += c;
        return metrics(sum);
    }
    // Macro: average each metric over the frames where it is defined.
    MetricsReport out;
    auto fold = [&per_frame](std::optional<double> MetricsReport::* field) -> std::optional<double> {
        double acc = 0.0;
        std::size_t n = 0;
        for (const ConfusionCounts& c : per_frame) {
            const MetricsReport r = metrics(c);
            if (r.*field) {
                acc += *(r.*field);
                ++n;
            }
        }
        if (n == 0)
            return std::nullopt;
        return acc / static_cast<double>(n);
    };
    out.fpr = fold(&MetricsReport::fpr);
    out.tpr = fold(&MetricsReport::tpr);
    out.pr = fold(&MetricsReport::pr);
    out.fm = fold(&MetricsReport::fm);
    out.pcc = fold(&MetricsReport::pcc);
    out.jc = fold(&MetricsReport::jc);
    return out;
}

Frame load_groundtruth(const fs::path& directory, int index, const std::string& pattern) {
    const fs::path path = directory / format_sequence_name(pattern, index);
    if (!fs::exists(path))
        throw std::runtime_error("missing ground truth " + std::to_string(index) + ": " + path.string());
    Frame img = read_image(path);
    if (img.channels() == 1)
        return img;
    // Some tools save label images as RGB; accept them when gray-valued.
    Frame gray(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const std::uint8_t r = img.at(x, y, 0);
            if (img.at(x, y, 1) != r || img.at(x, y, 2) != r)
                throw std::runtime_error("ground truth is not a label image: " + path.string());
            gray.at(x, y) = r;
        }
    }
    return gray;
}

std::optional<std::pair<int, int>> read_temporal_roi(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        return std::nullopt;
    int first = 0, last = 0;
    if (!(in >> first >> last))
        throw std::runtime_error("malformed temporal ROI file: " + file.string());
    return std::make_pair(first, last);
}

std::string format_percent(const std::optional<double>& fraction) {
    if (!fraction)
        return "—";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *fraction * 100.0);
    return buf;
}

std::string render_table(const std::vector<ReportRow>& rows) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-14s %-10s %8s %8s %8s %8s %8s %8s\n",
                  "dataset", "method", "FPR", "TPR", "PR", "FM", "PCC", "JC");
    out << line;
    for (const ReportRow& r : rows) {
        std::snprintf(line, sizeof(line), "%-14s %-10s %8s %8s %8s %8s %8s %8s\n",
                      r.dataset.c_str(), r.method.c_str(),
                      format_percent(r.m.fpr).c_str(), format_percent(r.m.tpr).c_str(),
                      format_percent(r.m.pr).c_str(), format_percent(r.m.fm).c_str(),
                      format_percent(r.m.pcc).c_str(), format_percent(r.m.jc).c_str());
        out << line;
    }
    return out.str();
}

void write_csv(const fs::path& path, const std::vector<ReportRow>& rows) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write report: " + path.string());
    out << "dataset,method,FPR,TPR,PR,FM,PCC,JC\n";
    for (const ReportRow& r : rows) {
        out << r.dataset << ',' << r.method << ',' << format_percent(r.m.fpr) << ','
            << format_percent(r.m.tpr) << ',' << format_percent(r.m.pr) << ','
            << format_percent(r.m.fm) << ',' << format_percent(r.m.pcc) << ','
            << format_percent(r.m.jc) << '\n';
    }
    if (!out.flush())
        throw std::runtime_error("cannot write report: " + path.string());
}

} // namespace cbseg
