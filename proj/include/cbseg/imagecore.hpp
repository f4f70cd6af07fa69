#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace cbseg {

// Dense 8-bit raster, row-major, interleaved channels (1 = gray, 3 = RGB).
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * height * channels, fill) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("Frame: dimensions must be >= 1");
        if (channels != 1 && channels != 3)
            throw std::invalid_argument("Frame: channel count must be 1 or 3");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    const std::uint8_t* row(int y) const {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }
    std::uint8_t* row(int y) {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }

    const std::vector<std::uint8_t>& data() const { return data_; }
    std::vector<std::uint8_t>& data() { return data_; }

    bool same_size(const Frame& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

// Per-pixel foreground/background labeling. Stored as 0 (background) and
// 255 (foreground) so masks map directly onto the mask file format.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height, bool foreground = false)
        : width_(width), height_(height),
          labels_(static_cast<std::size_t>(width) * height, foreground ? kFg : kBg) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("BinaryMask: dimensions must be >= 1");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return labels_.empty(); }

    bool foreground(int x, int y) const {
        return labels_[static_cast<std::size_t>(y) * width_ + x] != kBg;
    }
    void set(int x, int y, bool fg) {
        labels_[static_cast<std::size_t>(y) * width_ + x] = fg ? kFg : kBg;
    }

    const std::uint8_t* row(int y) const {
        return labels_.data() + static_cast<std::size_t>(y) * width_;
    }
    std::uint8_t* row(int y) {
        return labels_.data() + static_cast<std::size_t>(y) * width_;
    }

    const std::vector<std::uint8_t>& labels() const { return labels_; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : labels_)
            n += (v != kBg);
        return n;
    }

    bool same_size(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const BinaryMask& other) const {
        return width_ == other.width_ && height_ == other.height_ && labels_ == other.labels_;
    }

    static constexpr std::uint8_t kBg = 0;
    static constexpr std::uint8_t kFg = 255;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> labels_;
};

/// BT.601 luma conversion, rounded half-up. Rejects single-channel input.
Frame to_grayscale(const Frame& frame);

// RGB triple lifted to doubles; model arithmetic runs in 64-bit throughout.
struct Vec3 {
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
};

inline Vec3 pixel_rgb(const Frame& frame, int x, int y) {
    return {static_cast<double>(frame.at(x, y, 0)),
            static_cast<double>(frame.at(x, y, 1)),
            static_cast<double>(frame.at(x, y, 2))};
}

} // namespace cbseg
