#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cbseg/imagecore.hpp"

namespace cbseg {

// Decodes a PNG or JPEG file (detected by magic bytes) into an 8-bit frame
// with 1 or 3 channels. Palette/alpha/16-bit PNGs are expanded or stripped
// down to 8-bit gray or RGB.
Frame read_image(const std::filesystem::path& path);

void write_png(const Frame& frame, const std::filesystem::path& path);
void write_jpeg(const Frame& frame, const std::filesystem::path& path, int quality = 95);

/// Writes a mask as single-channel PNG, foreground=255, background=0.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

/// Reads a mask written by write_mask; any nonzero sample is foreground.
BinaryMask read_mask(const std::filesystem::path& path);

// Expands a printf-style template like "in%06d.jpg" for one frame index.
// The template must contain exactly one %d conversion (zero-padding allowed).
std::string format_sequence_name(const std::string& pattern, int index);

// Streams the frames dir/pattern(first) .. dir/pattern(last) in index order.
// A missing file raises an error naming the index; a mid-sequence dimension
// change is a hard error. An inverted range yields an empty stream.
class SequenceReader {
public:
    SequenceReader(std::filesystem::path directory, std::string pattern, int first, int last);

    /// Next frame, or nullopt once the range is exhausted.
    std::optional<Frame> next();

    void reset() { next_ = first_; }
    /// Jump so the next yielded frame has the given index; no files are read.
    void skip_to(int index) { next_ = index; }
    int total() const { return last_ >= first_ ? last_ - first_ + 1 : 0; }
    int first_index() const { return first_; }
    int last_index() const { return last_; }
    /// Index of the frame the next call to next() will yield.
    int current_index() const { return next_; }

private:
    std::filesystem::path directory_;
    std::string pattern_;
    int first_;
    int last_;
    int next_;
    int ref_width_ = 0;
    int ref_height_ = 0;
};

/// Largest index n >= first such that all of pattern(first..n) exist, or
/// nullopt when even pattern(first) is missing.
std::optional<int> probe_sequence_end(const std::filesystem::path& directory,
                                      const std::string& pattern, int first);

} // namespace cbseg
