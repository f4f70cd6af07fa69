#pragma once

#include <optional>
#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

struct CodebookParams {
    double alpha = 0.4;            // brightness lower-bound factor, in (0,1)
    double beta = 1.25;            // brightness upper-bound factor, > 1
    double epsilon = 10.0;         // color-distortion match threshold
    int train_frames = 1;
    double mnrl_prune_factor = 0.5; // prune words absent longer than this fraction of N
    int cache_promote_freq = 50;   // cache hits needed to join the background model
    int cache_stale_frames = 50;   // unmatched cache words older than this are dropped

    void validate() const;
};

// One background prototype: mean RGB vector plus brightness bounds and
// temporal bookkeeping (frame times are 1-based).
struct Codeword {
    Vec3 v;
    double i_min = 0.0;
    double i_max = 0.0;
    int freq = 0;
    int mnrl = 0;          // maximum negative run length, in frames
    int first_access = 0;
    int last_access = 0;
};

struct PixelCodebook {
    std::vector<Codeword> words;
    std::vector<Codeword> cache; // provisional foreground prototypes, post-training only
};

/// Pixel brightness sqrt(R^2 + G^2 + B^2).
double brightness(const Vec3& pixel);

// Chromatic distance from the pixel to the line through the origin and the
// codeword vector: sqrt(||p||^2 - Cp^2), evaluated as the norm of the
// projection residual so collinear inputs come out at zero instead of
// picking up cancellation noise. Throws std::domain_error on a zero vector.
double color_distortion(const Vec3& pixel, const Vec3& word_vector);

/// True iff alpha*Imax <= i <= min(beta*Imax, Imin/alpha).
bool brightness_match(double i, const Codeword& word, const CodebookParams& params);

// First codeword (scan order) matching both the color-distortion and
// brightness criteria.
std::optional<std::size_t> find_match(const std::vector<Codeword>& words, const Vec3& pixel,
                                      double i, const CodebookParams& params);

Codeword make_codeword(const Vec3& pixel, double i, int t);

// Folds the pixel into the word: running-mean vector, widened brightness
// bounds, freq+1, mnrl = max(mnrl, t - last_access), last_access = t.
void update_codeword(Codeword& word, const Vec3& pixel, double i, int t);

// Wraps each word's negative run across the training boundary
// (mnrl = max(mnrl, N - last + first - 1)) and drops words with
// mnrl > mnrl_prune_factor * N.
void finalize_pixel(PixelCodebook& book, int n, const CodebookParams& params);

class CodebookModel {
public:
    CodebookModel(int width, int height, CodebookParams params);

    /// Training pass for frame t (1-based); match-update or create per pixel.
    void observe_training_frame(const Frame& frame, int t, int threads = 0);

    /// Applies finalize_pixel everywhere. Call once after the training pass.
    void finalize_training(int threads = 0);

    // Background subtraction for frame t > train_frames. Matched pixels are
    // background and refresh their codeword; unmatched pixels are foreground
    // and feed the cache layer (hit counting, promotion, staleness drop).
    BinaryMask segment(const Frame& frame, int t, int threads = 0);

    int width() const { return width_; }
    int height() const { return height_; }
    const CodebookParams& params() const { return params_; }
    const PixelCodebook& pixel(int x, int y) const {
        return books_[static_cast<std::size_t>(y) * width_ + x];
    }
    PixelCodebook& pixel(int x, int y) {
        return books_[static_cast<std::size_t>(y) * width_ + x];
    }

private:
    int width_;
    int height_;
    CodebookParams params_;
    std::vector<PixelCodebook> books_;
};

/// Full training run over an in-memory sequence; throws on an empty stream.
CodebookModel train_codebook(const std::vector<Frame>& frames, const CodebookParams& params,
                             int threads = 0);

} // namespace cbseg
