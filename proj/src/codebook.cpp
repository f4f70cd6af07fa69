#include "cbseg/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbseg/parallel.hpp"

namespace cbseg {

void CodebookParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("codebook: alpha must be in (0, 1)");
    if (!(beta > 1.0))
        throw std::invalid_argument("codebook: beta must exceed 1");
    if (epsilon < 0.0)
        throw std::invalid_argument("codebook: epsilon must be non-negative");
    if (train_frames < 1)
        throw std::invalid_argument("codebook: train_frames must be >= 1");
    if (mnrl_prune_factor < 0.0)
        throw std::invalid_argument("codebook: mnrl_prune_factor must be non-negative");
    if (cache_promote_freq < 1 || cache_stale_frames < 1)
        throw std::invalid_argument("codebook: cache thresholds must be >= 1");
}

double brightness(const Vec3& pixel) {
    return std::sqrt(pixel.r * pixel.r + pixel.g * pixel.g + pixel.b * pixel.b);
}

double color_distortion(const Vec3& pixel, const Vec3& word_vector) {
    const Vec3& w = word_vector;
    const double w2 = w.r * w.r + w.g * w.g + w.b * w.b;
    if (w2 == 0.0)
        throw std::domain_error("color_distortion: zero codeword vector");
    const double k = (pixel.r * w.r + pixel.g * w.g + pixel.b * w.b) / w2;
    const double dr = pixel.r - k * w.r;
    const double dg = pixel.g - k * w.g;
    const double db = pixel.b - k * w.b;
    return std::sqrt(dr * dr + dg * dg + db * db);
}

bool brightness_match(double i, const Codeword& word, const CodebookParams& params) {
    const double i_low = params.alpha * word.i_max;
    const double i_hi = std::min(params.beta * word.i_max, word.i_min / params.alpha);
    return i_low <= i && i <= i_hi;
}

std::optional<std::size_t> find_match(const std::vector<Codeword>& words, const Vec3& pixel,
                                      double i, const CodebookParams& params) {
    for (std::size_t idx = 0; idx < words.size(); ++idx) {
        if (color_distortion(pixel, words[idx].v) <= params.epsilon &&
            brightness_match(i, words[idx], params))
            return idx;
    }
    return std::nullopt;
}

Codeword make_codeword(const Vec3& pixel, double i, int t) {
    Codeword word;
    word.v = pixel;
    word.i_min = i;
    word.i_max = i;
    word.freq = 1;
    word.mnrl = t - 1;
    word.first_access = t;
    word.last_access = t;
    return word;
}

void update_codeword(Codeword& word, const Vec3& pixel, double i, int t) {
    const double f = static_cast<double>(word.freq);
    word.v.r = (f * word.v.r + pixel.r) / (f + 1.0);
    word.v.g = (f * word.v.g + pixel.g) / (f + 1.0);
    word.v.b = (f * word.v.b + pixel.b) / (f + 1.0);
    word.i_min = std::min(i, word.i_min);
    word.i_max = std::max(i, word.i_max);
    word.freq += 1;
    word.mnrl = std::max(word.mnrl, t - word.last_access);
    word.last_access = t;
}

void finalize_pixel(PixelCodebook& book, int n, const CodebookParams& params) {
    for (Codeword& word : book.words)
        word.mnrl = std::max(word.mnrl, n - word.last_access + word.first_access - 1);
    const double bound = params.mnrl_prune_factor * n;
    std::erase_if(book.words, [bound](const Codeword& w) { return w.mnrl > bound; });
}

CodebookModel::CodebookModel(int width, int height, CodebookParams params)
    : width_(width), height_(height), params_(params),
      books_(static_cast<std::size_t>(width) * height) {
    params_.validate();
    if (width < 1 || height < 1)
        throw std::invalid_argument("codebook: model dimensions must be >= 1");
}

void CodebookModel::observe_training_frame(const Frame& frame, int t, int threads) {
    if (frame.width() != width_ || frame.height() != height_ || frame.channels() != 3)
        throw std::invalid_argument("codebook: training frame does not match model shape");
    parallel_rows(height_, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < width_; ++x) {
                PixelCodebook& book = books_[static_cast<std::size_t>(y) * width_ + x];
                const Vec3 p = pixel_rgb(frame, x, y);
                const double i = brightness(p);
                if (auto m = find_match(book.words, p, i, params_))
                    update_codeword(book.words[*m], p, i, t);
                else
                    book.words.push_back(make_codeword(p, i, t));
            }
        }
    });
}

void CodebookModel::finalize_training(int threads) {
    parallel_rows(height_, threads, [&](int y0, int y1) {
        const std::size_t begin = static_cast<std::size_t>(y0) * width_;
        const std::size_t end = static_cast<std::size_t>(y1) * width_;
        for (std::size_t i = begin; i < end; ++i)
            finalize_pixel(books_[i], params_.train_frames, params_);
    });
}

BinaryMask CodebookModel::segment(const Frame& frame, int t, int threads) {
    if (frame.width() != width_ || frame.height() != height_ || frame.channels() != 3)
        throw std::invalid_argument("codebook: frame does not match model shape");
    if (t <= params_.train_frames)
        throw std::invalid_argument("codebook: segment called inside the training window");
    BinaryMask mask(width_, height_);
    parallel_rows(height_, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            std::uint8_t* out = mask.row(y);
            for (int x = 0; x < width_; ++x) {
                PixelCodebook& book = books_[static_cast<std::size_t>(y) * width_ + x];
                const Vec3 p = pixel_rgb(frame, x, y);
                const double i = brightness(p);
                if (auto m = find_match(book.words, p, i, params_)) {
                    update_codeword(book.words[*m], p, i, t);
                    out[x] = BinaryMask::kBg;
                    continue;
                }
                out[x] = BinaryMask::kFg;
                // Cache layer: count repeats of the novel color, promote it
                // into the background model once it proves persistent.
                std::erase_if(book.cache, [&](const Codeword& w) {
                    return t - w.last_access > params_.cache_stale_frames;
                });
                std::size_t ci;
                if (auto cm = find_match(book.cache, p, i, params_)) {
                    update_codeword(book.cache[*cm], p, i, t);
                    ci = *cm;
                } else {
                    book.cache.push_back(make_codeword(p, i, t));
                    ci = book.cache.size() - 1;
                }
                if (book.cache[ci].freq >= params_.cache_promote_freq) {
                    book.words.push_back(book.cache[ci]);
                    book.cache.erase(book.cache.begin() + static_cast<std::ptrdiff_t>(ci));
                }
            }
        }
    });
    return mask;
}

CodebookModel train_codebook(const std::vector<Frame>& frames, const CodebookParams& params,
                             int threads) {
    if (frames.empty())
        throw std::invalid_argument("codebook: empty training stream");
    if (static_cast<int>(frames.size()) != params.train_frames)
        throw std::invalid_argument("codebook: training stream length must equal train_frames");
    CodebookModel model(frames.front().width(), frames.front().height(), params);
    int t = 1;
    for (const Frame& frame : frames) {
        model.observe_training_frame(frame, t, threads);
        ++t;
    }
    model.finalize_training(threads);
    return model;
}

} // namespace cbseg
