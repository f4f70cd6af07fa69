#include "cbseg/mog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cbseg/parallel.hpp"

namespace cbseg {

namespace {

constexpr double kMinVariance = 1e-6;

double distance_sq(const Vec3& a, const Vec3& b) {
    const double dr = a.r - b.r;
    const double dg = a.g - b.g;
    const double db = a.b - b.b;
    return dr * dr + dg * dg + db * db;
}

} // namespace

void MogParams::validate() const {
    if (!(learning_rate >= 0.0 && learning_rate < 1.0))
        throw std::invalid_argument("mog: learning rate must be in [0, 1)");
    if (!(second_rate > 0.0 && second_rate < 1.0))
        throw std::invalid_argument("mog: second rate must be in (0, 1)");
    if (component_count < 1)
        throw std::invalid_argument("mog: component count must be >= 1");
    if (!(background_fraction > 0.0 && background_fraction <= 1.0))
        throw std::invalid_argument("mog: background fraction must be in (0, 1]");
    if (!(match_sigma > 0.0))
        throw std::invalid_argument("mog: match sigma must be positive");
    if (!(initial_variance > 0.0) || !(initial_weight > 0.0))
        throw std::invalid_argument("mog: initial variance and weight must be positive");
}

bool mog_observe(const Vec3& pixel, std::vector<GaussianComponent>& components,
                 const MogParams& params) {
    if (static_cast<int>(components.size()) > params.component_count)
        throw std::invalid_argument("mog: component list exceeds K");

    // Match = within match_sigma standard deviations, first hit in rank order.
    int matched = -1;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const double d2 = distance_sq(pixel, components[i].mean);
        const double radius = params.match_sigma * std::sqrt(components[i].variance);
        if (d2 <= radius * radius) {
            matched = static_cast<int>(i);
            break;
        }
    }

    const double alpha = params.learning_rate;
    if (alpha > 0.0) {
        if (matched >= 0) {
            for (std::size_t i = 0; i < components.size(); ++i)
                components[i].weight = (1.0 - alpha) * components[i].weight +
                                        (static_cast<int>(i) == matched ? alpha : 0.0);
            GaussianComponent& m = components[matched];
            const double rho = params.second_rate;
            m.mean.r = (1.0 - rho) * m.mean.r + rho * pixel.r;
            m.mean.g = (1.0 - rho) * m.mean.g + rho * pixel.g;
            m.mean.b = (1.0 - rho) * m.mean.b + rho * pixel.b;
            m.variance = std::max(kMinVariance,
                                  (1.0 - rho) * m.variance + rho * distance_sq(pixel, m.mean));
        } else {
            for (GaussianComponent& c : components)
                c.weight = (1.0 - alpha) * c.weight;
            GaussianComponent fresh{pixel, params.initial_variance, params.initial_weight};
            if (static_cast<int>(components.size()) < params.component_count) {
                components.push_back(fresh);
            } else {
                // Replace the lowest-weight component.
                std::size_t worst = 0;
                for (std::size_t i = 1; i < components.size(); ++i)
                    if (components[i].weight < components[worst].weight)
                        worst = i;
                components[worst] = fresh;
            }
        }

        double sum = 0.0;
        for (const GaussianComponent& c : components)
            sum += c.weight;
        if (sum > 0.0)
            for (GaussianComponent& c : components)
                c.weight /= sum;

        // Rank by weight/sigma, most background-like first. The matched entry
        // must be tracked through the reorder for the classification below.
        std::vector<std::size_t> order(components.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double fa = components[a].weight / std::sqrt(components[a].variance);
            const double fb = components[b].weight / std::sqrt(components[b].variance);
            return fa > fb;
        });
        std::vector<GaussianComponent> ranked;
        ranked.reserve(components.size());
        int matched_rank = -1;
        for (std::size_t r = 0; r < order.size(); ++r) {
            ranked.push_back(components[order[r]]);
            if (static_cast<int>(order[r]) == matched)
                matched_rank = static_cast<int>(r);
        }
        components = std::move(ranked);
        matched = matched_rank;
    }

    if (matched < 0)
        return true;
    // Background components are the smallest rank prefix whose weights exceed
    // the background fraction; the match is background while the cumulative
    // weight ranked strictly above it stays within that fraction.
    double cum = 0.0;
    for (int i = 0; i < matched; ++i)
        cum += components[i].weight;
    return cum > params.background_fraction;
}

MogModel::MogModel(int width, int height, MogParams params)
    : width_(width), height_(height), params_(params),
      grid_(static_cast<std::size_t>(width) * height) {
    params_.validate();
    if (width < 1 || height < 1)
        throw std::invalid_argument("mog: model dimensions must be >= 1");
}

BinaryMask MogModel::segment(const Frame& frame, int threads) {
    if (frame.width() != width_ || frame.height() != height_ || frame.channels() != 3)
        throw std::invalid_argument("mog: frame does not match model shape");
    BinaryMask mask(width_, height_);
    parallel_rows(height_, threads, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            std::uint8_t* out = mask.row(y);
            for (int x = 0; x < width_; ++x) {
                const bool fg = mog_observe(pixel_rgb(frame, x, y),
                                            grid_[static_cast<std::size_t>(y) * width_ + x], params_);
                out[x] = fg ? BinaryMask::kFg : BinaryMask::kBg;
            }
        }
    });
    return mask;
}

} // namespace cbseg
