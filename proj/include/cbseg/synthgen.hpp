#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "cbseg/imagecore.hpp"

namespace cbseg {

struct SceneObject {
    enum class Shape { rect, disk };
    Shape shape = Shape::rect;
    std::array<std::uint8_t, 3> color{255, 255, 255};
    double x = 0.0; // rect top-left / disk center
    double y = 0.0;
    int width = 1;  // rect only
    int height = 1;
    double radius = 1.0; // disk only
    double vx = 0.0;     // pixels per frame
    double vy = 0.0;
    int enter = 1;
    int exit = std::numeric_limits<int>::max();
};

struct SceneBackground {
    enum class Mode { constant, flicker, noise };
    Mode mode = Mode::constant;
    std::array<std::uint8_t, 3> color{120, 120, 120};
    std::array<std::uint8_t, 3> color2{140, 140, 140}; // flicker alternate
    int flicker_period = 1;
    int noise_amplitude = 0; // uniform per-channel jitter, +-amplitude
    // When set, jitter is drawn orthogonal to the luma axis: the gray-level
    // image stays flat while the chromaticity churns, the signature of
    // water-like dynamic backgrounds.
    bool chroma_noise = false;
    // Extra jitter applied equally to all channels (pure brightness shimmer);
    // combines with either jitter mode above.
    int luma_amplitude = 0;
};

// Fully deterministic: a fixed seed reproduces the sequence byte for byte,
// and any frame can be generated independently by index.
struct SceneSpec {
    int width = 160;
    int height = 120;
    int frames = 100;
    std::uint64_t seed = 1;
    SceneBackground background;
    double illumination_ramp = 0.0; // frame t is scaled by 1 + ramp*(t-1)
    std::vector<SceneObject> objects;

    void validate() const;
};

struct SynthFrame {
    Frame frame;
    BinaryMask truth;
};

/// Frame t (1-based) plus its exact foreground truth.
SynthFrame generate_frame(const SceneSpec& spec, int t);

SceneSpec scene_from_json(const std::string& text);
SceneSpec load_scene(const std::filesystem::path& path);

// Writes in%06d.<format> and gt%06d.png under out_dir (created on demand).
// Format is "jpg" or "png".
void write_scene(const SceneSpec& spec, const std::filesystem::path& out_dir,
                 const std::string& image_format = "jpg");

} // namespace cbseg
