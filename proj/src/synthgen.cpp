#include "cbseg/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "cbseg/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cbseg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Counter-based jitter: hash of (seed, frame, pixel, channel). No stream
// state, so frames are reproducible in isolation.
int jitter(std::uint64_t seed, int t, std::size_t pixel, int channel, int amplitude) {
    const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed ^ static_cast<std::uint64_t>(t)) ^
                                                  pixel) ^
                                       static_cast<std::uint64_t>(channel));
    return static_cast<int>(h % (2 * static_cast<std::uint64_t>(amplitude) + 1)) - amplitude;
}

std::uint8_t clamp_u8(double v) {
    const int i = static_cast<int>(std::lround(v));
    return static_cast<std::uint8_t>(std::clamp(i, 0, 255));
}

std::array<std::uint8_t, 3> color_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3)
        throw std::runtime_error("scene: color must be a 3-element array");
    std::array<std::uint8_t, 3> c{};
    for (int i = 0; i < 3; ++i) {
        const int v = j[i].get<int>();
        if (v < 0 || v > 255)
            throw std::runtime_error("scene: color channel out of [0,255]");
        c[i] = static_cast<std::uint8_t>(v);
    }
    return c;
}

} // namespace

void SceneSpec::validate() const {
    if (width < 1 || height < 1)
        throw std::invalid_argument("scene: degenerate dimensions");
    if (frames < 1)
        throw std::invalid_argument("scene: frame count must be >= 1");
    if (background.noise_amplitude < 0 || background.luma_amplitude < 0)
        throw std::invalid_argument("scene: noise amplitudes must be non-negative");
    if (background.flicker_period < 1)
        throw std::invalid_argument("scene: flicker period must be >= 1");
    for (const SceneObject& o : objects) {
        if (o.shape == SceneObject::Shape::rect && (o.width < 1 || o.height < 1))
            throw std::invalid_argument("scene: rectangle dimensions must be >= 1");
        if (o.shape == SceneObject::Shape::disk && !(o.radius > 0.0))
            throw std::invalid_argument("scene: disk radius must be positive");
        if (o.enter < 1 || o.exit < o.enter)
            throw std::invalid_argument("scene: object enter/exit window is invalid");
    }
}

SynthFrame generate_frame(const SceneSpec& spec, int t) {
    spec.validate();
    if (t < 1 || t > spec.frames)
        throw std::invalid_argument("scene: frame index out of range");

    SynthFrame out{Frame(spec.width, spec.height, 3), BinaryMask(spec.width, spec.height)};
    Frame& frame = out.frame;

    const SceneBackground& bg = spec.background;
    std::array<std::uint8_t, 3> base = bg.color;
    if (bg.mode == SceneBackground::Mode::flicker && ((t - 1) / bg.flicker_period) % 2 == 1)
        base = bg.color2;
    // Amplitude applies around whichever base the mode selects, so flicker
    // and chroma churn can combine.
    const bool jittered = bg.noise_amplitude > 0;
    for (int y = 0; y < spec.height; ++y) {
        std::uint8_t* row = frame.row(y);
        for (int x = 0; x < spec.width; ++x) {
            const std::size_t pixel = static_cast<std::size_t>(y) * spec.width + x;
            int d[3] = {0, 0, 0};
            if (jittered) {
                if (bg.chroma_noise) {
                    // Pick R and B freely, then solve the green channel so
                    // the BT.601 luma stays put (up to rounding).
                    d[0] = jitter(spec.seed, t, pixel, 0, bg.noise_amplitude);
                    d[2] = jitter(spec.seed, t, pixel, 2, bg.noise_amplitude);
                    d[1] = static_cast<int>(std::lround(-(0.299 * d[0] + 0.114 * d[2]) / 0.587));
                } else {
                    for (int c = 0; c < 3; ++c)
                        d[c] = jitter(spec.seed, t, pixel, c, bg.noise_amplitude);
                }
            }
            if (bg.luma_amplitude > 0) {
                const int shimmer = jitter(spec.seed, t, pixel, 3, bg.luma_amplitude);
                for (int& v : d)
                    v += shimmer;
            }
            for (int c = 0; c < 3; ++c)
                row[3 * x + c] = static_cast<std::uint8_t>(std::clamp(base[c] + d[c], 0, 255));
        }
    }

    for (const SceneObject& o : spec.objects) {
        if (t < o.enter || t > o.exit)
            continue;
        const double px = o.x + o.vx * (t - o.enter);
        const double py = o.y + o.vy * (t - o.enter);
        if (o.shape == SceneObject::Shape::rect) {
            const int left = static_cast<int>(std::lround(px));
            const int top = static_cast<int>(std::lround(py));
            const int x0 = std::max(left, 0);
            const int y0 = std::max(top, 0);
            const int x1 = std::min(left + o.width - 1, spec.width - 1);
            const int y1 = std::min(top + o.height - 1, spec.height - 1);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    for (int c = 0; c < 3; ++c)
                        frame.at(x, y, c) = o.color[c];
                    out.truth.set(x, y, true);
                }
            }
        } else {
            const double r2 = o.radius * o.radius;
            const int x0 = std::max(static_cast<int>(std::floor(px - o.radius)), 0);
            const int y0 = std::max(static_cast<int>(std::floor(py - o.radius)), 0);
            const int x1 = std::min(static_cast<int>(std::ceil(px + o.radius)), spec.width - 1);
            const int y1 = std::min(static_cast<int>(std::ceil(py + o.radius)), spec.height - 1);
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double dx = x - px;
                    const double dy = y - py;
                    if (dx * dx + dy * dy > r2)
                        continue;
                    for (int c = 0; c < 3; ++c)
                        frame.at(x, y, c) = o.color[c];
                    out.truth.set(x, y, true);
                }
            }
        }
    }

    if (spec.illumination_ramp != 0.0) {
        const double scale = 1.0 + spec.illumination_ramp * (t - 1);
        for (std::uint8_t& v : frame.data())
            v = clamp_u8(v * scale);
    }
    return out;
}

SceneSpec scene_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("scene: invalid JSON: ") + e.what());
    }
    SceneSpec spec;
    spec.width = j.value("width", spec.width);
    spec.height = j.value("height", spec.height);
    spec.frames = j.value("frames", spec.frames);
    spec.seed = j.value("seed", spec.seed);
    spec.illumination_ramp = j.value("illumination_ramp", spec.illumination_ramp);
    if (j.contains("background")) {
        const json& b = j["background"];
        const std::string mode = b.value("mode", "constant");
        if (mode == "constant")
            spec.background.mode = SceneBackground::Mode::constant;
        else if (mode == "flicker")
            spec.background.mode = SceneBackground::Mode::flicker;
        else if (mode == "noise")
            spec.background.mode = SceneBackground::Mode::noise;
        else
            throw std::runtime_error("scene: unknown background mode: " + mode);
        if (b.contains("color"))
            spec.background.color = color_from_json(b["color"]);
        if (b.contains("color2"))
            spec.background.color2 = color_from_json(b["color2"]);
        spec.background.flicker_period = b.value("period", spec.background.flicker_period);
        spec.background.noise_amplitude = b.value("amplitude", spec.background.noise_amplitude);
        spec.background.chroma_noise = b.value("chroma", spec.background.chroma_noise);
        spec.background.luma_amplitude = b.value("luma_amplitude", spec.background.luma_amplitude);
    }
    for (const json& jo : j.value("objects", json::array())) {
        SceneObject o;
        const std::string shape = jo.value("shape", "rect");
        if (shape == "rect")
            o.shape = SceneObject::Shape::rect;
        else if (shape == "disk")
            o.shape = SceneObject::Shape::disk;
        else
            throw std::runtime_error("scene: unknown object shape: " + shape);
        if (jo.contains("color"))
            o.color = color_from_json(jo["color"]);
        o.x = jo.value("x", o.x);
        o.y = jo.value("y", o.y);
        o.width = jo.value("width", o.width);
        o.height = jo.value("height", o.height);
        o.radius = jo.value("radius", o.radius);
        o.vx = jo.value("vx", o.vx);
        o.vy = jo.value("vy", o.vy);
        o.enter = jo.value("enter", o.enter);
        o.exit = jo.value("exit", o.exit);
        spec.objects.push_back(o);
    }
    spec.validate();
    return spec;
}

SceneSpec load_scene(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open scene spec: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scene_from_json(text);
}

void write_scene(const SceneSpec& spec, const fs::path& out_dir, const std::string& image_format) {
    if (image_format != "jpg" && image_format != "png")
        throw std::invalid_argument("scene: image format must be jpg or png");
    spec.validate();
    fs::create_directories(out_dir);
    for (int t = 1; t <= spec.frames; ++t) {
        const SynthFrame sf = generate_frame(spec, t);
        const std::string stem = format_sequence_name("in%06d", t);
        if (image_format == "jpg")
            write_jpeg(sf.frame, out_dir / (stem + ".jpg"));
        else
            write_png(sf.frame, out_dir / (stem + ".png"));
        write_mask(sf.truth, out_dir / format_sequence_name("gt%06d.png", t));
    }
}

} // namespace cbseg
