#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "cbseg/image_io.hpp"
#include "cbseg/synthgen.hpp"
#include "test_util.hpp"

using namespace cbseg;

namespace {

SceneSpec basic_spec() {
    SceneSpec s;
    s.width = 24;
    s.height = 16;
    s.frames = 6;
    s.seed = 99;
    return s;
}

} // namespace

TEST_CASE("generation is deterministic for a fixed seed") {
    SceneSpec s = basic_spec();
    s.background.mode = SceneBackground::Mode::noise;
    s.background.noise_amplitude = 8;
    for (int t = 1; t <= s.frames; ++t) {
        const SynthFrame a = generate_frame(s, t);
        const SynthFrame b = generate_frame(s, t);
        CHECK(a.frame.data() == b.frame.data());
        CHECK(a.truth == b.truth);
    }
    // A different seed moves the noise.
    SceneSpec other = s;
    other.seed = 100;
    CHECK(generate_frame(other, 1).frame.data() != generate_frame(s, 1).frame.data());
}

TEST_CASE("no objects means an all-background truth") {
    const SceneSpec s = basic_spec();
    for (int t = 1; t <= s.frames; ++t)
        CHECK(generate_frame(s, t).truth.foreground_count() == 0);
}

TEST_CASE("a static rectangle appears in frame and truth alike") {
    SceneSpec s = basic_spec();
    SceneObject o;
    o.x = 5;
    o.y = 4;
    o.width = 6;
    o.height = 3;
    o.color = {250, 10, 10};
    s.objects.push_back(o);

    const SynthFrame first = generate_frame(s, 1);
    const SynthFrame last = generate_frame(s, s.frames);
    CHECK(first.truth == last.truth);
    CHECK(first.truth.foreground_count() == 18); // clipped analytic area 6*3
    CHECK(first.truth.foreground(5, 4));
    CHECK(first.truth.foreground(10, 6));
    CHECK_FALSE(first.truth.foreground(11, 6));
    CHECK(first.frame.at(7, 5, 0) == 250);
    CHECK(first.frame.at(7, 5, 1) == 10);
}

TEST_CASE("a moving rectangle translates by exactly its velocity") {
    SceneSpec s = basic_spec();
    SceneObject o;
    o.x = 2;
    o.y = 6;
    o.width = 4;
    o.height = 4;
    o.vx = 1.0;
    s.objects.push_back(o);

    for (int t = 1; t < s.frames; ++t) {
        const BinaryMask cur = generate_frame(s, t).truth;
        const BinaryMask next = generate_frame(s, t + 1).truth;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x + 1 < s.width; ++x)
                CHECK(next.foreground(x + 1, y) == cur.foreground(x, y));
    }
}

TEST_CASE("objects clip against the frame bounds") {
    SceneSpec s = basic_spec();
    SceneObject o;
    o.x = 20; // 24-wide canvas, 8-wide rect: half sticks out
    o.y = 0;
    o.width = 8;
    o.height = 2;
    s.objects.push_back(o);
    CHECK(generate_frame(s, 1).truth.foreground_count() == 8); // 4x2 visible
}

TEST_CASE("disk objects rasterize by center distance") {
    SceneSpec s = basic_spec();
    SceneObject o;
    o.shape = SceneObject::Shape::disk;
    o.x = 12;
    o.y = 8;
    o.radius = 3.0;
    s.objects.push_back(o);
    const BinaryMask truth = generate_frame(s, 1).truth;
    std::size_t expected = 0;
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x)
            expected += ((x - 12.0) * (x - 12.0) + (y - 8.0) * (y - 8.0) <= 9.0);
    CHECK(truth.foreground_count() == expected);
    CHECK(truth.foreground(12, 8));
}

TEST_CASE("enter and exit windows gate object visibility") {
    SceneSpec s = basic_spec();
    SceneObject o;
    o.x = 1;
    o.y = 1;
    o.width = 2;
    o.height = 2;
    o.enter = 3;
    o.exit = 4;
    s.objects.push_back(o);
    CHECK(generate_frame(s, 2).truth.foreground_count() == 0);
    CHECK(generate_frame(s, 3).truth.foreground_count() == 4);
    CHECK(generate_frame(s, 4).truth.foreground_count() == 4);
    CHECK(generate_frame(s, 5).truth.foreground_count() == 0);
}

TEST_CASE("background modes") {
    SUBCASE("flicker alternates between the two colors") {
        SceneSpec s = basic_spec();
        s.background.mode = SceneBackground::Mode::flicker;
        s.background.color = {100, 100, 100};
        s.background.color2 = {140, 140, 140};
        CHECK(generate_frame(s, 1).frame.at(0, 0, 0) == 100);
        CHECK(generate_frame(s, 2).frame.at(0, 0, 0) == 140);
        CHECK(generate_frame(s, 3).frame.at(0, 0, 0) == 100);

        s.background.flicker_period = 2;
        CHECK(generate_frame(s, 2).frame.at(0, 0, 0) == 100);
        CHECK(generate_frame(s, 3).frame.at(0, 0, 0) == 140);
    }
    SUBCASE("noise stays within the amplitude around the base color") {
        SceneSpec s = basic_spec();
        s.background.mode = SceneBackground::Mode::noise;
        s.background.color = {120, 120, 120};
        s.background.noise_amplitude = 8;
        const Frame f = generate_frame(s, 3).frame;
        bool any_nonbase = false;
        for (const std::uint8_t v : f.data()) {
            CHECK(v >= 112);
            CHECK(v <= 128);
            any_nonbase = any_nonbase || v != 120;
        }
        CHECK(any_nonbase);
    }
    SUBCASE("illumination ramp scales the frame") {
        SceneSpec s = basic_spec();
        s.background.color = {100, 100, 100};
        s.illumination_ramp = 0.1;
        CHECK(generate_frame(s, 1).frame.at(0, 0, 0) == 100); // scale 1.0
        CHECK(generate_frame(s, 3).frame.at(0, 0, 0) == 120); // scale 1.2
    }
    SUBCASE("chroma noise churns color but leaves the gray level flat") {
        SceneSpec s = basic_spec();
        s.background.mode = SceneBackground::Mode::noise;
        s.background.color = {110, 110, 110};
        s.background.noise_amplitude = 16;
        s.background.chroma_noise = true;
        const Frame f = generate_frame(s, 2).frame;
        const Frame gray = to_grayscale(f);
        bool any_chroma = false;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) {
                CHECK(std::abs(static_cast<int>(gray.at(x, y)) - 110) <= 1);
                any_chroma = any_chroma || f.at(x, y, 0) != f.at(x, y, 1);
            }
        CHECK(any_chroma);
    }
    SUBCASE("luma shimmer shifts all channels of a pixel together") {
        SceneSpec s = basic_spec();
        s.background.color = {100, 100, 100};
        s.background.luma_amplitude = 5;
        const Frame f = generate_frame(s, 1).frame;
        bool any_shift = false;
        for (int y = 0; y < s.height; ++y)
            for (int x = 0; x < s.width; ++x) {
                CHECK(f.at(x, y, 0) == f.at(x, y, 1));
                CHECK(f.at(x, y, 1) == f.at(x, y, 2));
                CHECK(std::abs(static_cast<int>(f.at(x, y, 0)) - 100) <= 5);
                any_shift = any_shift || f.at(x, y, 0) != 100;
            }
        CHECK(any_shift);
        SceneSpec bad = s;
        bad.background.luma_amplitude = -1;
        CHECK_THROWS_AS(generate_frame(bad, 1), std::invalid_argument);
    }
    SUBCASE("flicker combines with jitter around each base") {
        SceneSpec s = basic_spec();
        s.background.mode = SceneBackground::Mode::flicker;
        s.background.color = {100, 100, 100};
        s.background.color2 = {140, 140, 140};
        s.background.noise_amplitude = 6;
        const Frame odd = generate_frame(s, 1).frame;
        const Frame even = generate_frame(s, 2).frame;
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(static_cast<int>(odd.at(3, 3, c)) - 100) <= 6);
            CHECK(std::abs(static_cast<int>(even.at(3, 3, c)) - 140) <= 6);
        }
    }
}

TEST_CASE("scene json parsing") {
    const std::string text = R"({
        "width": 32, "height": 20, "frames": 9, "seed": 7,
        "background": {"mode": "noise", "color": [90, 95, 100], "amplitude": 5},
        "illumination_ramp": 0.01,
        "objects": [
            {"shape": "rect", "color": [255, 255, 255], "x": 4, "y": 5,
             "width": 6, "height": 6, "vx": 0.5, "enter": 2, "exit": 8},
            {"shape": "disk", "x": 20, "y": 10, "radius": 2.5}
        ]
    })";
    const SceneSpec s = scene_from_json(text);
    CHECK(s.width == 32);
    CHECK(s.frames == 9);
    CHECK(s.background.noise_amplitude == 5);
    REQUIRE(s.objects.size() == 2);
    CHECK(s.objects[0].vx == 0.5);
    CHECK(s.objects[1].shape == SceneObject::Shape::disk);

    CHECK_THROWS_AS(scene_from_json("not json"), std::runtime_error);
    CHECK_THROWS_AS(scene_from_json(R"({"background": {"mode": "lava"}})"), std::runtime_error);
    CHECK_THROWS_AS(scene_from_json(R"({"background": {"color": [1, 2]}})"), std::runtime_error);
    CHECK_THROWS_AS(scene_from_json(R"({"width": 0})"), std::invalid_argument);
    CHECK_THROWS_AS(scene_from_json(R"({"objects": [{"width": 0}]})"), std::invalid_argument);
}

TEST_CASE("write_scene lays out the sequence the pipeline consumes") {
    testutil::TempDir tmp("scene");
    SceneSpec s = basic_spec();
    s.frames = 3;
    SceneObject o;
    o.x = 3;
    o.y = 3;
    o.width = 4;
    o.height = 4;
    s.objects.push_back(o);

    write_scene(s, tmp.path() / "png_out", "png");
    for (int t = 1; t <= 3; ++t) {
        CHECK(std::filesystem::exists(tmp.path() / "png_out" / format_sequence_name("in%06d.png", t)));
        CHECK(std::filesystem::exists(tmp.path() / "png_out" / format_sequence_name("gt%06d.png", t)));
    }
    // PNG frames round-trip exactly; truth masks reload as written.
    const Frame back = read_image(tmp.path() / "png_out" / "in000002.png");
    CHECK(back.data() == generate_frame(s, 2).frame.data());
    CHECK(read_mask(tmp.path() / "png_out" / "gt000002.png") == generate_frame(s, 2).truth);

    write_scene(s, tmp.path() / "jpg_out", "jpg");
    CHECK(std::filesystem::exists(tmp.path() / "jpg_out" / "in000001.jpg"));

    CHECK_THROWS_AS(write_scene(s, tmp.path() / "x", "bmp"), std::invalid_argument);
}
