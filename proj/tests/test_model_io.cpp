#include <doctest.h>

#include <fstream>

#include "cbseg/model_io.hpp"
#include "test_util.hpp"

using namespace cbseg;

namespace {

Frame solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Frame f(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            f.at(x, y, 0) = r;
            f.at(x, y, 1) = g;
            f.at(x, y, 2) = b;
        }
    return f;
}

bool same_word(const Codeword& a, const Codeword& b) {
    return a.v.r == b.v.r && a.v.g == b.v.g && a.v.b == b.v.b && a.i_min == b.i_min &&
           a.i_max == b.i_max && a.freq == b.freq && a.mnrl == b.mnrl &&
           a.first_access == b.first_access && a.last_access == b.last_access;
}

} // namespace

TEST_CASE("codebook model dump round-trips bit-exactly") {
    testutil::TempDir tmp("cb_dump");
    CodebookParams p;
    p.train_frames = 4;
    std::vector<Frame> frames;
    for (int t = 1; t <= 4; ++t)
        frames.push_back(t % 2 ? solid(5, 4, 180, 20, 20) : solid(5, 4, 20, 180, 20));
    CodebookModel model = train_codebook(frames, p);
    model.segment(solid(5, 4, 10, 10, 200), 5); // populate the cache layer

    const auto path = tmp.path() / "model.cbsm";
    save_model(model, path);
    CHECK(peek_model_kind(path) == ModelKind::codebook);

    CodebookModel back = load_codebook_model(path);
    CHECK(back.width() == model.width());
    CHECK(back.height() == model.height());
    CHECK(back.params().epsilon == model.params().epsilon);
    CHECK(back.params().train_frames == model.params().train_frames);
    for (int y = 0; y < model.height(); ++y)
        for (int x = 0; x < model.width(); ++x) {
            const PixelCodebook& a = model.pixel(x, y);
            const PixelCodebook& b = back.pixel(x, y);
            REQUIRE(a.words.size() == b.words.size());
            REQUIRE(a.cache.size() == b.cache.size());
            for (std::size_t i = 0; i < a.words.size(); ++i)
                CHECK(same_word(a.words[i], b.words[i]));
            for (std::size_t i = 0; i < a.cache.size(); ++i)
                CHECK(same_word(a.cache[i], b.cache[i]));
        }

    // Behavioral equality: both models segment the same probe identically.
    const Frame probe = solid(5, 4, 180, 20, 20);
    CHECK(model.segment(probe, 6) == back.segment(probe, 6));
}

TEST_CASE("mog model dump round-trips bit-exactly") {
    testutil::TempDir tmp("mog_dump");
    MogModel model(4, 3, MogParams{});
    for (int t = 0; t < 50; ++t)
        model.segment(solid(4, 3, 60, 120, 180));

    const auto path = tmp.path() / "model.cbsm";
    save_model(model, path);
    CHECK(peek_model_kind(path) == ModelKind::mog);

    MogModel back = load_mog_model(path);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
            const auto& a = model.pixel(x, y);
            const auto& b = back.pixel(x, y);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].mean.r == b[i].mean.r);
                CHECK(a[i].variance == b[i].variance);
                CHECK(a[i].weight == b[i].weight);
            }
        }
    CHECK(model.segment(solid(4, 3, 60, 120, 180)) == back.segment(solid(4, 3, 60, 120, 180)));
}

TEST_CASE("model loader rejects foreign and damaged files") {
    testutil::TempDir tmp("bad_dump");

    const auto garbage = tmp.path() / "garbage.cbsm";
    {
        std::ofstream out(garbage, std::ios::binary);
        out << "MAGICMISMATCH........";
    }
    CHECK_THROWS_AS(peek_model_kind(garbage), std::runtime_error);
    CHECK_THROWS_AS(load_codebook_model(garbage), std::runtime_error);

    CHECK_THROWS_AS(load_codebook_model(tmp.path() / "missing.cbsm"), std::runtime_error);

    // Kind mismatch: a mog dump is not a codebook dump.
    MogModel mog_model(2, 2, MogParams{});
    const auto mog_path = tmp.path() / "mog.cbsm";
    save_model(mog_model, mog_path);
    CHECK_THROWS_AS(load_codebook_model(mog_path), std::runtime_error);

    // Truncation mid-payload.
    CodebookParams p;
    p.train_frames = 2;
    CodebookModel cb = train_codebook({solid(3, 3, 9, 9, 9), solid(3, 3, 9, 9, 9)}, p);
    const auto full = tmp.path() / "full.cbsm";
    save_model(cb, full);
    const auto truncated = tmp.path() / "short.cbsm";
    {
        std::ifstream in(full, std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        std::ofstream out(truncated, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    }
    CHECK_THROWS_AS(load_codebook_model(truncated), std::runtime_error);
}
