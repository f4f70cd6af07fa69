#include "cbseg/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace fs = std::filesystem;

namespace cbseg {

namespace {

constexpr char kMagic[4] = {'C', 'B', 'S', 'M'};
constexpr std::uint16_t kVersion = 1;

class Writer {
public:
    explicit Writer(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_)
            throw std::runtime_error("cannot write model file: " + path.string());
    }
    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i)
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i)
            u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void finish(const fs::path& path) {
        if (!out_.flush())
            throw std::runtime_error("cannot write model file: " + path.string());
    }

private:
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const fs::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_)
            throw std::runtime_error("cannot open model file: " + path.string());
    }
    std::uint8_t u8() {
        const int c = in_.get();
        if (c == std::ifstream::traits_type::eof())
            throw std::runtime_error("truncated model file: " + path_.string());
        return static_cast<std::uint8_t>(c);
    }
    std::uint16_t u16() {
        // Two reads in one expression would be indeterminately sequenced.
        const std::uint16_t lo = u8();
        return static_cast<std::uint16_t>(lo | (u8() << 8));
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }

private:
    std::ifstream in_;
    fs::path path_;
};

ModelKind read_header(Reader& r, std::uint32_t& width, std::uint32_t& height) {
    char magic[4];
    for (char& c : magic)
        c = static_cast<char>(r.u8());
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a model dump (bad magic)");
    const std::uint16_t version = r.u16();
    if (version != kVersion)
        throw std::runtime_error("unsupported model dump version " + std::to_string(version));
    const std::uint8_t kind = r.u8();
    if (kind > 1)
        throw std::runtime_error("unknown model kind " + std::to_string(kind));
    width = r.u32();
    height = r.u32();
    if (width == 0 || height == 0)
        throw std::runtime_error("model dump has degenerate dimensions");
    return static_cast<ModelKind>(kind);
}

void write_codeword(Writer& w, const Codeword& cw) {
    w.f64(cw.v.r);
    w.f64(cw.v.g);
    w.f64(cw.v.b);
    w.f64(cw.i_min);
    w.f64(cw.i_max);
    w.i32(cw.freq);
    w.i32(cw.mnrl);
    w.i32(cw.first_access);
    w.i32(cw.last_access);
}

Codeword read_codeword(Reader& r) {
    Codeword cw;
    cw.v.r = r.f64();
    cw.v.g = r.f64();
    cw.v.b = r.f64();
    cw.i_min = r.f64();
    cw.i_max = r.f64();
    cw.freq = r.i32();
    cw.mnrl = r.i32();
    cw.first_access = r.i32();
    cw.last_access = r.i32();
    return cw;
}

} // namespace

void save_model(const CodebookModel& model, const fs::path& path) {
    Writer w(path);
    for (char c : kMagic)
        w.u8(static_cast<std::uint8_t>(c));
    w.u16(kVersion);
    w.u8(static_cast<std::uint8_t>(ModelKind::codebook));
    w.u32(static_cast<std::uint32_t>(model.width()));
    w.u32(static_cast<std::uint32_t>(model.height()));
    const CodebookParams& p = model.params();
    w.f64(p.alpha);
    w.f64(p.beta);
    w.f64(p.epsilon);
    w.i32(p.train_frames);
    w.f64(p.mnrl_prune_factor);
    w.i32(p.cache_promote_freq);
    w.i32(p.cache_stale_frames);
    for (int y = 0; y < model.height(); ++y) {
        for (int x = 0; x < model.width(); ++x) {
            const PixelCodebook& book = model.pixel(x, y);
            w.u32(static_cast<std::uint32_t>(book.words.size()));
            w.u32(static_cast<std::uint32_t>(book.cache.size()));
            for (const Codeword& cw : book.words)
                write_codeword(w, cw);
            for (const Codeword& cw : book.cache)
                write_codeword(w, cw);
        }
    }
    w.finish(path);
}

void save_model(const MogModel& model, const fs::path& path) {
    Writer w(path);
    for (char c : kMagic)
        w.u8(static_cast<std::uint8_t>(c));
    w.u16(kVersion);
    w.u8(static_cast<std::uint8_t>(ModelKind::mog));
    w.u32(static_cast<std::uint32_t>(model.width()));
    w.u32(static_cast<std::uint32_t>(model.height()));
    const MogParams& p = model.params();
    w.f64(p.learning_rate);
    w.f64(p.second_rate);
    w.i32(p.component_count);
    w.f64(p.background_fraction);
    w.f64(p.match_sigma);
    w.f64(p.initial_variance);
    w.f64(p.initial_weight);
    for (int y = 0; y < model.height(); ++y) {
        for (int x = 0; x < model.width(); ++x) {
            const auto& comps = model.pixel(x, y);
            w.u32(static_cast<std::uint32_t>(comps.size()));
            for (const GaussianComponent& c : comps) {
                w.f64(c.mean.r);
                w.f64(c.mean.g);
                w.f64(c.mean.b);
                w.f64(c.variance);
                w.f64(c.weight);
            }
        }
    }
    w.finish(path);
}

ModelKind peek_model_kind(const fs::path& path) {
    Reader r(path);
    std::uint32_t w = 0, h = 0;
    return read_header(r, w, h);
}

CodebookModel load_codebook_model(const fs::path& path) {
    Reader r(path);
    std::uint32_t width = 0, height = 0;
    if (read_header(r, width, height) != ModelKind::codebook)
        throw std::runtime_error("model dump is not a codebook model: " + path.string());
    CodebookParams p;
    p.alpha = r.f64();
    p.beta = r.f64();
    p.epsilon = r.f64();
    p.train_frames = r.i32();
    p.mnrl_prune_factor = r.f64();
    p.cache_promote_freq = r.i32();
    p.cache_stale_frames = r.i32();
    CodebookModel model(static_cast<int>(width), static_cast<int>(height), p);
    for (int y = 0; y < model.height(); ++y) {
        for (int x = 0; x < model.width(); ++x) {
            PixelCodebook& book = model.pixel(x, y);
            const std::uint32_t n_words = r.u32();
            const std::uint32_t n_cache = r.u32();
            book.words.reserve(n_words);
            book.cache.reserve(n_cache);
            for (std::uint32_t i = 0; i < n_words; ++i)
                book.words.push_back(read_codeword(r));
            for (std::uint32_t i = 0; i < n_cache; ++i)
                book.cache.push_back(read_codeword(r));
        }
    }
    return model;
}

MogModel load_mog_model(const fs::path& path) {
    Reader r(path);
    std::uint32_t width = 0, height = 0;
    if (read_header(r, width, height) != ModelKind::mog)
        throw std::runtime_error("model dump is not a mixture model: " + path.string());
    MogParams p;
    p.learning_rate = r.f64();
    p.second_rate = r.f64();
    p.component_count = r.i32();
    p.background_fraction = r.f64();
    p.match_sigma = r.f64();
    p.initial_variance = r.f64();
    p.initial_weight = r.f64();
    MogModel model(static_cast<int>(width), static_cast<int>(height), p);
    for (int y = 0; y < model.height(); ++y) {
        for (int x = 0; x < model.width(); ++x) {
            auto& comps = model.pixel(x, y);
            const std::uint32_t n = r.u32();
            comps.reserve(n);
            for (std::uint32_t i = 0; i < n; ++i) {
                GaussianComponent c;
                c.mean.r = r.f64();
                c.mean.g = r.f64();
                c.mean.b = r.f64();
                c.variance = r.f64();
                c.weight = r.f64();
                comps.push_back(c);
            }
        }
    }
    return model;
}

} // namespace cbseg
