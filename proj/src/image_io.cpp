#include "cbseg/image_io.hpp"

#include <cstdio>
#include <csetjmp>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace fs = std::filesystem;

namespace cbseg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const fs::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f)
        throw std::runtime_error("cannot open " + path.string());
    return f;
}

// ---- PNG ----

Frame read_png_file(std::FILE* fp, const fs::path& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("corrupt PNG: " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16)
        png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = static_cast<int>(png_get_channels(png, info));
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("unsupported PNG channel layout: " + path.string());
    }

    Frame frame(width, height, channels);
    rows.resize(height);
    for (int y = 0; y < height; ++y)
        rows[y] = frame.row(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return frame;
}

void write_png_file(const Frame& frame, const fs::path& path) {
    FilePtr fp = open_file(path, "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw std::runtime_error("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG write failed: " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, frame.width(), frame.height(), 8,
                 frame.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < frame.height(); ++y)
        png_write_row(png, const_cast<png_bytep>(frame.row(y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- JPEG ----

struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
    JpegErrorMgr* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    longjmp(err->jump, 1);
}

Frame read_jpeg_file(std::FILE* fp, const fs::path& path) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error("corrupt JPEG: " + path.string());
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int width = static_cast<int>(cinfo.output_width);
    const int height = static_cast<int>(cinfo.output_height);
    const int channels = cinfo.output_components;
    if (channels != 1 && channels != 3) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error("unsupported JPEG channel layout: " + path.string());
    }
    Frame frame(width, height, channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = frame.row(static_cast<int>(cinfo.output_scanline));
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return frame;
}

void write_jpeg_file(const Frame& frame, const fs::path& path, int quality) {
    FilePtr fp = open_file(path, "wb");
    jpeg_compress_struct cinfo;
    JpegErrorMgr jerr;
    cinfo.err = jpeg_std_error(&jerr.pub);
    jerr.pub.error_exit = jpeg_error_exit;
    if (setjmp(jerr.jump)) {
        jpeg_destroy_compress(&cinfo);
        throw std::runtime_error("JPEG write failed: " + path.string());
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, fp.get());
    cinfo.image_width = static_cast<JDIMENSION>(frame.width());
    cinfo.image_height = static_cast<JDIMENSION>(frame.height());
    cinfo.input_components = frame.channels();
    cinfo.in_color_space = frame.channels() == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(frame.row(static_cast<int>(cinfo.next_scanline)));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

} // namespace

Frame read_image(const fs::path& path) {
    FilePtr fp = open_file(path, "rb");
    unsigned char magic[2] = {0, 0};
    if (std::fread(magic, 1, 2, fp.get()) != 2)
        throw std::runtime_error("cannot read " + path.string());
    std::rewind(fp.get());
    if (magic[0] == 0x89 && magic[1] == 'P')
        return read_png_file(fp.get(), path);
    if (magic[0] == 0xFF && magic[1] == 0xD8)
        return read_jpeg_file(fp.get(), path);
    throw std::runtime_error("not a PNG or JPEG file: " + path.string());
}

void write_png(const Frame& frame, const fs::path& path) {
    write_png_file(frame, path);
}

void write_jpeg(const Frame& frame, const fs::path& path, int quality) {
    write_jpeg_file(frame, path, quality);
}

void write_mask(const BinaryMask& mask, const fs::path& path) {
    Frame img(mask.width(), mask.height(), 1);
    std::memcpy(img.data().data(), mask.labels().data(), mask.labels().size());
    write_png_file(img, path);
}

BinaryMask read_mask(const fs::path& path) {
    Frame img = read_image(path);
    if (img.channels() != 1)
        throw std::runtime_error("mask file is not single-channel: " + path.string());
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            mask.set(x, y, img.at(x, y) != 0);
    return mask;
}

std::string format_sequence_name(const std::string& pattern, int index) {
    // Accept exactly one %[0][width]d conversion and nothing else.
    std::size_t pos = std::string::npos;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != '%')
            continue;
        std::size_t j = i + 1;
        while (j < pattern.size() && pattern[j] >= '0' && pattern[j] <= '9')
            ++j;
        if (j >= pattern.size() || pattern[j] != 'd' || pos != std::string::npos)
            throw std::invalid_argument("sequence pattern must contain exactly one %d conversion: " + pattern);
        pos = i;
        i = j;
    }
    if (pos == std::string::npos)
        throw std::invalid_argument("sequence pattern must contain a %d conversion: " + pattern);
    char buf[512];
    const int n = std::snprintf(buf, sizeof(buf), pattern.c_str(), index);
    if (n < 0 || n >= static_cast<int>(sizeof(buf)))
        throw std::invalid_argument("sequence pattern expands too long: " + pattern);
    return std::string(buf, static_cast<std::size_t>(n));
}

SequenceReader::SequenceReader(fs::path directory, std::string pattern, int first, int last)
    : directory_(std::move(directory)), pattern_(std::move(pattern)),
      first_(first), last_(last), next_(first) {
    format_sequence_name(pattern_, first_); // validate the template up front
    if (!fs::is_directory(directory_))
        throw std::runtime_error("sequence directory does not exist: " + directory_.string());
}

std::optional<Frame> SequenceReader::next() {
    if (next_ > last_)
        return std::nullopt;
    const fs::path path = directory_ / format_sequence_name(pattern_, next_);
    if (!fs::exists(path))
        throw std::runtime_error("missing frame " + std::to_string(next_) + ": " + path.string());
    Frame frame = read_image(path);
    if (ref_width_ == 0) {
        ref_width_ = frame.width();
        ref_height_ = frame.height();
    } else if (frame.width() != ref_width_ || frame.height() != ref_height_) {
        throw std::runtime_error("frame " + std::to_string(next_) + " dimension mismatch: " + path.string());
    }
    ++next_;
    return frame;
}

std::optional<int> probe_sequence_end(const fs::path& directory, const std::string& pattern, int first) {
    if (!fs::exists(directory / format_sequence_name(pattern, first)))
        return std::nullopt;
    int last = first;
    while (fs::exists(directory / format_sequence_name(pattern, last + 1)))
        ++last;
    return last;
}

} // namespace cbseg
