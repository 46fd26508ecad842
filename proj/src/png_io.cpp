#include "qburst/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

namespace qburst {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports errors by longjmp. Every function below that calls setjmp
// keeps only objects that already exist before the setjmp call.
struct ErrorSink {
    char message[256] = {};
};

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
    std::snprintf(sink->message, sizeof(sink->message), "%s", msg);
    png_longjmp(png, 1);
}
void png_warning_fn(png_structp, png_const_charp) {}

struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    int depth = 0;
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
};

bool decode(std::FILE* file, RawPng& raw, ErrorSink& sink) {
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_fn, png_warning_fn);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        return false;
    }
    png_init_io(png, file);
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const auto color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    raw.pixels.resize(rowbytes * raw.height);
    raw.rows.resize(raw.height);
    for (int y = 0; y < raw.height; ++y) raw.rows[y] = raw.pixels.data() + rowbytes * y;
    png_read_image(png, raw.rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
}

bool encode(std::FILE* file, int width, int height, int channels, int depth,
            const std::vector<png_byte>& buffer, ErrorSink& sink) {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, png_error_fn, png_warning_fn);
    if (!png) return false;
    png_infop info = png_create_info_struct(png);
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        return false;
    }
    png_init_io(png, file);
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 depth, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * (depth / 8);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(buffer.data() + rowbytes * y));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return true;
}

}  // namespace

SrgbImage read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw PngError("cannot open " + path.string());
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw PngError(path.string() + " is not a PNG file");
    }
    RawPng raw;
    ErrorSink sink;
    if (!decode(file.get(), raw, sink)) throw PngError(path.string() + ": " + sink.message);

    const int channels = raw.channels >= 3 ? 3 : 1;
    const double scale = raw.depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
    Image img(raw.width, raw.height, channels);
    for (int y = 0; y < raw.height; ++y) {
        const png_byte* row = raw.rows[y];
        for (int x = 0; x < raw.width; ++x) {
            for (int c = 0; c < channels; ++c) {
                const std::size_t idx = static_cast<std::size_t>(x) * raw.channels + c;
                // 16-bit samples are big-endian in the file.
                const unsigned v = raw.depth == 16 ? (row[2 * idx] << 8) | row[2 * idx + 1] : row[idx];
                img.at(x, y, c) = v * scale;
            }
        }
    }
    return SrgbImage::from(std::move(img));
}

void write_png(const std::filesystem::path& path, const Image& img, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw InvalidArgument("PNG bit depth must be 8 or 16");
    if (img.channels() != 1 && img.channels() != 3) {
        throw InvalidArgument("PNG output needs 1 or 3 channels");
    }
    const double max_value = bit_depth == 16 ? 65535.0 : 255.0;
    std::vector<png_byte> buffer(img.size() * (bit_depth / 8));
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::clamp(img.data()[i], 0.0, 1.0);
        const auto q = static_cast<unsigned>(std::lround(v * max_value));
        if (bit_depth == 16) {
            buffer[2 * i] = static_cast<png_byte>(q >> 8);
            buffer[2 * i + 1] = static_cast<png_byte>(q & 0xFF);
        } else {
            buffer[i] = static_cast<png_byte>(q);
        }
    }
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw PngError("cannot open " + path.string() + " for writing");
    ErrorSink sink;
    if (!encode(file.get(), img.width(), img.height(), img.channels(), bit_depth, buffer, sink)) {
        throw PngError(path.string() + ": " + sink.message);
    }
}

void write_nano_burst_png(const std::filesystem::path& path, const NanoBurst& nb) {
    const unsigned step = nano_burst_png_step(nb.n_frames);
    Image img(nb.width, nb.height, 1);
    for (std::size_t i = 0; i < nb.counts.size(); ++i) {
        img.data()[i] = static_cast<double>(nb.counts[i] * step) / 65535.0;
    }
    write_png(path, img, 16);
}

NanoBurst read_nano_burst_png(const std::filesystem::path& path, int n_frames,
                              std::optional<BayerPattern> pattern) {
    if (n_frames < 1) throw InvalidArgument("nano-burst frame count must be >= 1");
    const auto img = read_png(path);
    if (img.pixels.channels() != 1) throw PngError(path.string() + ": nano-burst PNG must be gray");
    const unsigned step = nano_burst_png_step(n_frames);
    NanoBurst nb{img.pixels.width(), img.pixels.height(), n_frames,
                 std::vector<std::uint16_t>(img.pixels.pixel_count()), pattern};
    for (std::size_t i = 0; i < nb.counts.size(); ++i) {
        const auto raw = static_cast<unsigned>(std::lround(img.pixels.data()[i] * 65535.0));
        if (raw % step != 0 || raw / step > static_cast<unsigned>(n_frames)) {
            throw PngError(path.string() + ": value " + std::to_string(raw) +
                           " is not on the nano-burst lattice for n=" + std::to_string(n_frames));
        }
        nb.counts[i] = static_cast<std::uint16_t>(raw / step);
    }
    return nb;
}

}  // namespace qburst
