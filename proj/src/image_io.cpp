#include "hvdflow/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "hvdflow/flo_io.hpp"

namespace hvdflow {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

constexpr double kLumR = 0.299, kLumG = 0.587, kLumB = 0.114;

// ---- PNM (PGM/PPM) ----

int pnm_next_value(std::FILE* f, const std::string& path) {
    int c = std::fgetc(f);
    for (;;) {
        while (c != EOF && std::isspace(c)) c = std::fgetc(f);
        if (c == '#') {
            while (c != EOF && c != '\n') c = std::fgetc(f);
            continue;
        }
        break;
    }
    if (c == EOF || !std::isdigit(c)) throw FormatError("read_image: bad PNM header: " + path);
    int value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        c = std::fgetc(f);
    }
    return value;
}

ScalarGrid read_pnm(std::FILE* f, const std::string& path) {
    char magic[2];
    if (std::fread(magic, 1, 2, f) != 2 || magic[0] != 'P')
        throw FormatError("read_image: not a PNM file: " + path);
    const char type = magic[1];
    if (type != '2' && type != '3' && type != '5' && type != '6')
        throw FormatError("read_image: unsupported PNM type: " + path);
    const bool ascii = type == '2' || type == '3';
    const bool rgb = type == '3' || type == '6';

    const int w = pnm_next_value(f, path);
    const int h = pnm_next_value(f, path);
    const int maxval = pnm_next_value(f, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw FormatError("read_image: bad PNM dimensions: " + path);

    const std::size_t channels = rgb ? 3 : 1;
    const std::size_t samples = static_cast<std::size_t>(w) * h * channels;
    std::vector<double> raw(samples);
    if (ascii) {
        for (std::size_t s = 0; s < samples; ++s) raw[s] = pnm_next_value(f, path);
    } else {
        // Binary payload starts after exactly one whitespace byte (consumed by
        // pnm_next_value's trailing fgetc), samples big-endian when 2 bytes.
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(samples * bytes);
        if (std::fread(buf.data(), 1, buf.size(), f) != buf.size())
            throw FormatError("read_image: PNM data truncated: " + path);
        for (std::size_t s = 0; s < samples; ++s)
            raw[s] = bytes == 1 ? buf[s] : (buf[2 * s] << 8 | buf[2 * s + 1]);
    }

    ScalarGrid out(w, h);
    for (std::size_t p = 0; p < out.size(); ++p) {
        double v = rgb ? kLumR * raw[3 * p] + kLumG * raw[3 * p + 1] + kLumB * raw[3 * p + 2]
                       : raw[p];
        out[p] = std::clamp(v / maxval, 0.0, 1.0);
    }
    return out;
}

// ---- PNG ----

ScalarGrid read_png_file(std::FILE* f, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("read_image: libpng init failed");
    }

    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("read_image: PNG decode failed: " + path);
    }

    png_init_io(png, f);
    png_read_info(png, info);
    int color_type = 0;
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    if ((channels != 1 && channels != 3) || (bit_depth != 8 && bit_depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("read_image: unsupported PNG layout: " + path);
    }

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    data.resize(row_bytes * h);
    rows.resize(h);
    for (png_uint_32 j = 0; j < h; ++j) rows[j] = data.data() + j * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
    ScalarGrid out(static_cast<int>(w), static_cast<int>(h));
    for (png_uint_32 j = 0; j < h; ++j) {
        const png_byte* row = data.data() + j * row_bytes;
        for (png_uint_32 i = 0; i < w; ++i) {
            double samples[3] = {0.0, 0.0, 0.0};
            for (int c = 0; c < channels; ++c) {
                const std::size_t s = (static_cast<std::size_t>(i) * channels + c);
                samples[c] = bit_depth == 8
                                 ? row[s]
                                 : (row[2 * s] << 8 | row[2 * s + 1]);  // PNG is big-endian
            }
            const double v = channels == 3
                                 ? kLumR * samples[0] + kLumG * samples[1] + kLumB * samples[2]
                                 : samples[0];
            out.at(static_cast<int>(i), static_cast<int>(j)) = v / maxval;
        }
    }
    return out;
}

void write_png(const std::string& path, int width, int height, int color_type,
               const std::vector<std::uint8_t>& bytes) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw FormatError("write_png: cannot open " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("write_png: libpng init failed");
    }
    std::vector<png_bytep> rows(height);
    const std::size_t stride =
        static_cast<std::size_t>(width) * (color_type == PNG_COLOR_TYPE_RGB ? 3 : 1);
    for (int j = 0; j < height; ++j)
        rows[j] = const_cast<png_bytep>(bytes.data() + j * stride);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("write_png: encode failed: " + path);
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

ScalarGrid read_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw FormatError("read_image: cannot open " + path);

    unsigned char sig[8] = {0};
    const std::size_t got = std::fread(sig, 1, sizeof(sig), f.get());
    std::rewind(f.get());
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) return read_png_file(f.get(), path);
    if (got >= 2 && sig[0] == 'P' && sig[1] >= '1' && sig[1] <= '6')
        return read_pnm(f.get(), path);
    throw FormatError("read_image: unsupported format: " + path);
}

void write_pgm16(const std::string& path, const ScalarGrid& g) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw FormatError("write_pgm16: cannot open " + path);
    std::fprintf(f.get(), "P5\n%d %d\n65535\n", g.width(), g.height());
    std::vector<unsigned char> row(2u * g.width());
    for (int j = 0; j < g.height(); ++j) {
        for (int i = 0; i < g.width(); ++i) {
            const double v = std::clamp(g.at(i, j), 0.0, 1.0);
            const unsigned q = static_cast<unsigned>(std::lround(v * 65535.0));
            row[2 * i] = static_cast<unsigned char>(q >> 8);
            row[2 * i + 1] = static_cast<unsigned char>(q & 0xFF);
        }
        if (std::fwrite(row.data(), 1, row.size(), f.get()) != row.size())
            throw FormatError("write_pgm16: write failed: " + path);
    }
}

void write_png_rgb(const std::string& path, const RgbImage& img) {
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, img.pixels);
}

void write_png_gray(const std::string& path, const ScalarGrid& g) {
    std::vector<std::uint8_t> bytes(g.size());
    for (std::size_t p = 0; p < g.size(); ++p)
        bytes[p] = static_cast<std::uint8_t>(std::lround(std::clamp(g[p], 0.0, 1.0) * 255.0));
    write_png(path, g.width(), g.height(), PNG_COLOR_TYPE_GRAY, bytes);
}

}  // namespace hvdflow
