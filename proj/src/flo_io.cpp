#include "hvdflow/flo_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace hvdflow {

namespace {

constexpr float kFloTag = 202021.25f;  // spells "PIEH" in little-endian bytes
constexpr std::int32_t kMaxDimension = 99999;

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

FlowField read_flo(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw FormatError("read_flo: cannot open " + path);

    float tag = 0.0f;
    std::int32_t w = 0, h = 0;
    if (std::fread(&tag, sizeof(tag), 1, f.get()) != 1 ||
        std::fread(&w, sizeof(w), 1, f.get()) != 1 ||
        std::fread(&h, sizeof(h), 1, f.get()) != 1)
        throw FormatError("read_flo: truncated header in " + path);
    if (tag != kFloTag) throw FormatError("read_flo: bad magic tag in " + path);
    if (w < 1 || h < 1 || w > kMaxDimension || h > kMaxDimension)
        throw FormatError("read_flo: implausible dimensions in " + path);

    FlowField out(w, h);
    std::vector<float> row(2u * w);
    for (std::int32_t j = 0; j < h; ++j) {
        if (std::fread(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw FormatError("read_flo: file too short: " + path);
        for (std::int32_t i = 0; i < w; ++i) {
            out.vx.at(i, j) = row[2 * i];
            out.vy.at(i, j) = row[2 * i + 1];
        }
    }
    return out;
}

void write_flo(const std::string& path, const FlowField& v) {
    for (std::size_t p = 0; p < v.vx.size(); ++p)
        if (!std::isfinite(v.vx[p]) || !std::isfinite(v.vy[p]))
            throw FormatError("write_flo: non-finite flow component");

    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw FormatError("write_flo: cannot open " + path);

    const std::int32_t w = v.width(), h = v.height();
    if (w > kMaxDimension || h > kMaxDimension)
        throw FormatError("write_flo: dimensions exceed the format limit");
    const float tag = kFloTag;
    if (std::fwrite(&tag, sizeof(tag), 1, f.get()) != 1 ||
        std::fwrite(&w, sizeof(w), 1, f.get()) != 1 ||
        std::fwrite(&h, sizeof(h), 1, f.get()) != 1)
        throw FormatError("write_flo: header write failed: " + path);

    std::vector<float> row(2u * w);
    for (std::int32_t j = 0; j < h; ++j) {
        for (std::int32_t i = 0; i < w; ++i) {
            row[2 * i] = static_cast<float>(v.vx.at(i, j));
            row[2 * i + 1] = static_cast<float>(v.vy.at(i, j));
        }
        if (std::fwrite(row.data(), sizeof(float), row.size(), f.get()) != row.size())
            throw FormatError("write_flo: data write failed: " + path);
    }
}

}  // namespace hvdflow
