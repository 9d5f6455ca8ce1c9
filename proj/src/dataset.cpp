#include "tropnnc/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include "tropnnc/rng.hpp"

namespace tropnnc {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& is) {
    std::array<unsigned char, 4> b{};
    is.read(reinterpret_cast<char*>(b.data()), 4);
    if (!is) throw IoError("idx: truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& os, std::uint32_t v) {
    const std::array<char, 4> b = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                                   static_cast<char>(v >> 8), static_cast<char>(v)};
    os.write(b.data(), 4);
}

} // namespace

DatasetSplit load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream fi(images_path, std::ios::binary);
    if (!fi) throw IoError("idx: cannot open " + images_path);
    if (read_be32(fi) != kImageMagic) throw IoError("idx: wrong image magic in " + images_path);
    const std::size_t n = read_be32(fi);
    const std::size_t h = read_be32(fi);
    const std::size_t w = read_be32(fi);

    DatasetSplit ds;
    ds.count = n;
    ds.height = h;
    ds.width = w;
    ds.images.resize(n * h * w);
    {
        std::vector<unsigned char> raw(n * h * w);
        fi.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(fi.gcount()) != raw.size())
            throw IoError("idx: truncated image payload in " + images_path);
        for (std::size_t i = 0; i < raw.size(); ++i) ds.images[i] = raw[i] / 255.0;
    }

    std::ifstream fl(labels_path, std::ios::binary);
    if (!fl) throw IoError("idx: cannot open " + labels_path);
    if (read_be32(fl) != kLabelMagic) throw IoError("idx: wrong label magic in " + labels_path);
    const std::size_t nl = read_be32(fl);
    if (nl != n) throw IoError("idx: image/label count mismatch");
    ds.labels.resize(n);
    {
        std::vector<unsigned char> raw(n);
        fl.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (static_cast<std::size_t>(fl.gcount()) != raw.size())
            throw IoError("idx: truncated label payload in " + labels_path);
        for (std::size_t i = 0; i < n; ++i) ds.labels[i] = raw[i];
    }
    return ds;
}

void save_idx(const DatasetSplit& ds, const std::string& images_path,
              const std::string& labels_path) {
    std::ofstream fi(images_path, std::ios::binary);
    if (!fi) throw IoError("idx: cannot open " + images_path + " for writing");
    write_be32(fi, kImageMagic);
    write_be32(fi, static_cast<std::uint32_t>(ds.count));
    write_be32(fi, static_cast<std::uint32_t>(ds.height));
    write_be32(fi, static_cast<std::uint32_t>(ds.width));
    for (double v : ds.images) {
        const auto byte = static_cast<unsigned char>(
            std::clamp(std::lround(v * 255.0), 0L, 255L));
        fi.put(static_cast<char>(byte));
    }
    std::ofstream fl(labels_path, std::ios::binary);
    if (!fl) throw IoError("idx: cannot open " + labels_path + " for writing");
    write_be32(fl, kLabelMagic);
    write_be32(fl, static_cast<std::uint32_t>(ds.count));
    for (int l : ds.labels) fl.put(static_cast<char>(l));
}

DatasetSplit filter_classes(const DatasetSplit& ds, const std::vector<int>& classes) {
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (classes[i] == classes[j]) throw ConfigError("filter_classes: duplicate class");
    DatasetSplit out;
    out.height = ds.height;
    out.width = ds.width;
    const std::size_t px = ds.height * ds.width;
    for (std::size_t i = 0; i < ds.count; ++i) {
        const auto it = std::find(classes.begin(), classes.end(), ds.labels[i]);
        if (it == classes.end()) continue;
        out.images.insert(out.images.end(), ds.images.begin() + static_cast<std::ptrdiff_t>(i * px),
                          ds.images.begin() + static_cast<std::ptrdiff_t>((i + 1) * px));
        out.labels.push_back(static_cast<int>(it - classes.begin()));
        ++out.count;
    }
    if (out.count == 0) throw ConfigError("filter_classes: no samples left");
    return out;
}

namespace {

// segment-display geometry on a unit square: {x0, y0, x1, y1}
struct Seg {
    double x0, y0, x1, y1;
};

constexpr Seg kSegments[7] = {
    {0.2, 0.15, 0.8, 0.15}, // top
    {0.8, 0.15, 0.8, 0.50}, // upper right
    {0.8, 0.50, 0.8, 0.85}, // lower right
    {0.2, 0.85, 0.8, 0.85}, // bottom
    {0.2, 0.50, 0.2, 0.85}, // lower left
    {0.2, 0.15, 0.2, 0.50}, // upper left
    {0.2, 0.50, 0.8, 0.50}, // middle
};

constexpr unsigned char kDigitSegments[10] = {
    0b0111111, // 0
    0b0000110, // 1
    0b1011011, // 2
    0b1001111, // 3
    0b1100110, // 4
    0b1101101, // 5
    0b1111101, // 6
    0b0000111, // 7
    0b1111111, // 8
    0b1101111, // 9
};

double point_segment_distance(double px, double py, const Seg& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len_sq = dx * dx + dy * dy;
    double t = len_sq > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double qx = s.x0 + t * dx, qy = s.y0 + t * dy;
    return std::sqrt((px - qx) * (px - qx) + (py - qy) * (py - qy));
}

} // namespace

DatasetSplit make_synthetic_digits(std::size_t per_class, std::uint64_t seed,
                                   std::size_t height, std::size_t width) {
    DatasetSplit ds;
    ds.height = height;
    ds.width = width;
    ds.count = per_class * 10;
    ds.images.assign(ds.count * height * width, 0.0);
    ds.labels.resize(ds.count);

    Rng rng(seed);
    std::vector<std::size_t> order(ds.count);
    for (std::size_t i = 0; i < ds.count; ++i) order[i] = i;
    rng.shuffle(order);

    for (std::size_t slot = 0; slot < ds.count; ++slot) {
        const int digit = static_cast<int>(order[slot] % 10);
        ds.labels[slot] = digit;
        double* img = ds.images.data() + slot * height * width;

        const double ox = rng.uniform(-0.08, 0.08);
        const double oy = rng.uniform(-0.08, 0.08);
        const double scale = rng.uniform(0.85, 1.1);
        const double thick = rng.uniform(0.05, 0.09);
        const double brightness = rng.uniform(0.8, 1.0);
        const unsigned char mask = kDigitSegments[digit];

        for (std::size_t y = 0; y < height; ++y) {
            for (std::size_t x = 0; x < width; ++x) {
                const double ux = ((x + 0.5) / double(width) - 0.5) / scale + 0.5 - ox;
                const double uy = ((y + 0.5) / double(height) - 0.5) / scale + 0.5 - oy;
                double best = 1e9;
                for (int s = 0; s < 7; ++s)
                    if (mask & (1u << s))
                        best = std::min(best, point_segment_distance(ux, uy, kSegments[s]));
                const double ink = std::clamp(1.0 - (best - thick) / thick, 0.0, 1.0);
                double v = brightness * ink + 0.04 * rng.gaussian();
                img[y * width + x] = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return ds;
}

} // namespace tropnnc
