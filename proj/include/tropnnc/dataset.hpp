#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tropnnc/errors.hpp"
#include "tropnnc/tensor.hpp"

namespace tropnnc {

struct DatasetSplit {
    std::size_t count = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> images; // count*height*width, values in [0, 1]
    std::vector<int> labels;    // count entries in [0, num_classes)

    Tensor image(std::size_t i) const {
        Tensor t({height, width});
        std::copy(images.begin() + static_cast<std::ptrdiff_t>(i * height * width),
                  images.begin() + static_cast<std::ptrdiff_t>((i + 1) * height * width),
                  t.data.begin());
        return t;
    }
    Tensor flat_image(std::size_t i) const {
        Tensor t({height * width});
        std::copy(images.begin() + static_cast<std::ptrdiff_t>(i * height * width),
                  images.begin() + static_cast<std::ptrdiff_t>((i + 1) * height * width),
                  t.data.begin());
        return t;
    }
};

// IDX container (big-endian): magic 0x00000803 for images, 0x00000801 for
// labels. Pixel bytes are scaled by 1/255.
DatasetSplit load_idx(const std::string& images_path, const std::string& labels_path);
void save_idx(const DatasetSplit& ds, const std::string& images_path,
              const std::string& labels_path);

// Keeps samples whose label appears in classes, relabeled to 0..len-1 in the
// given order.
DatasetSplit filter_classes(const DatasetSplit& ds, const std::vector<int>& classes);

// Deterministic 10-class glyph dataset (segment-rendered digit shapes with
// jitter and noise) used as the desk-scale stand-in when no IDX files are
// given.
DatasetSplit make_synthetic_digits(std::size_t per_class, std::uint64_t seed,
                                   std::size_t height = 28, std::size_t width = 28);

} // namespace tropnnc
