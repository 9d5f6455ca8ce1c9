#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tropnnc/linalg.hpp"
#include "tropnnc/tensor.hpp"

namespace tropnnc {

struct LinearLayer {
    Tensor weight; // [out x in]
    Tensor bias;   // [out]
};

struct Conv2dLayer {
    Tensor kernel; // [outC x inC x kH x kW]
    Tensor bias;   // [outC]
    std::size_t stride = 1;
    std::size_t padding = 0;
};

struct ReluLayer {};

struct MaxPoolLayer {
    std::size_t size = 2;
    std::size_t stride = 2;
};

struct AvgPoolLayer {
    std::size_t size = 2;
    std::size_t stride = 2;
};

struct BatchNormLayer {
    Tensor gamma;        // [C]
    Tensor beta;         // [C]
    Tensor running_mean; // [C]
    Tensor running_var;  // [C], entries >= 0
    double epsilon = 1e-5;
};

struct FlattenLayer {};

using Layer = std::variant<LinearLayer, Conv2dLayer, ReluLayer, MaxPoolLayer,
                           AvgPoolLayer, BatchNormLayer, FlattenLayer>;

const char* layer_kind_name(const Layer& layer);

struct Network {
    std::vector<Layer> layers;
    std::vector<std::size_t> input_shape; // e.g. {784} or {1, 28, 28}
};

// Shape of the data after each layer (index 0 = input shape); validates that
// consecutive layers compose, at most one Flatten, and that every BatchNorm
// immediately follows a Linear or Conv2d.
std::vector<std::vector<std::size_t>> infer_shapes(const Network& net);

void validate(const Network& net);

Tensor forward(const Network& net, const Tensor& x);

std::size_t count_params(const Network& net);
std::size_t count_flops(const Network& net, const std::vector<std::size_t>& input_shape);

// Folds every BatchNorm into its preceding Linear/Conv2d layer.
Network fuse_batchnorm(const Network& net);

// Fuses BatchNorm at layer index bn_idx into the parametric layer right
// before it; other layers untouched.
Network fuse_batchnorm_at(const Network& net, std::size_t bn_idx);

// Conv weight matricization. flatten_conv_in lays each output channel's
// kernel out as one row (input-channel major, then kernel row, then kernel
// column) with the bias appended as the last column: [outC x (inC*kH*kW + 1)].
Mat flatten_conv_in(const Conv2dLayer& layer);

// flatten_conv_out unravels the next layer's kernels column-wise per input
// channel: [(outC_next*kH*kW) x inC_next].
Mat flatten_conv_out(const Conv2dLayer& next_layer);

// Inverses of the two flattenings.
Conv2dLayer unflatten_conv_in(const Mat& m, std::size_t in_channels, std::size_t kh,
                              std::size_t kw, std::size_t stride, std::size_t padding);
Tensor unflatten_conv_out(const Mat& m, std::size_t out_channels, std::size_t kh,
                          std::size_t kw);

} // namespace tropnnc
