#include "tropnnc/network.hpp"

#include <algorithm>
#include <cmath>

namespace tropnnc {

const char* layer_kind_name(const Layer& layer) {
    switch (layer.index()) {
        case 0: return "linear";
        case 1: return "conv2d";
        case 2: return "relu";
        case 3: return "maxpool";
        case 4: return "avgpool";
        case 5: return "batchnorm";
        case 6: return "flatten";
    }
    return "?";
}

namespace {

std::size_t pool_out(std::size_t in, std::size_t size, std::size_t stride) {
    if (in < size) throw ShapeError("pool window larger than input");
    return (in - size) / stride + 1;
}

std::size_t conv_out(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    const std::size_t padded = in + 2 * pad;
    if (padded < k) throw ShapeError("conv kernel larger than padded input");
    return (padded - k) / stride + 1;
}

std::size_t flat_size(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

} // namespace

std::vector<std::vector<std::size_t>> infer_shapes(const Network& net) {
    std::vector<std::vector<std::size_t>> shapes;
    shapes.push_back(net.input_shape);
    std::vector<std::size_t> cur = net.input_shape;
    std::size_t flatten_count = 0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        const Layer& layer = net.layers[li];
        if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
            if (lin->weight.ndim() != 2 || lin->bias.ndim() != 1)
                throw ShapeError("linear layer tensors malformed");
            if (lin->bias.shape[0] != lin->weight.shape[0])
                throw ShapeError("linear bias length != out features");
            const std::size_t in = flat_size(cur);
            if (cur.size() != 1 || in != lin->weight.shape[1])
                throw ShapeError("linear layer input dim mismatch at layer " + std::to_string(li));
            cur = {lin->weight.shape[0]};
        } else if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
            if (conv->kernel.ndim() != 4) throw ShapeError("conv kernel must be 4-D");
            if (conv->bias.shape[0] != conv->kernel.shape[0])
                throw ShapeError("conv bias length != out channels");
            if (cur.size() != 3 || cur[0] != conv->kernel.shape[1])
                throw ShapeError("conv layer input shape mismatch at layer " + std::to_string(li));
            if (conv->stride == 0) throw ShapeError("conv stride must be positive");
            cur = {conv->kernel.shape[0],
                   conv_out(cur[1], conv->kernel.shape[2], conv->stride, conv->padding),
                   conv_out(cur[2], conv->kernel.shape[3], conv->stride, conv->padding)};
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            // shape preserved
        } else if (const auto* mp = std::get_if<MaxPoolLayer>(&layer)) {
            if (cur.size() != 3) throw ShapeError("maxpool expects CHW input");
            cur = {cur[0], pool_out(cur[1], mp->size, mp->stride), pool_out(cur[2], mp->size, mp->stride)};
        } else if (const auto* ap = std::get_if<AvgPoolLayer>(&layer)) {
            if (cur.size() != 3) throw ShapeError("avgpool expects CHW input");
            cur = {cur[0], pool_out(cur[1], ap->size, ap->stride), pool_out(cur[2], ap->size, ap->stride)};
        } else if (const auto* bn = std::get_if<BatchNormLayer>(&layer)) {
            if (li == 0 || (!std::holds_alternative<LinearLayer>(net.layers[li - 1]) &&
                            !std::holds_alternative<Conv2dLayer>(net.layers[li - 1])))
                throw ShapeError("batchnorm must immediately follow a linear or conv2d layer");
            const std::size_t channels = cur[0];
            if (bn->gamma.shape[0] != channels || bn->beta.shape[0] != channels ||
                bn->running_mean.shape[0] != channels || bn->running_var.shape[0] != channels)
                throw ShapeError("batchnorm parameter length != channels");
            if (bn->epsilon <= 0.0) throw ShapeError("batchnorm epsilon must be positive");
            for (double v : bn->running_var.data)
                if (v < 0.0) throw ShapeError("batchnorm running_var entries must be >= 0");
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            if (++flatten_count > 1) throw ShapeError("at most one flatten layer");
            cur = {flat_size(cur)};
        }
        shapes.push_back(cur);
    }
    return shapes;
}

void validate(const Network& net) { infer_shapes(net); }

namespace {

Tensor linear_forward(const LinearLayer& lin, const Tensor& x) {
    const std::size_t out = lin.weight.shape[0];
    const std::size_t in = lin.weight.shape[1];
    Tensor y({out});
    for (std::size_t o = 0; o < out; ++o) {
        double s = lin.bias.data[o];
        const double* w = lin.weight.data.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) s += w[i] * x.data[i];
        y.data[o] = s;
    }
    return y;
}

Tensor conv_forward(const Conv2dLayer& conv, const Tensor& x) {
    const std::size_t outC = conv.kernel.shape[0];
    const std::size_t inC = conv.kernel.shape[1];
    const std::size_t kH = conv.kernel.shape[2];
    const std::size_t kW = conv.kernel.shape[3];
    const std::size_t H = x.shape[1];
    const std::size_t W = x.shape[2];
    const std::size_t outH = (H + 2 * conv.padding - kH) / conv.stride + 1;
    const std::size_t outW = (W + 2 * conv.padding - kW) / conv.stride + 1;
    Tensor y({outC, outH, outW});
    const long pad = static_cast<long>(conv.padding);
    for (std::size_t oc = 0; oc < outC; ++oc) {
        for (std::size_t oy = 0; oy < outH; ++oy) {
            for (std::size_t ox = 0; ox < outW; ++ox) {
                double s = conv.bias.data[oc];
                const long y0 = static_cast<long>(oy * conv.stride) - pad;
                const long x0 = static_cast<long>(ox * conv.stride) - pad;
                for (std::size_t ic = 0; ic < inC; ++ic) {
                    for (std::size_t ky = 0; ky < kH; ++ky) {
                        const long iy = y0 + static_cast<long>(ky);
                        if (iy < 0 || iy >= static_cast<long>(H)) continue;
                        for (std::size_t kx = 0; kx < kW; ++kx) {
                            const long ix = x0 + static_cast<long>(kx);
                            if (ix < 0 || ix >= static_cast<long>(W)) continue;
                            s += conv.kernel.at4(oc, ic, ky, kx) *
                                 x.data[(ic * H + static_cast<std::size_t>(iy)) * W +
                                        static_cast<std::size_t>(ix)];
                        }
                    }
                }
                y.data[(oc * outH + oy) * outW + ox] = s;
            }
        }
    }
    return y;
}

template <bool kMax>
Tensor pool_forward(std::size_t size, std::size_t stride, const Tensor& x) {
    const std::size_t C = x.shape[0], H = x.shape[1], W = x.shape[2];
    const std::size_t outH = (H - size) / stride + 1;
    const std::size_t outW = (W - size) / stride + 1;
    Tensor y({C, outH, outW});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t oy = 0; oy < outH; ++oy) {
            for (std::size_t ox = 0; ox < outW; ++ox) {
                double acc = kMax ? -HUGE_VAL : 0.0;
                for (std::size_t ky = 0; ky < size; ++ky) {
                    for (std::size_t kx = 0; kx < size; ++kx) {
                        const double v = x.data[(c * H + oy * stride + ky) * W + ox * stride + kx];
                        if constexpr (kMax)
                            acc = std::max(acc, v);
                        else
                            acc += v;
                    }
                }
                y.data[(c * outH + oy) * outW + ox] = kMax ? acc : acc / double(size * size);
            }
        }
    }
    return y;
}

Tensor batchnorm_forward(const BatchNormLayer& bn, const Tensor& x) {
    Tensor y = x;
    const std::size_t C = bn.gamma.shape[0];
    const std::size_t spatial = x.numel() / C;
    for (std::size_t c = 0; c < C; ++c) {
        const double inv = 1.0 / std::sqrt(bn.running_var.data[c] + bn.epsilon);
        const double g = bn.gamma.data[c] * inv;
        const double b = bn.beta.data[c] - bn.running_mean.data[c] * g;
        for (std::size_t s = 0; s < spatial; ++s) y.data[c * spatial + s] = g * x.data[c * spatial + s] + b;
    }
    return y;
}

} // namespace

Tensor forward(const Network& net, const Tensor& x) {
    if (x.shape != net.input_shape) throw ShapeError("forward: input shape mismatch");
    Tensor cur = x;
    for (const Layer& layer : net.layers) {
        if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
            if (cur.numel() != lin->weight.shape[1])
                throw ShapeError("forward: linear input dim mismatch");
            if (cur.ndim() != 1) cur = Tensor({cur.numel()}, cur.data);
            cur = linear_forward(*lin, cur);
        } else if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
            cur = conv_forward(*conv, cur);
        } else if (std::holds_alternative<ReluLayer>(layer)) {
            for (auto& v : cur.data) v = std::max(v, 0.0);
        } else if (const auto* mp = std::get_if<MaxPoolLayer>(&layer)) {
            cur = pool_forward<true>(mp->size, mp->stride, cur);
        } else if (const auto* ap = std::get_if<AvgPoolLayer>(&layer)) {
            cur = pool_forward<false>(ap->size, ap->stride, cur);
        } else if (const auto* bn = std::get_if<BatchNormLayer>(&layer)) {
            cur = batchnorm_forward(*bn, cur);
        } else if (std::holds_alternative<FlattenLayer>(layer)) {
            cur = Tensor({cur.numel()}, cur.data);
        }
    }
    return cur;
}

std::size_t count_params(const Network& net) {
    std::size_t n = 0;
    for (const Layer& layer : net.layers) {
        if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
            n += lin->weight.numel() + lin->bias.numel();
        } else if (const auto* conv = std::get_if<Conv2dLayer>(&layer)) {
            n += conv->kernel.numel() + conv->bias.numel();
        } else if (const auto* bn = std::get_if<BatchNormLayer>(&layer)) {
            n += bn->gamma.numel() + bn->beta.numel() + bn->running_mean.numel() +
                 bn->running_var.numel();
        }
    }
    return n;
}

// Convention: one multiply-accumulate = 2 ops; pooling, ReLU, batchnorm = 0.
std::size_t count_flops(const Network& net, const std::vector<std::size_t>& input_shape) {
    Network probe = net;
    probe.input_shape = input_shape;
    const auto shapes = infer_shapes(probe);
    std::size_t flops = 0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
        if (const auto* lin = std::get_if<LinearLayer>(&net.layers[li])) {
            flops += 2 * lin->weight.shape[0] * lin->weight.shape[1];
        } else if (const auto* conv = std::get_if<Conv2dLayer>(&net.layers[li])) {
            const auto& out = shapes[li + 1];
            flops += 2 * conv->kernel.shape[2] * conv->kernel.shape[3] * conv->kernel.shape[1] *
                     conv->kernel.shape[0] * out[1] * out[2];
        }
    }
    return flops;
}

Network fuse_batchnorm_at(const Network& net, std::size_t bn_idx) {
    const auto* bn = std::get_if<BatchNormLayer>(&net.layers[bn_idx]);
    if (bn == nullptr) throw ShapeError("fuse_batchnorm_at: layer is not a batchnorm");
    if (bn_idx == 0) throw ShapeError("batchnorm without eligible predecessor");
    Network out = net;
    const std::size_t C = bn->gamma.shape[0];
    std::vector<double> g(C), shift(C);
    for (std::size_t c = 0; c < C; ++c) {
        g[c] = bn->gamma.data[c] / std::sqrt(bn->running_var.data[c] + bn->epsilon);
        shift[c] = bn->beta.data[c];
    }
    Layer& prev = out.layers[bn_idx - 1];
    if (auto* lin = std::get_if<LinearLayer>(&prev)) {
        const std::size_t in = lin->weight.shape[1];
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t j = 0; j < in; ++j) lin->weight.data[c * in + j] *= g[c];
            lin->bias.data[c] = g[c] * (lin->bias.data[c] - bn->running_mean.data[c]) + shift[c];
        }
    } else if (auto* conv = std::get_if<Conv2dLayer>(&prev)) {
        const std::size_t per = conv->kernel.numel() / conv->kernel.shape[0];
        for (std::size_t c = 0; c < C; ++c) {
            for (std::size_t j = 0; j < per; ++j) conv->kernel.data[c * per + j] *= g[c];
            conv->bias.data[c] = g[c] * (conv->bias.data[c] - bn->running_mean.data[c]) + shift[c];
        }
    } else {
        throw ShapeError("batchnorm without eligible predecessor");
    }
    out.layers.erase(out.layers.begin() + static_cast<std::ptrdiff_t>(bn_idx));
    return out;
}

Network fuse_batchnorm(const Network& net) {
    Network out = net;
    for (std::size_t i = 0; i < out.layers.size();) {
        if (std::holds_alternative<BatchNormLayer>(out.layers[i])) {
            out = fuse_batchnorm_at(out, i);
        } else {
            ++i;
        }
    }
    return out;
}

Mat flatten_conv_in(const Conv2dLayer& layer) {
    const std::size_t outC = layer.kernel.shape[0];
    const std::size_t per = layer.kernel.shape[1] * layer.kernel.shape[2] * layer.kernel.shape[3];
    Mat m(outC, per + 1);
    for (std::size_t o = 0; o < outC; ++o) {
        for (std::size_t j = 0; j < per; ++j) m(o, j) = layer.kernel.data[o * per + j];
        m(o, per) = layer.bias.data[o];
    }
    return m;
}

Mat flatten_conv_out(const Conv2dLayer& next_layer) {
    const std::size_t outC = next_layer.kernel.shape[0];
    const std::size_t inC = next_layer.kernel.shape[1];
    const std::size_t kh = next_layer.kernel.shape[2];
    const std::size_t kw = next_layer.kernel.shape[3];
    Mat m(outC * kh * kw, inC);
    for (std::size_t o = 0; o < outC; ++o)
        for (std::size_t i = 0; i < inC; ++i)
            for (std::size_t r = 0; r < kh; ++r)
                for (std::size_t c = 0; c < kw; ++c)
                    m((o * kh + r) * kw + c, i) = next_layer.kernel.at4(o, i, r, c);
    return m;
}

Conv2dLayer unflatten_conv_in(const Mat& m, std::size_t in_channels, std::size_t kh,
                              std::size_t kw, std::size_t stride, std::size_t padding) {
    const std::size_t per = in_channels * kh * kw;
    if (m.cols != per + 1) throw ShapeError("unflatten_conv_in: column count mismatch");
    Conv2dLayer layer;
    layer.kernel = Tensor({m.rows, in_channels, kh, kw});
    layer.bias = Tensor({m.rows});
    layer.stride = stride;
    layer.padding = padding;
    for (std::size_t o = 0; o < m.rows; ++o) {
        for (std::size_t j = 0; j < per; ++j) layer.kernel.data[o * per + j] = m(o, j);
        layer.bias.data[o] = m(o, per);
    }
    return layer;
}

Tensor unflatten_conv_out(const Mat& m, std::size_t out_channels, std::size_t kh,
                          std::size_t kw) {
    if (m.rows != out_channels * kh * kw) throw ShapeError("unflatten_conv_out: row count mismatch");
    Tensor kernel({out_channels, m.cols, kh, kw});
    for (std::size_t o = 0; o < out_channels; ++o)
        for (std::size_t i = 0; i < m.cols; ++i)
            for (std::size_t r = 0; r < kh; ++r)
                for (std::size_t c = 0; c < kw; ++c)
                    kernel.at4(o, i, r, c) = m((o * kh + r) * kw + c, i);
    return kernel;
}

} // namespace tropnnc
