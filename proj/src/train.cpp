#include "tropnnc/train.hpp"

#include <algorithm>
#include <cmath>

#include "tropnnc/rng.hpp"

namespace tropnnc {

namespace {

struct MlpState {
    std::vector<Mat> weights; // [out x in] per layer
    std::vector<Vec> biases;
};

MlpState init_state(const std::vector<std::size_t>& arch, Rng& rng) {
    MlpState st;
    for (std::size_t l = 0; l + 1 < arch.size(); ++l) {
        const std::size_t in = arch[l], out = arch[l + 1];
        Mat w(out, in);
        const double bound = std::sqrt(6.0 / double(in + out));
        for (auto& v : w.data) v = rng.uniform(-bound, bound);
        st.weights.push_back(std::move(w));
        st.biases.emplace_back(out, 0.0);
    }
    return st;
}

Network to_network(const MlpState& st, std::size_t input_dim) {
    Network net;
    net.input_shape = {input_dim};
    for (std::size_t l = 0; l < st.weights.size(); ++l) {
        LinearLayer lin;
        lin.weight = Tensor({st.weights[l].rows, st.weights[l].cols}, st.weights[l].data);
        lin.bias = Tensor({st.biases[l].size()}, st.biases[l]);
        net.layers.emplace_back(std::move(lin));
        if (l + 1 < st.weights.size()) net.layers.emplace_back(ReluLayer{});
    }
    return net;
}

} // namespace

Network train_mlp(const std::vector<std::size_t>& arch, const DatasetSplit& ds,
                  const TrainOptions& options) {
    if (arch.size() < 2) throw ConfigError("train_mlp: need at least input and output widths");
    if (arch.front() != ds.height * ds.width)
        throw ShapeError("train_mlp: arch[0] must equal the flattened input dim");
    const std::size_t classes = arch.back();
    for (int label : ds.labels)
        if (label < 0 || static_cast<std::size_t>(label) >= classes)
            throw ShapeError("train_mlp: label outside [0, classes)");

    Rng rng(options.seed);
    MlpState st = init_state(arch, rng);
    const std::size_t depth = st.weights.size();

    std::vector<std::size_t> order(ds.count);
    for (std::size_t i = 0; i < ds.count; ++i) order[i] = i;

    std::vector<Vec> act(depth + 1);   // post-activation per layer
    std::vector<Vec> pre(depth);       // pre-activation
    std::vector<Mat> grad_w(depth);
    std::vector<Vec> grad_b(depth);
    for (std::size_t l = 0; l < depth; ++l) {
        grad_w[l] = Mat(st.weights[l].rows, st.weights[l].cols);
        grad_b[l].assign(st.biases[l].size(), 0.0);
    }

    const std::size_t px = ds.height * ds.width;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < ds.count; start += options.batch_size) {
            const std::size_t end = std::min(ds.count, start + options.batch_size);
            for (std::size_t l = 0; l < depth; ++l) {
                std::fill(grad_w[l].data.begin(), grad_w[l].data.end(), 0.0);
                std::fill(grad_b[l].begin(), grad_b[l].end(), 0.0);
            }
            for (std::size_t bi = start; bi < end; ++bi) {
                const std::size_t sample = order[bi];
                act[0].assign(ds.images.begin() + static_cast<std::ptrdiff_t>(sample * px),
                              ds.images.begin() + static_cast<std::ptrdiff_t>((sample + 1) * px));
                for (std::size_t l = 0; l < depth; ++l) {
                    pre[l] = matvec(st.weights[l], act[l]);
                    for (std::size_t o = 0; o < pre[l].size(); ++o) pre[l][o] += st.biases[l][o];
                    act[l + 1] = pre[l];
                    if (l + 1 < depth)
                        for (auto& v : act[l + 1]) v = std::max(v, 0.0);
                }
                // softmax cross-entropy gradient at the logits
                Vec delta = act[depth];
                const double peak = *std::max_element(delta.begin(), delta.end());
                double z = 0.0;
                for (auto& v : delta) {
                    v = std::exp(v - peak);
                    z += v;
                }
                if (!std::isfinite(z) || z <= 0.0)
                    throw std::runtime_error("train_mlp: non-finite loss (diverged)");
                for (auto& v : delta) v /= z;
                delta[static_cast<std::size_t>(ds.labels[sample])] -= 1.0;

                for (std::size_t l = depth; l-- > 0;) {
                    for (std::size_t o = 0; o < delta.size(); ++o) {
                        grad_b[l][o] += delta[o];
                        const Vec& input = act[l];
                        double* row = grad_w[l].data.data() + o * grad_w[l].cols;
                        for (std::size_t i = 0; i < input.size(); ++i) row[i] += delta[o] * input[i];
                    }
                    if (l == 0) break;
                    Vec next(st.weights[l].cols, 0.0);
                    for (std::size_t o = 0; o < delta.size(); ++o) {
                        const double* row = st.weights[l].data.data() + o * st.weights[l].cols;
                        for (std::size_t i = 0; i < next.size(); ++i) next[i] += delta[o] * row[i];
                    }
                    for (std::size_t i = 0; i < next.size(); ++i)
                        if (pre[l - 1][i] <= 0.0) next[i] = 0.0;
                    delta = std::move(next);
                }
            }
            const double step = options.learning_rate / double(end - start);
            for (std::size_t l = 0; l < depth; ++l) {
                for (std::size_t t = 0; t < grad_w[l].data.size(); ++t)
                    st.weights[l].data[t] -= step * grad_w[l].data[t];
                for (std::size_t o = 0; o < grad_b[l].size(); ++o)
                    st.biases[l][o] -= step * grad_b[l][o];
            }
        }
    }
    return to_network(st, arch.front());
}

double eval_accuracy(const Network& net, const DatasetSplit& ds) {
    if (ds.count == 0) return 0.0;
    const bool flat_input = net.input_shape.size() == 1;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < ds.count; ++i) {
        Tensor x = flat_input ? ds.flat_image(i) : Tensor({1, ds.height, ds.width});
        if (!flat_input) {
            const Tensor img = ds.image(i);
            x.data = img.data;
        }
        const Tensor y = forward(net, x);
        std::size_t arg = 0;
        for (std::size_t c = 1; c < y.numel(); ++c)
            if (y.data[c] > y.data[arg]) arg = c; // strict: ties keep the lowest index
        if (static_cast<int>(arg) == ds.labels[i]) ++correct;
    }
    return double(correct) / double(ds.count);
}

} // namespace tropnnc
