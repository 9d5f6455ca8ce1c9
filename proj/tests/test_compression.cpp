#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "test_helpers.hpp"
#include "tropnnc/bounds.hpp"
#include "tropnnc/compression.hpp"
#include "tropnnc/hausdorff.hpp"

using namespace tropnnc;
using namespace tropnnc::testing;

namespace {

// tight pair g2, g3 plus one lone generator, as in the hexagon walkthrough
const std::vector<Vec> kHexGens = {{1.0, 0.1}, {0.25, 1.0}, {0.3, 1.1}};

Mat example5_a() {
    Mat a(2, 3);
    a(0, 0) = 1.0; a(0, 1) = 0.0; a(0, 2) = 0.0;
    a(1, 0) = 0.0; a(1, 1) = 1.0; a(1, 2) = 0.0;
    return a;
}

Mat example5_c() {
    Mat c(2, 2);
    c(0, 0) = 3.0; c(0, 1) = 5.0;
    c(1, 0) = 4.0; c(1, 1) = 2.0;
    return c;
}

double max_gap_single(const Mat& a, const Vec& c_row, const Mat& at, const Vec& ct,
                      Rng& rng, std::size_t trials) {
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const Vec x = scale(rng.gaussian_vector(a.cols - 1), 2.0);
        worst = std::max(worst, std::fabs(single_output_value(a, c_row, x) -
                                          single_output_value(at, ct, x)));
    }
    return worst;
}

} // namespace

TEST_CASE("single output: cluster representative is the sum, not the mean") {
    Mat a(3, 2);
    for (std::size_t i = 0; i < 3; ++i) a.set_row(i, kHexGens[i]);
    const Vec c_row = {1.0, 1.0, 1.0};
    const SingleOutputResult sum = compress_single_output(a, c_row, 2, 7);
    const SingleOutputResult mean = baseline_zonotope_kmeans(a, c_row, 2, 7);
    REQUIRE(sum.a_tilde.rows == 2);

    // locate the cluster holding generators 1 and 2
    REQUIRE(sum.clustering.assignment[1] == sum.clustering.assignment[2]);
    const auto pair_cluster = static_cast<std::size_t>(sum.clustering.assignment[1]);
    const Vec expected_sum = add(kHexGens[1], kHexGens[2]);
    CHECK(dist2(sum.a_tilde.row(pair_cluster), expected_sum) < 1e-12);
    CHECK(dist2(mean.a_tilde.row(pair_cluster), scale(expected_sum, 0.5)) < 1e-12);
    for (double v : sum.c_tilde) CHECK(std::fabs(v) == 1.0);
}

TEST_CASE("single output: sum representative beats the mean in Hausdorff distance") {
    Zonotope p{{0.0, 0.0}, kHexGens};
    Zonotope p_sum{{0.0, 0.0}, {kHexGens[0], add(kHexGens[1], kHexGens[2])}};
    Zonotope p_mean{{0.0, 0.0}, {kHexGens[0], scale(add(kHexGens[1], kHexGens[2]), 0.5)}};
    const double h_sum = hausdorff_zonotopes(p, p_sum);
    const double h_mean = hausdorff_zonotopes(p, p_mean);
    CHECK(h_sum < h_mean);
}

TEST_CASE("single output: K = n singleton clusters preserve the function exactly") {
    Rng rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 4 + rng.uniform_index(4);
        Mat a(n, 4);
        for (auto& v : a.data) v = rng.gaussian();
        Vec c_row(n);
        for (auto& v : c_row) {
            v = rng.gaussian();
            if (std::fabs(v) < 0.1) v = 0.5; // keep weights nonzero
        }
        const SingleOutputResult r = compress_single_output(a, c_row, n, 11);
        CHECK(max_gap_single(a, c_row, r.a_tilde, r.c_tilde, rng, 200) <= 1e-9);
    }
}

TEST_CASE("single output: sign-class allocation and errors") {
    Mat a(4, 2);
    Rng rng(5);
    for (auto& v : a.data) v = rng.gaussian();
    const Vec mixed = {1.0, -1.0, 2.0, -2.0};
    CHECK_THROWS_AS(compress_single_output(a, mixed, 1, 0), ConfigError);
    const Vec zeros = {0.0, 0.0, 0.0, 0.0};
    CHECK_THROWS_AS(compress_single_output(a, zeros, 2, 0), ShapeError);
    const SingleOutputResult r = compress_single_output(a, mixed, 2, 0);
    CHECK(r.a_tilde.rows == 2);
    CHECK(r.c_tilde[0] == 1.0);
    CHECK(r.c_tilde[1] == -1.0);
}

TEST_CASE("multi output: worked one-cluster representative") {
    const MultiOutputResult r = compress_multi_output(example5_a(), example5_c(), 1, 0);
    REQUIRE(r.a_tilde.rows == 1);
    CHECK(r.a_tilde(0, 0) == 0.5);
    CHECK(r.a_tilde(0, 1) == 0.5);
    CHECK(r.a_tilde(0, 2) == 0.0);
    CHECK(r.c_tilde(0, 0) == 8.0);
    CHECK(r.c_tilde(1, 0) == 6.0);
}

TEST_CASE("multi output baseline: means on both sides") {
    const MultiOutputResult r = baseline_neural_path_kmeans(example5_a(), example5_c(), 1, 0);
    CHECK(r.a_tilde(0, 0) == 0.5);
    CHECK(r.a_tilde(0, 1) == 0.5);
    CHECK(r.c_tilde(0, 0) == 4.0);
    CHECK(r.c_tilde(1, 0) == 3.0);
}

TEST_CASE("multi output: K = n is the identity (canonical cluster order)") {
    Rng rng(7);
    const std::size_t n = 6, d = 3, m = 2;
    Mat a(n, d + 1), c(m, n);
    for (auto& v : a.data) v = rng.gaussian();
    for (auto& v : c.data) v = rng.gaussian() + 2.0;
    const MultiOutputResult r = compress_multi_output(a, c, n, 13);
    REQUIRE(r.a_tilde.rows == n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(dist2(r.a_tilde.row(i), a.row(i)) < 1e-15);
        for (std::size_t j = 0; j < m; ++j) CHECK(r.c_tilde(j, i) == c(j, i));
    }
}

TEST_CASE("multi output: duplicated neurons merge exactly at K = n-1") {
    Rng rng(11);
    const std::size_t d = 3, m = 2;
    Mat a(4, d + 1), c(m, 4);
    // three far-apart rows; rows 1 and 2 identical
    a.set_row(0, {5.0, 0.0, 0.0, 0.0});
    a.set_row(1, {0.0, 1.0, 0.5, 0.2});
    a.set_row(2, {0.0, 1.0, 0.5, 0.2});
    a.set_row(3, {0.0, 0.0, -6.0, 1.0});
    c(0, 0) = 1.0; c(0, 1) = 0.6; c(0, 2) = 0.7; c(0, 3) = -1.0;
    c(1, 0) = -2.0; c(1, 1) = 0.8; c(1, 2) = 0.9; c(1, 3) = 1.5;
    const MultiOutputResult r = compress_multi_output(a, c, 3, 17);
    REQUIRE(r.a_tilde.rows == 3);
    REQUIRE(r.clustering.assignment[1] == r.clustering.assignment[2]);
    Rng sampler(19);
    for (int s = 0; s < 200; ++s) {
        const Vec x = scale(sampler.gaussian_vector(d), 2.0);
        const Vec v = multi_output_value(a, c, x);
        const Vec vt = multi_output_value(r.a_tilde, r.c_tilde, x);
        for (std::size_t j = 0; j < m; ++j) CHECK(std::fabs(v[j] - vt[j]) <= 1e-10);
    }
}

TEST_CASE("iterative: num_iter = 0 equals the non-iterative algorithm") {
    Rng rng(13);
    Mat a(6, 4), c(3, 6);
    for (auto& v : a.data) v = rng.gaussian();
    for (auto& v : c.data) v = rng.gaussian();
    const MultiOutputResult plain = compress_multi_output(a, c, 3, 21);
    const MultiOutputResult iter0 = compress_multi_output_iterative(a, c, 3, 0, false, 21);
    CHECK(plain.a_tilde.data == iter0.a_tilde.data);
    CHECK(plain.c_tilde.data == iter0.c_tilde.data);
}

TEST_CASE("iterative: single cluster, one output reaches criterion 0 in one iteration") {
    Rng rng(17);
    Mat a(4, 3), c(1, 4);
    for (auto& v : a.data) v = rng.gaussian();
    for (auto& v : c.data) v = rng.gaussian() + 1.5;
    const MultiOutputResult r = compress_multi_output_iterative(a, c, 1, 1, false, 5);
    REQUIRE(r.criterion_trace.size() >= 3);
    // with m = 1 the representative aligns with the generator sum exactly
    CHECK(r.criterion_trace.back() <= 1e-18);
}

TEST_CASE("iterative: criterion trace non-increasing at every half-step") {
    Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + rng.uniform_index(6);
        const std::size_t m = 1 + rng.uniform_index(3);
        const std::size_t k = 1 + rng.uniform_index(n - 1);
        Mat a(n, 4), c(m, n);
        for (auto& v : a.data) v = rng.gaussian();
        for (auto& v : c.data) v = rng.gaussian();
        const MultiOutputResult r =
            compress_multi_output_iterative(a, c, k, 10, false, trial);
        for (std::size_t t = 1; t < r.criterion_trace.size(); ++t)
            CHECK(r.criterion_trace[t] <= r.criterion_trace[t - 1] + 1e-9);
    }
}

TEST_CASE("iterative a6: frozen signs never flip and magnitudes stay nonnegative") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng.uniform_index(4);
        const std::size_t m = 2 + rng.uniform_index(2);
        const std::size_t k = 2 + rng.uniform_index(3);
        Mat a(n, 4), c(m, n);
        for (auto& v : a.data) v = rng.gaussian();
        for (auto& v : c.data) v = rng.gaussian();
        const MultiOutputResult init = compress_multi_output(a, c, k, trial);
        const MultiOutputResult r =
            compress_multi_output_iterative(a, c, k, 8, true, trial);
        REQUIRE(init.c_tilde.cols == r.c_tilde.cols);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t kk = 0; kk < r.c_tilde.cols; ++kk) {
                const double before = init.c_tilde(j, kk);
                const double after = r.c_tilde(j, kk);
                if (before > 0.0) CHECK(after >= 0.0);
                if (before < 0.0) CHECK(after <= 0.0);
                if (before == 0.0) CHECK(after == 0.0);
            }
        // sign-fixed criterion is monitored through the trace
        for (std::size_t t = 1; t < r.criterion_trace.size(); ++t)
            CHECK(r.criterion_trace[t] <= r.criterion_trace[t - 1] + 1e-9);
    }
}

TEST_CASE("criterion_value: perfect representative scores 0, worked value is 4") {
    const Mat a = example5_a();
    const Mat c = example5_c();
    const MultiOutputResult identity = compress_multi_output(a, c, 2, 0);
    const CriterionValue zero =
        criterion_value(a, c, identity.clustering, identity.a_tilde, identity.c_tilde);
    CHECK(zero.total <= 1e-18);

    const MultiOutputResult merged = compress_multi_output(a, c, 1, 0);
    const CriterionValue worked =
        criterion_value(a, c, merged.clustering, merged.a_tilde, merged.c_tilde);
    CHECK(worked.total == doctest::Approx(4.0));
    REQUIRE(worked.per_cluster.size() == 1);
    CHECK(worked.per_cluster[0] == doctest::Approx(4.0));

    // one refinement iteration improves the worked instance
    const MultiOutputResult refined = compress_multi_output_iterative(a, c, 1, 1, false, 0);
    const CriterionValue better =
        criterion_value(a, c, refined.clustering, refined.a_tilde, refined.c_tilde);
    CHECK(better.total < worked.total);
}

TEST_CASE("network compression: ratio 1 leaves forward behavior intact") {
    Rng rng(29);
    const Network net = random_mlp({6, 10, 8, 3}, rng);
    for (const char* name : {"tropnnc", "tropnnc-iter", "tropnnc-iter-a6",
                             "neural-path-kmeans", "l1", "random"}) {
        CompressionConfig config;
        config.method = *parse_method(name);
        config.ratio = 1.0;
        config.seed = 31;
        auto [compressed, report] = compress_network(net, config);
        CHECK(count_params(compressed) == count_params(net));
        Rng probe(33);
        CHECK(max_abs_forward_gap(net, compressed, probe, 100) <= 1e-9);
    }
}

TEST_CASE("network compression: K = n on a conv pair preserves outputs") {
    Rng rng(37);
    Network net;
    net.input_shape = {2, 8, 8};
    net.layers.emplace_back(random_conv(2, 5, 3, rng, 1, 1));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(MaxPoolLayer{2, 2});
    net.layers.emplace_back(random_conv(5, 3, 3, rng));
    validate(net);
    for (const char* name : {"tropnnc", "tropnnc-iter", "tropnnc-iter-a6",
                             "neural-path-kmeans", "l1", "random"}) {
        CompressionConfig config;
        config.method = *parse_method(name);
        config.explicit_k = 5;
        config.seed = 41;
        auto [compressed, report] = compress_network(net, config);
        Rng probe(43);
        CHECK(max_abs_forward_gap(net, compressed, probe, 50) <= 1e-9);
    }
}

TEST_CASE("conv compression equals the matrix-only reference path") {
    Rng rng(47);
    Network net;
    net.input_shape = {2, 6, 6};
    net.layers.emplace_back(random_conv(2, 6, 3, rng, 1, 1));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(random_conv(6, 4, 3, rng));
    validate(net);

    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.explicit_k = 3;
    config.seed = 53;
    const Network compressed = compress_layer(net, 0, config);

    // reference: flatten by hand, compress the matrices, unflatten by hand
    const auto& conv0 = std::get<Conv2dLayer>(net.layers[0]);
    const auto& conv1 = std::get<Conv2dLayer>(net.layers[2]);
    const Mat a = flatten_conv_in(conv0);
    const Mat c = flatten_conv_out(conv1);
    const MultiOutputResult r = compress_multi_output(a, c, 3, 53);
    const Conv2dLayer new0 = unflatten_conv_in(r.a_tilde, 2, 3, 3, 1, 1);
    const Tensor new1 = unflatten_conv_out(r.c_tilde, 4, 3, 3);

    const auto& got0 = std::get<Conv2dLayer>(compressed.layers[0]);
    const auto& got1 = std::get<Conv2dLayer>(compressed.layers[2]);
    CHECK(got0.kernel.data == new0.kernel.data);
    CHECK(got0.bias.data == new0.bias.data);
    CHECK(got1.kernel.data == new1.data);
}

TEST_CASE("layer-by-layer composition equals compress_network") {
    Rng rng(59);
    const Network net = random_mlp({5, 12, 9, 4}, rng);
    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.ratio = 0.5;
    config.seed = 61;
    const Network by_steps = compress_layer(compress_layer(net, 0, config), 2, config);
    auto [by_network, report] = compress_network(net, config);
    const auto& l0a = std::get<LinearLayer>(by_steps.layers[0]);
    const auto& l0b = std::get<LinearLayer>(by_network.layers[0]);
    CHECK(l0a.weight.data == l0b.weight.data);
    const auto& l2a = std::get<LinearLayer>(by_steps.layers[2]);
    const auto& l2b = std::get<LinearLayer>(by_network.layers[2]);
    CHECK(l2a.weight.data == l2b.weight.data);
    REQUIRE(report.layers.size() == 2);
    CHECK(report.layers[0].width_after == 6);
    CHECK(report.layers[1].width_after == 5); // round(0.5 * 9)
}

TEST_CASE("worked instance embedded in a deeper net gets the same weights") {
    Rng rng(67);
    Network net;
    net.input_shape = {2};
    LinearLayer first;
    first.weight = Tensor({2, 2}, {1.0, 0.0, 0.0, 1.0});
    first.bias = Tensor({2}, {0.0, 0.0});
    LinearLayer second;
    second.weight = Tensor({2, 2}, {3.0, 5.0, 4.0, 2.0});
    second.bias = Tensor({2}, {0.25, -0.5});
    net.layers.emplace_back(std::move(first));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(std::move(second));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(random_linear(2, 1, rng));
    validate(net);

    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.explicit_k = 1;
    config.layers = {0};
    auto [compressed, report] = compress_network(net, config);
    const auto& lin0 = std::get<LinearLayer>(compressed.layers[0]);
    CHECK(lin0.weight.at2(0, 0) == 0.5);
    CHECK(lin0.weight.at2(0, 1) == 0.5);
    CHECK(lin0.bias.data[0] == 0.0);
    const auto& lin2 = std::get<LinearLayer>(compressed.layers[2]);
    CHECK(lin2.weight.at2(0, 0) == 8.0);
    CHECK(lin2.weight.at2(1, 0) == 6.0);
    // next layer's bias untouched
    CHECK(lin2.bias.data[0] == 0.25);
    CHECK(lin2.bias.data[1] == -0.5);
}

TEST_CASE("deep MLP at ratio 0.5 halves the hidden widths") {
    Rng rng(71);
    const Network net = random_mlp({784, 512, 256, 128, 10}, rng);
    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.ratio = 0.5;
    config.seed = 73;
    auto [compressed, report] = compress_network(net, config);
    REQUIRE(report.layers.size() == 3);
    CHECK(report.layers[0].width_after == 256);
    CHECK(report.layers[1].width_after == 128);
    CHECK(report.layers[2].width_after == 64);
    CHECK(report.params_after < report.params_before);
}

TEST_CASE("l1 pruning: the all-zero neuron goes first") {
    Network net;
    net.input_shape = {3};
    LinearLayer lin;
    lin.weight = Tensor({3, 3}, {1, 1, 1, 0, 0, 0, 2, 2, 2});
    lin.bias = Tensor({3}, {0.5, 9.0, 0.5}); // bias must not count
    net.layers.emplace_back(std::move(lin));
    net.layers.emplace_back(ReluLayer{});
    LinearLayer out;
    out.weight = Tensor({2, 3}, {1, 2, 3, 4, 5, 6});
    out.bias = Tensor({2}, {0.0, 0.0});
    net.layers.emplace_back(std::move(out));

    const Network pruned = baseline_l1(net, 2.0 / 3.0);
    const auto& plin = std::get<LinearLayer>(pruned.layers[0]);
    REQUIRE(plin.weight.shape[0] == 2);
    CHECK(plin.weight.at2(0, 0) == 1.0); // rows 0 and 2 kept in order
    CHECK(plin.weight.at2(1, 0) == 2.0);
    const auto& pout = std::get<LinearLayer>(pruned.layers[2]);
    CHECK(pout.weight.at2(0, 0) == 1.0);
    CHECK(pout.weight.at2(0, 1) == 3.0);
}

TEST_CASE("random pruning is reproducible for a fixed seed") {
    Rng rng(79);
    const Network net = random_mlp({6, 10, 4}, rng);
    const Network a = baseline_random(net, 0.5, 123);
    const Network b = baseline_random(net, 0.5, 123);
    const auto& la = std::get<LinearLayer>(a.layers[0]);
    const auto& lb = std::get<LinearLayer>(b.layers[0]);
    CHECK(la.weight.data == lb.weight.data);
    CHECK(la.weight.shape[0] == 5);
}

TEST_CASE("pruning ratio bounds are enforced") {
    Rng rng(83);
    const Network net = random_mlp({4, 6, 2}, rng);
    CHECK_THROWS_AS(baseline_l1(net, 0.0), ConfigError);
    CHECK_THROWS_AS(baseline_l1(net, 1.5), ConfigError);
}

TEST_CASE("batchnorm in the pair is fused per layer before compression") {
    Rng rng(89);
    Network net;
    net.input_shape = {4};
    net.layers.emplace_back(random_linear(4, 6, rng));
    BatchNormLayer bn;
    bn.gamma = random_tensor({6}, rng);
    bn.beta = random_tensor({6}, rng);
    bn.running_mean = random_tensor({6}, rng);
    bn.running_var = Tensor({6});
    for (auto& v : bn.running_var.data) v = std::fabs(rng.gaussian()) + 0.2;
    bn.epsilon = 1e-5;
    net.layers.emplace_back(std::move(bn));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(random_linear(6, 3, rng));
    validate(net);

    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.explicit_k = 6;
    config.fuse_bn = BnFusionMode::PerLayer;
    config.cluster_on_prefusion = true;
    auto [compressed, report] = compress_network(net, config);
    // batchnorm folded away, function preserved at K = n
    CHECK(compressed.layers.size() == 3);
    const Network fused_ref = fuse_batchnorm(net);
    Rng probe(97);
    CHECK(max_abs_forward_gap(fused_ref, compressed, probe, 100) <= 1e-9);

    // without a fusion mode the batchnorm pair is rejected
    CompressionConfig strict = config;
    strict.fuse_bn = BnFusionMode::None;
    CHECK_THROWS_AS(compress_layer(net, 0, strict), UnsupportedTopologyError);
}

TEST_CASE("prefusion and postfusion clustering may differ, both preserve K = n") {
    Rng rng(101);
    Network net;
    net.input_shape = {3};
    net.layers.emplace_back(random_linear(3, 5, rng));
    BatchNormLayer bn;
    bn.gamma = random_tensor({5}, rng);
    bn.beta = random_tensor({5}, rng);
    bn.running_mean = random_tensor({5}, rng);
    bn.running_var = Tensor({5});
    for (auto& v : bn.running_var.data) v = std::fabs(rng.gaussian()) + 0.2;
    bn.epsilon = 1e-5;
    net.layers.emplace_back(std::move(bn));
    net.layers.emplace_back(ReluLayer{});
    net.layers.emplace_back(random_linear(5, 2, rng));

    for (bool prefusion : {true, false}) {
        CompressionConfig config;
        config.method = CompressionMethod::Tropnnc;
        config.explicit_k = 5;
        config.fuse_bn = BnFusionMode::PerLayer;
        config.cluster_on_prefusion = prefusion;
        auto [compressed, report] = compress_network(net, config);
        const Network fused_ref = fuse_batchnorm(net);
        Rng probe(103);
        CHECK(max_abs_forward_gap(fused_ref, compressed, probe, 50) <= 1e-9);
    }
}

TEST_CASE("non-uniform threshold compression with the two variants") {
    Rng rng(107);
    const Network net = random_mlp({6, 20, 12, 3}, rng);
    for (int variant : {1, 2}) {
        CompressionConfig config;
        config.method = CompressionMethod::Tropnnc;
        config.threshold_c = variant == 1 ? 0.05 : 0.4;
        config.threshold_variant = variant;
        auto [compressed, report] = compress_network(net, config);
        REQUIRE(report.layers.size() == 2);
        for (const auto& lr : report.layers) {
            CHECK(lr.threshold > 0.0);
            CHECK(lr.width_after >= 1);
            CHECK(lr.width_after <= lr.width_before);
        }
        validate(compressed);
    }
}

TEST_CASE("unsupported topologies are rejected") {
    Rng rng(109);
    // output layer (nothing after it)
    const Network mlp = random_mlp({4, 6, 2}, rng);
    CompressionConfig config;
    config.method = CompressionMethod::Tropnnc;
    config.explicit_k = 2;
    CHECK_THROWS_AS(compress_layer(mlp, 2, config), UnsupportedTopologyError);

    // conv -> flatten -> linear boundary
    Network cnet;
    cnet.input_shape = {1, 4, 4};
    cnet.layers.emplace_back(random_conv(1, 2, 3, rng, 1, 1));
    cnet.layers.emplace_back(ReluLayer{});
    cnet.layers.emplace_back(FlattenLayer{});
    cnet.layers.emplace_back(random_linear(2 * 4 * 4, 2, rng));
    validate(cnet);
    CHECK_THROWS_AS(compress_layer(cnet, 0, config), UnsupportedTopologyError);
    CHECK(compressible_ordinals(cnet).empty());

    // single-output method on a multi-output layer
    CompressionConfig single;
    single.method = CompressionMethod::TropnncSingle;
    single.explicit_k = 2;
    CHECK_THROWS_AS(compress_layer(mlp, 0, single), UnsupportedTopologyError);
}

TEST_CASE("single-output method drives a 1-output boundary end to end") {
    Rng rng(113);
    const Network net = random_mlp({4, 8, 1}, rng);
    CompressionConfig config;
    config.method = CompressionMethod::TropnncSingle;
    config.explicit_k = 8;
    config.seed = 5;
    auto [compressed, report] = compress_network(net, config);
    Rng probe(127);
    CHECK(max_abs_forward_gap(net, compressed, probe, 200) <= 1e-9);
    // output weights are +-1 after the rewrite
    const auto& out = std::get<LinearLayer>(compressed.layers[2]);
    for (double v : out.weight.data) CHECK(std::fabs(v) == 1.0);
}
