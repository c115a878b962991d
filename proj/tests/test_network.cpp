#include <doctest.h>

#include <cmath>

#include "cnnac/errors.hpp"
#include "cnnac/input_matrix.hpp"
#include "cnnac/network.hpp"
#include "cnnac/presets.hpp"
#include "cnnac/rng.hpp"

using namespace cnnac;

namespace {

Vec random_theta(const NetworkSpec& spec, std::uint64_t seed, double range = 0.1) {
  UniformSource rng(seed);
  Vec theta(spec.weight_count());
  for (double& v : theta) v = rng.uniform(-range, range);
  return theta;
}

Mat random_input(const NetworkSpec& spec, std::uint64_t seed) {
  UniformSource rng(seed);
  Mat x(spec.input_rows, spec.input_cols);
  for (double& v : x.data()) v = spec.alpha2 * rng.uniform(-3.0, 3.0);
  return x;
}

}  // namespace

TEST_CASE("cnn_operator") {
  SUBCASE("all-ones window sums") {
    const Mat out = cnn_operator(Mat(3, 2, 1.0), std::vector<Mat>{Mat(2, 2, 1.0)}, Vec{0.0});
    CHECK(out == Mat{{4}, {4}});
  }
  SUBCASE("zero filters give the biases on every row") {
    const Mat x{{1, -2}, {3, 0.5}, {7, 1}, {2, 2}};
    const Mat out = cnn_operator(x, std::vector<Mat>{Mat(2, 2), Mat(2, 2), Mat(2, 2)}, Vec{1.5, -2.0, 0.25});
    REQUIRE(out.rows() == 3);
    for (std::size_t r = 0; r < 3; ++r) CHECK(out.row(r)[0] == 1.5);
    for (std::size_t r = 0; r < 3; ++r) CHECK(out.row(r)[2] == 0.25);
  }
  SUBCASE("diagonal pattern match") {
    const Mat out = cnn_operator(Mat{{1, 0}, {0, 1}, {1, 0}}, std::vector<Mat>{Mat{{1, 0}, {0, 1}}}, Vec{0.0});
    CHECK(out == Mat{{2}, {0}});
  }
  SUBCASE("shape errors") {
    CHECK_THROWS_AS(cnn_operator(Mat(3, 2), std::vector<Mat>{Mat(2, 3)}, Vec{0.0}), ShapeError);
    CHECK_THROWS_AS(cnn_operator(Mat(3, 2), std::vector<Mat>{Mat(4, 2)}, Vec{0.0}), ShapeError);
    CHECK_THROWS_AS(cnn_operator(Mat(3, 2), std::vector<Mat>{Mat(2, 2)}, Vec{0.0, 1.0}), ShapeError);
  }
}

TEST_CASE("weight counts follow the layer formula") {
  const NetworkSpec cnn1 = make_preset("cnn1").network;
  // FC: (8+1)*8 + (8+1)*8 + (8+1)*2 = 72 + 72 + 18; conv: (5*6+1)*2 + (3*2+1)*2 = 62 + 14.
  CHECK(cnn1.weight_count() == 238);
  const NetworkSpec dnn = make_preset("dnn").network;
  // (6+1)*8 + 9*8 + 9*8 + 9*4 + 5*2
  CHECK(dnn.weight_count() == 56 + 72 + 72 + 36 + 10);
  CHECK(dnn.weight_count() == 246);
  CHECK(WeightLayout(dnn).fc_block_size() == dnn.weight_count());
}

TEST_CASE("CNN1 dimension chain") {
  const NetworkSpec spec = make_preset("cnn1").network;
  const auto chain = spec.conv_chain();
  REQUIRE(chain.size() == 3);
  CHECK(chain[0].rows == 10);
  CHECK(chain[0].cols == 6);
  CHECK(chain[1].rows == 6);
  CHECK(chain[1].cols == 2);
  CHECK(chain[2].rows == 4);
  CHECK(chain[2].cols == 2);
  CHECK(spec.concat_length() == 9);
}

TEST_CASE("validation names the failing layer") {
  NetworkSpec spec = make_preset("cnn1").network;
  spec.conv_layers[1].filter_cols = 3;
  try {
    spec.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("conv layer 1") != std::string::npos);
  }
  spec = make_preset("cnn1").network;
  spec.conv_layers[0].filter_rows = 11;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = make_preset("cnn1").network;
  spec.fc_widths.clear();
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("pack and unpack are inverse") {
  for (const char* name : {"cnn1", "dnn"}) {
    const NetworkSpec spec = make_preset(name).network;
    const Vec theta = random_theta(spec, 11);
    CHECK(pack_weights(spec, unpack_weights(spec, theta)) == theta);
    CHECK_THROWS_AS(unpack_weights(spec, Vec(theta.size() + 1)), LayoutError);
  }
}

TEST_CASE("segment order: V blocks, then filters, then biases") {
  const NetworkSpec spec = make_preset("cnn1").network;
  const WeightLayout layout(spec);
  Vec theta(layout.size());
  for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = static_cast<double>(k);
  const NetworkWeights w = unpack_weights(spec, theta);
  CHECK(w.fc[0](0, 0) == 0.0);
  CHECK(w.fc[0](0, 1) == 1.0);  // row-major
  CHECK(w.fc[1](0, 0) == 72.0);
  CHECK(w.fc[2](0, 0) == 144.0);
  CHECK(w.filters[0][0](0, 0) == 162.0);
  CHECK(w.filters[0][0](0, 1) == 163.0);
  CHECK(w.filters[0][1](0, 0) == 192.0);
  CHECK(w.filters[1][0](0, 0) == 222.0);
  CHECK(w.biases[0] == Vec{234.0, 235.0});
  CHECK(w.biases[1] == Vec{236.0, 237.0});
  CHECK(layout.fc_block_size() == 162);
}

TEST_CASE("forward") {
  SUBCASE("zero weights give zero output") {
    const NetworkSpec spec = make_preset("cnn1").network;
    const ForwardTrace tr = forward(spec, Vec(spec.weight_count(), 0.0), random_input(spec, 1));
    CHECK(tr.output == Vec{0.0, 0.0});
  }
  SUBCASE("DNN bias propagates through the appended one") {
    const NetworkSpec spec = make_preset("dnn").network;
    const WeightLayout layout(spec);
    Vec theta(layout.size(), 0.0);
    const std::size_t last = layout.fc_layer_count() - 1;
    const auto shape = layout.fc_shape(last);
    // bias row is the last row of V_last
    theta[layout.fc_offset(last) + (shape.rows - 1) * shape.cols + 0] = 1.25;
    theta[layout.fc_offset(last) + (shape.rows - 1) * shape.cols + 1] = -0.5;
    const ForwardTrace tr = forward(spec, theta, random_input(spec, 2));
    CHECK(tr.output == Vec{1.25, -0.5});
  }
  SUBCASE("CNN1 output is finite and bounded by the last layer") {
    const NetworkSpec spec = make_preset("cnn1").network;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Vec theta = random_theta(spec, seed);
      const ForwardTrace tr = forward(spec, theta, random_input(spec, seed + 100));
      REQUIRE(tr.output.size() == 2);
      CHECK(all_finite(tr.output));
      const NetworkWeights w = unpack_weights(spec, theta);
      const Mat& v = w.fc.back();
      for (std::size_t i = 0; i < 2; ++i) {
        double bound = 0.0;  // hidden activations are in [-1, 1], the bias entry is 1
        for (std::size_t r = 0; r < v.rows(); ++r) bound += std::abs(v(r, i));
        CHECK(std::abs(tr.output[i]) <= bound);
      }
    }
  }
  SUBCASE("first conv layer is bounded through alpha1 tanh") {
    const NetworkSpec spec = make_preset("cnn1").network;
    const Vec theta = random_theta(spec, 4, 1.0);
    Mat x = random_input(spec, 5);
    x *= 1e4;  // saturate tanh
    const ForwardTrace tr = forward(spec, theta, x);
    const NetworkWeights w = unpack_weights(spec, theta);
    double max_w = 0.0, max_b = 0.0;
    for (const auto& f : w.filters[0]) max_w = std::max(max_w, f.max_abs());
    for (double b : w.biases[0]) max_b = std::max(max_b, std::abs(b));
    CHECK(tr.conv_out[0].max_abs() <= spec.alpha1 * 5 * 6 * max_w + max_b);
  }
  SUBCASE("concat layer is vec of the transposed last conv output plus one") {
    const NetworkSpec spec = make_preset("cnn1").network;
    const ForwardTrace tr = forward(spec, random_theta(spec, 6), random_input(spec, 7));
    Vec expected = vec_rowmajor(tr.conv_out.back().transposed());
    expected.push_back(1.0);
    CHECK(tr.concat == expected);
  }
  SUBCASE("DNN mode is an MLP on alpha1 tanh(xi / alpha2)") {
    const NetworkSpec spec = make_preset("dnn").network;
    const Vec theta = random_theta(spec, 8, 0.5);
    const Mat x = random_input(spec, 9);
    const NetworkWeights w = unpack_weights(spec, theta);
    Vec a(spec.input_cols);
    for (std::size_t c = 0; c < a.size(); ++c) a[c] = spec.alpha1 * std::tanh(x(0, c) / spec.alpha2);
    for (std::size_t j = 0; j < w.fc.size(); ++j) {
      if (j > 0)
        for (double& v : a) v = std::tanh(v);
      a.push_back(1.0);
      a = w.fc[j].transposed() * a;
    }
    const ForwardTrace tr = forward(spec, theta, x);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(tr.output[i] == doctest::Approx(a[i]).epsilon(1e-14));
  }
  SUBCASE("deterministic") {
    const NetworkSpec spec = make_preset("cnn1").network;
    const Vec theta = random_theta(spec, 10);
    const Mat x = random_input(spec, 11);
    CHECK(forward(spec, theta, x).output == forward(spec, theta, x).output);
  }
  SUBCASE("wrong input shape") {
    const NetworkSpec spec = make_preset("cnn1").network;
    CHECK_THROWS(forward(spec, random_theta(spec, 1), Mat(9, 6)));
  }
}

TEST_CASE("input matrix") {
  const NetworkSpec spec = make_preset("cnn1").network;  // n0 = 10, Ts = 0.1
  const double dt = 1e-3;
  const double ts = 0.1;

  SUBCASE("cold start: only the first row is filled") {
    HistoryBuffer buf = HistoryBuffer::for_network(spec, ts, dt);
    const Vec xi = make_xi(Vec{0.5, -1}, Vec{1, 2}, Vec{0, 0}, spec.alpha2);
    buf.push(0.0, xi);
    const Mat x = build_input_matrix(buf, 0.0, spec, ts);
    for (std::size_t c = 0; c < 6; ++c) CHECK(x(0, c) == xi[c]);
    for (std::size_t r = 1; r < 10; ++r)
      for (std::size_t c = 0; c < 6; ++c) CHECK(x(r, c) == 0.0);
  }
  SUBCASE("stationary signals give identical rows") {
    HistoryBuffer buf = HistoryBuffer::for_network(spec, ts, dt);
    const Vec xi = make_xi(Vec{0.1, 0.2}, Vec{1, 2}, Vec{3, 4}, spec.alpha2);
    std::size_t steps = 1000;
    for (std::size_t k = 0; k <= steps; ++k) buf.push(static_cast<double>(k) * dt, xi);
    const Mat x = build_input_matrix(buf, static_cast<double>(steps) * dt, spec, ts);
    for (std::size_t r = 0; r < 10; ++r) CHECK(Vec(x.row(r).begin(), x.row(r).end()) == xi);
  }
  SUBCASE("row k+1 holds the sample from t - k Ts") {
    HistoryBuffer buf = HistoryBuffer::for_network(spec, ts, dt);
    const std::size_t steps = 1500;
    const double t_now = static_cast<double>(steps) * dt;
    for (std::size_t k = 0; k <= steps; ++k) {
      const double t = static_cast<double>(k) * dt;
      buf.push(t, Vec(6, (t_now - t) / ts));  // value = lag in units of Ts
    }
    const Mat x = build_input_matrix(buf, t_now, spec, ts);
    for (std::size_t r = 0; r < 10; ++r) CHECK(x(r, 3) == doctest::Approx(static_cast<double>(r)));
  }
  SUBCASE("xi scaling") {
    CHECK(make_xi(Vec{1}, Vec{2}, Vec{3}, 0.5) == Vec{0.5, 1.0, 1.5});
  }
  SUBCASE("sample width mismatch") {
    HistoryBuffer buf = HistoryBuffer::for_network(spec, ts, dt);
    buf.push(0.0, Vec(5, 0.0));
    CHECK_THROWS_AS(build_input_matrix(buf, 0.0, spec, ts), ConfigError);
  }
  SUBCASE("irregular sample spacing is rejected") {
    HistoryBuffer buf(4, dt);
    buf.push(0.0, Vec(6));
    CHECK_THROWS_AS(buf.push(0.5 * dt, Vec(6)), ConfigError);
  }
}
