/* Copyright 2026 The asdbench Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "catch_amalgamated.hpp"

#include "asdbench/nnet/adam.hpp"
#include "asdbench/nnet/backward.hpp"
#include "asdbench/nnet/model_io.hpp"
#include "asdbench/nnet/train.hpp"
#include "oracles.hpp"

using namespace asdbench;
using namespace asdbench::nnet;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

RowMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("forward pass shapes and softmax") {
  auto net = DenseNet::mlp({4, 6, 3}, Activation::relu, Activation::softmax);
  net.init_glorot(1);
  const RowMatrix x = random_matrix(7, 4, 2);
  const auto pass = forward(net, x);
  REQUIRE(pass.activations.size() == 3);
  CHECK(pass.output().rows() == 7);
  for (Eigen::Index r = 0; r < 7; ++r) CHECK_THAT(pass.output().row(r).sum(), WithinAbs(1.0, 1e-12));
  CHECK((pass.activations[1].array() >= 0.0).all());
  CHECK(predict(net, x, 1).isApprox(pass.activations[1]));
  CHECK(predict(net, x, SIZE_MAX, 3).isApprox(pass.output()));
  CHECK_THROWS_AS(forward(net, random_matrix(2, 5, 1)), Error);
  CHECK_THROWS_AS(DenseNet({3, 3, 3}, {Activation::softmax, Activation::linear}), Error);
}

TEST_CASE("glorot init is seeded and bounded") {
  auto a = DenseNet::mlp({10, 20, 5}, Activation::relu, Activation::linear);
  auto b = a;
  a.init_glorot(3);
  b.init_glorot(3);
  CHECK(a.params() == b.params());
  b.init_glorot(4);
  CHECK(a.params() != b.params());
  CHECK(a.weight(0).cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 30.0));
  CHECK(a.bias(1).isZero());
}

TEST_CASE("backprop agrees with central differences") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto c = testing::random_gradient_case(seed);
    INFO("seed " << seed);
    CHECK(testing::gradient_check(c.net, c.x, c.y, c.loss) < 1e-4);
  }
}

TEST_CASE("loss conventions") {
  auto net = DenseNet({2, 2}, {Activation::linear});
  net.params().setZero();
  RowMatrix x = RowMatrix::Ones(2, 2), y(2, 2);
  y << 1, 2, 3, 4;
  // Mean over rows and columns of the squared error.
  CHECK_THAT(compute_loss(net, x, y, Loss::mse), WithinAbs((1 + 4 + 9 + 16) / 4.0, 1e-15));
  CHECK_THROWS_AS(compute_loss(net, x, y, Loss::cross_entropy), Error);

  auto cls = DenseNet({2, 4}, {Activation::softmax});
  cls.params().setZero();
  RowMatrix t = RowMatrix::Zero(2, 4);
  t(0, 1) = t(1, 3) = 1;
  CHECK_THAT(compute_loss(cls, x, t, Loss::cross_entropy), WithinAbs(std::log(4.0), 1e-12));
}

TEST_CASE("adam matches its closed form") {
  AdamState s(3, 0.1);
  Eigen::VectorXd theta(3), g(3);
  theta << 1.0, -2.0, 0.5;
  g << 0.3, -4.0, 0.0;
  const Eigen::VectorXd start = theta;
  adam_step(s, theta, g);
  // First step: m_hat = g and v_hat = g^2, so the move is lr * g / (|g| + eps).
  for (int i = 0; i < 3; ++i) CHECK_THAT(theta[i], WithinAbs(start[i] - 0.1 * g[i] / (std::abs(g[i]) + 1e-8), 1e-15));

  Eigen::VectorXd g2(3);
  g2 << -0.1, 1.0, 2.0;
  const Eigen::VectorXd before = theta;
  adam_step(s, theta, g2);
  for (int i = 0; i < 3; ++i) {
    const double m = 0.9 * 0.1 * g[i] + 0.1 * g2[i];
    const double v = 0.999 * 0.001 * g[i] * g[i] + 0.001 * g2[i] * g2[i];
    const double step = 0.1 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    CHECK_THAT(theta[i], WithinAbs(before[i] - step, 1e-12));
  }
  g2[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(s, theta, g2);
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::training);
  }
}

TEST_CASE("training a linear layer recovers least squares") {
  const RowMatrix x = random_matrix(200, 3, 5);
  Eigen::Matrix<double, 3, 2> w;
  w << 1.5, -0.5, 0.25, 2.0, -1.0, 0.0;
  RowMatrix y = x * w;
  y.col(0).array() += 0.3;
  y += 0.05 * random_matrix(200, 2, 6);

  // Least squares on [x 1].
  Eigen::MatrixXd design(200, 4);
  design << x, Eigen::VectorXd::Ones(200);
  const Eigen::MatrixXd solution = design.colPivHouseholderQr().solve(Eigen::MatrixXd(y));

  auto net = DenseNet({3, 2}, {Activation::linear});
  net.init_glorot(1);
  const auto result = train(net, x, y, Loss::mse, TrainConfig{400, 20, 1e-2, 9, true});
  CHECK(result.loss_curve.size() == 400);
  CHECK(result.loss_curve.back() < result.loss_curve.front());
  // weight(l) is out x in.
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k) CHECK_THAT(net.weight(0)(k, i), WithinAbs(solution(i, k), 5e-3));
  for (int k = 0; k < 2; ++k) CHECK_THAT(net.bias(0)[k], WithinAbs(solution(3, k), 5e-3));
}

TEST_CASE("training is deterministic per seed and learns a classifier") {
  RowMatrix x = random_matrix(300, 2, 12);
  RowMatrix y = RowMatrix::Zero(300, 2);
  for (Eigen::Index r = 0; r < 300; ++r) y(r, x(r, 0) + x(r, 1) > 0 ? 1 : 0) = 1;
  auto make = [] {
    auto net = DenseNet::mlp({2, 8, 2}, Activation::relu, Activation::softmax);
    net.init_glorot(2);
    return net;
  };
  auto a = make(), b = make(), c = make();
  train(a, x, y, Loss::cross_entropy, TrainConfig{30, 16, 1e-2, 1, true});
  train(b, x, y, Loss::cross_entropy, TrainConfig{30, 16, 1e-2, 1, true});
  train(c, x, y, Loss::cross_entropy, TrainConfig{30, 16, 1e-2, 2, true});
  CHECK(a.params() == b.params());
  CHECK(a.params() != c.params());
  const RowMatrix p = predict(a, x);
  int correct = 0;
  for (Eigen::Index r = 0; r < 300; ++r) correct += (p(r, 1) > p(r, 0)) == (y(r, 1) == 1);
  CHECK(correct >= 285);
}

TEST_CASE("training surfaces bad configurations and divergence") {
  auto net = DenseNet({2, 1}, {Activation::linear});
  RowMatrix x = random_matrix(4, 2, 1), y = random_matrix(4, 1, 2);
  CHECK_THROWS_AS(train(net, x, y, Loss::mse, TrainConfig{0, 2, 1e-3, 0, true}), Error);
  x(2, 1) = std::numeric_limits<double>::infinity();
  try {
    train(net, x, y, Loss::mse, TrainConfig{1, 4, 1e-3, 0, true});
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::training);
  }
}

TEST_CASE("network files round trip byte for byte") {
  auto net = DenseNet::mlp({5, 4, 3}, Activation::relu, Activation::softmax);
  net.init_glorot(8);
  std::ostringstream first(std::ios::binary);
  write_net(first, net);
  std::istringstream in(first.str(), std::ios::binary);
  const auto back = read_net(in);
  CHECK(back.params() == net.params());
  CHECK(back.layer(1).activation == Activation::softmax);
  std::ostringstream second(std::ios::binary);
  write_net(second, back);
  CHECK(second.str() == first.str());

  std::istringstream damaged(first.str().substr(0, first.str().size() - 5), std::ios::binary);
  CHECK_THROWS_AS(read_net(damaged), Error);

  const auto path = std::filesystem::temp_directory_path() / "asdbench_net.bin";
  save_model(path, net, TrainConfig{}, TrainResult{{0.5, 0.25}});
  CHECK(load_model(path).params() == net.params());
  CHECK(std::filesystem::exists(path.string() + ".json"));
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}
