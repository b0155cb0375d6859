// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "framing/error.hpp"
#include "framing/gradcheck.hpp"
#include "framing/ops.hpp"
#include "framing/optimizer.hpp"
#include "framing/rng.hpp"
#include "framing/tape.hpp"

using namespace framing;

namespace {

Tensor2 random_tensor(Rng& rng, std::size_t r, std::size_t c, double scale = 1.0) {
  Tensor2 t(r, c);
  for (double& v : t.values()) v = rng.uniform(-scale, scale);
  return t;
}

std::vector<std::size_t> random_labels(Rng& rng, std::size_t n, std::size_t classes) {
  std::vector<std::size_t> out(n);
  for (auto& l : out) l = rng.below(classes);
  return out;
}

}  // namespace

TEST_SUITE("numcore") {

TEST_CASE("tensor shape checks") {
  CHECK_THROWS_AS(Tensor2(2, 2, std::vector<double>{1, 2, 3}), ShapeError);
  Tensor2 t = Tensor2::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(t.rows() == 2);
  CHECK(t(1, 2) == 6);
  CHECK(t.shape_string() == "2x3");
  t(0, 0) = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("affine examples") {
  CHECK(affine(std::vector<double>{1, 2}, Tensor2::from_rows({{1, 0}, {0, 1}}),
               std::vector<double>{0, 0}) == std::vector<double>{1, 2});
  CHECK(affine(std::vector<double>{1, 1}, Tensor2::from_rows({{2, 3}}), std::vector<double>{-5}) ==
        std::vector<double>{0});
  // [1*0.5 + 1*(-0.5) + 1, 1*0.5 - 1*(-0.5) + 1]
  CHECK(affine(std::vector<double>{0.5, -0.5}, Tensor2::from_rows({{1, 1}, {1, -1}}),
               std::vector<double>{1, 1}) == std::vector<double>{1, 2});
}

TEST_CASE("affine shape error names both shapes") {
  try {
    affine(std::vector<double>{1, 2, 3}, Tensor2(2, 2), std::vector<double>{0, 0});
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("3") != std::string::npos);
    CHECK(msg.find("2x2") != std::string::npos);
  }
}

TEST_CASE("sigmoid and tanh") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(framing::tanh(std::vector<double>{0.0})[0] == 0.0);
  CHECK(std::abs(sigmoid(1000.0) - 1.0) < 1e-12);
  CHECK(sigmoid(-1000.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-1000.0)));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-30, 30);
    const double s = sigmoid(x);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(std::abs(s - 1.0 / (1.0 + std::exp(-x))) < 1e-15);
  }
}

TEST_CASE("softmax examples") {
  CHECK(softmax(std::vector<double>{0, 0}) == std::vector<double>{0.5, 0.5});
  const auto big = softmax(std::vector<double>{1000, 0});
  CHECK(std::abs(big[0] - 1.0) < 1e-12);
  CHECK(big[1] < 1e-12);
  const auto p = softmax(std::vector<double>{std::log(1.0), std::log(2.0), std::log(3.0),
                                             std::log(4.0)});
  for (int i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.1 * (i + 1)).epsilon(1e-12));
  CHECK_THROWS_AS(softmax(std::vector<double>{}), ShapeError);
}

TEST_CASE("softmax sums to one and ignores shifts") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> z(1 + rng.below(8));
    for (double& v : z) v = rng.uniform(-50, 50);
    const auto p = softmax(z);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
    const double c = rng.uniform(-100, 100);
    auto shifted = z;
    for (double& v : shifted) v += c;
    const auto q = softmax(shifted);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i] - q[i]) < 1e-9);
  }
}

TEST_CASE("cross entropy examples") {
  CHECK(cross_entropy(std::vector<double>{1, 0, 0}, 0) == 0.0);
  CHECK(cross_entropy(std::vector<double>{0.5, 0.5}, 1) == doctest::Approx(std::log(2.0)));
  CHECK(cross_entropy(std::vector<double>{0.1, 0.2, 0.7}, 2) ==
        doctest::Approx(-std::log(0.7)).epsilon(1e-14));
  CHECK(cross_entropy(std::vector<double>{1, 0}, 1) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(cross_entropy(std::vector<double>{0.5, 0.5}, 2), LabelError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  CHECK(argmax(std::vector<double>{0.2, 0.4, 0.4}) == 1);
  CHECK(argmax(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == 0);
}

TEST_CASE("softmax-CE gradient is p - onehot") {
  ParameterSet params;
  params.add("z", Tensor2(1, 2));
  Tape tape;
  const std::vector<std::size_t> y{0};
  const Var loss = tape.nll(tape.softmax(tape.parameter(params.at("z"))), y);
  const auto grads = tape.backward(loss);
  CHECK(grads.at("z")(0, 0) == doctest::Approx(-0.5));
  CHECK(grads.at("z")(0, 1) == doctest::Approx(0.5));

  Tape fused;
  const auto g2 = fused.backward(fused.softmax_cross_entropy(fused.parameter(params.at("z")), y));
  CHECK(g2.at("z")(0, 0) == -0.5);
  CHECK(g2.at("z")(0, 1) == 0.5);
}

TEST_CASE("linear map gradient is x outer e0") {
  ParameterSet params;
  params.add("W", Tensor2::from_rows({{1, 2, 3}, {4, 5, 6}}));
  Tape tape;
  const Var x = tape.constant(Tensor2::from_rows({{0.5, -1.0, 2.0}}));
  const Var y = tape.matmul_nt(x, tape.parameter(params.at("W")));
  const Var y0 = tape.slice_cols(y, 0, 1);
  const auto grads = tape.backward(y0);
  CHECK(grads.at("W") == Tensor2::from_rows({{0.5, -1.0, 2.0}, {0, 0, 0}}));
}

TEST_CASE("backward state errors") {
  Tape empty;
  CHECK_THROWS_AS(empty.backward(Var{0}), StateError);
  ParameterSet params;
  params.add("w", Tensor2(1, 1, 2.0));
  Tape tape;
  const Var l = tape.mul(tape.parameter(params.at("w")), tape.parameter(params.at("w")));
  tape.backward(l);
  CHECK(tape.consumed());
  CHECK_THROWS_AS(tape.backward(l), StateError);

  Tape wide;
  const Var v = wide.parameter(params.at("w"));
  const Var two = wide.constant(Tensor2(1, 2, 1.0));
  CHECK_THROWS_AS(wide.backward(wide.mul(two, wide.add(two, two))), ShapeError);
  (void)v;
}

TEST_CASE("frozen parameters get no gradient entry") {
  ParameterSet params;
  params.add("emb", Tensor2::from_rows({{1, 2}, {3, 4}}), false);
  params.add("W", Tensor2::from_rows({{1, -1}}));
  params.add("b", Tensor2(1, 1));
  Tape tape;
  const std::vector<std::size_t> rows{1, 0};
  const Var x = tape.gather_rows(params.at("emb"), rows);
  const Var s = tape.affine(x, tape.parameter(params.at("W")), tape.parameter(params.at("b")));
  const Var loss = tape.softmax_cross_entropy(
      tape.affine(s, tape.constant(Tensor2::from_rows({{1.0}, {-1.0}})),
                  tape.constant(Tensor2(1, 2))),
      std::vector<std::size_t>{0, 1});
  const auto grads = tape.backward(loss);
  CHECK(grads.count("emb") == 0);
  CHECK(grads.count("W") == 1);
  CHECK(grads.at("W").same_shape(params.at("W").value));
}

TEST_CASE("sgd step examples") {
  ParameterSet params;
  params.add("p", Tensor2(1, 1, 1.0));
  params.add("frozen", Tensor2(1, 1, 1.0), false);
  Gradients g{{"p", Tensor2(1, 1, 1.0)}};
  sgd_step(params, g, 0.1, 0.0);
  CHECK(params.at("p").value[0] == doctest::Approx(0.9).epsilon(1e-15));

  params.at("p").value[0] = 1.0;
  sgd_step(params, {{"p", Tensor2(1, 1, 0.0)}}, 0.1, 1e-7);
  CHECK(params.at("p").value[0] == doctest::Approx(1.0 - 1e-8).epsilon(1e-15));
  CHECK(params.at("frozen").value[0] == 1.0);
}

TEST_CASE("sgd step rejects bad input") {
  ParameterSet params;
  params.add("p", Tensor2(1, 2, 1.0));
  params.add("q", Tensor2(1, 1, 1.0));
  CHECK_THROWS_AS(sgd_step(params, {}, -1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(sgd_step(params, {}, 0.1, -1.0), ConfigError);
  Tensor2 bad(1, 2, 0.0);
  bad[1] = std::numeric_limits<double>::infinity();
  try {
    sgd_step(params, {{"q", Tensor2(1, 1, 1.0)}, {"p", bad}}, 0.1, 0.0);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("'p'") != std::string::npos);
  }
  // Nothing moved: validation precedes the update.
  CHECK(params.at("q").value[0] == 1.0);
  CHECK_THROWS_AS(sgd_step(params, {{"p", Tensor2(2, 1)}}, 0.1, 0.0), ShapeError);
}

TEST_CASE("sgd with lr 0 is the identity") {
  Rng rng(5);
  ParameterSet params;
  params.add("a", random_tensor(rng, 3, 4));
  params.add("b", random_tensor(rng, 1, 4));
  const auto before = params.snapshot();
  Gradients g{{"a", random_tensor(rng, 3, 4)}, {"b", random_tensor(rng, 1, 4)}};
  sgd_step(params, g, 0.0, 1e-7);
  CHECK(params.snapshot() == before);
}

TEST_CASE("rng is a fixed counter-based stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  // Draw k is mix64(seed + k * golden gamma).
  Rng c(7);
  CHECK(c.next_u64() == mix64(7 + 0x9E3779B97F4A7C15ULL));
  CHECK(c.next_u64() == mix64(7 + 2 * 0x9E3779B97F4A7C15ULL));
  // Reference SplitMix64 output for state 0 after one increment.
  CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0xE220A8397B1DCDAFULL);
  Rng d(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(d.below(7) < 7);
  }
  CHECK(Rng(1).derive("x").next_u64() != Rng(1).derive("y").next_u64());
  CHECK(Rng(1).derive("x").next_u64() == Rng(1).derive("x").next_u64());
}

TEST_CASE("gradcheck on affine + softmax + CE") {
  Rng rng(21);
  ParameterSet params;
  params.add("W", random_tensor(rng, 4, 3));
  params.add("b", random_tensor(rng, 1, 4));
  const Tensor2 x = random_tensor(rng, 5, 3);
  const auto y = random_labels(rng, 5, 4);
  const auto report = grad_check(
      [&](Tape& t) {
        return t.nll(t.softmax(t.affine(t.constant(x), t.parameter(params.at("W")),
                                        t.parameter(params.at("b")))),
                     y);
      },
      params);
  CHECK(report.passed);
  CHECK(report.entries_checked == 16);
  CHECK(report.max_relative_error < 1e-4);
}

TEST_CASE("gradcheck detects a wrong gradient") {
  ParameterSet params;
  params.add("w", Tensor2::from_rows({{0.3, -0.7}}));
  const auto loss = [&] {
    const auto& w = params.at("w").value;
    return w[0] * w[0] + 3.0 * w[1];
  };
  Gradients wrong{{"w", Tensor2::from_rows({{0.6, 3.5}})}};
  const auto report = grad_check(loss, wrong, params);
  CHECK_FALSE(report.passed);
  CHECK(report.worst_parameter == "w");
  CHECK(report.worst_index == 1);
  Gradients right{{"w", Tensor2::from_rows({{0.6, 3.0}})}};
  CHECK(grad_check(loss, right, params).passed);
}

TEST_CASE("property: every op passes gradcheck on random shapes") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const std::size_t batch = 1 + rng.below(4);
    const std::size_t in = 1 + rng.below(5);
    const std::size_t out = 2 + rng.below(4);
    ParameterSet params;
    params.add("x", random_tensor(rng, batch, in));
    params.add("W", random_tensor(rng, out, in));
    params.add("b", random_tensor(rng, 1, out));
    params.add("U", random_tensor(rng, out, out));
    params.add("m", random_tensor(rng, batch, out));
    const auto labels = random_labels(rng, batch, out);
    std::vector<std::uint8_t> mask(batch);
    for (auto& m : mask) m = static_cast<std::uint8_t>(rng.below(2));
    const std::size_t begin = rng.below(out - 1);
    const std::size_t count = 1 + rng.below(out - begin - 1);
    const auto forward = [&](Tape& t) {
      const Var x = t.parameter(params.at("x"));
      const Var a = t.affine(x, t.parameter(params.at("W")), t.parameter(params.at("b")));
      const Var s = t.sigmoid(a);
      const Var h = t.tanh(t.matmul_nt(s, t.parameter(params.at("U"))));
      const Var m = t.parameter(params.at("m"));
      const Var sel = t.select_rows(t.mul(h, m), t.add(a, m), mask);
      const Var sl = t.slice_cols(sel, begin, count);
      // Fold the slice back in so both the slice and the rest get gradient.
      const Var wide = t.add(sel, t.constant(Tensor2(batch, out)));
      const Var ce = t.softmax_cross_entropy(wide, labels);
      const Var ce2 = t.nll(t.softmax(t.add(sl, sl)), std::vector<std::size_t>(batch, 0));
      return t.add(ce, ce2);
    };
    const auto report = grad_check(forward, params);
    CHECK(report.passed);
    if (!report.passed) {
      MESSAGE(report.worst_parameter << "[" << report.worst_index << "] analytic "
                                     << report.worst_analytic << " numeric "
                                     << report.worst_numeric);
    }
  }
}

TEST_CASE("reverse_gradient negates and scales") {
  Rng rng(4);
  ParameterSet params;
  params.add("W", random_tensor(rng, 3, 2));
  const Tensor2 x = random_tensor(rng, 2, 2);
  const std::vector<std::size_t> y{0, 2};
  for (double lambda : {1.0, 0.5, 2.0}) {
    Tape plain;
    const Var plain_logits = plain.matmul_nt(plain.constant(x), plain.parameter(params.at("W")));
    const Tensor2 plain_value = plain.value(plain_logits);
    const auto g = plain.backward(plain.softmax_cross_entropy(plain_logits, y));
    Tape rev;
    const Var w = rev.reverse_gradient(rev.parameter(params.at("W")), lambda);
    const Var logits = rev.matmul_nt(rev.constant(x), w);
    CHECK(rev.value(logits) == plain_value);
    const auto gr = rev.backward(rev.softmax_cross_entropy(logits, y));
    for (std::size_t i = 0; i < g.at("W").size(); ++i) {
      CHECK(gr.at("W")[i] == -lambda * g.at("W")[i]);
    }
  }
  GradCheckOptions opts;
  opts.expected_scale = -1.0;
  const auto report = grad_check(
      [&](Tape& t) {
        return t.softmax_cross_entropy(
            t.matmul_nt(t.constant(x), t.reverse_gradient(t.parameter(params.at("W")), 1.0)), y);
      },
      params, opts);
  CHECK(report.passed);
}

}  // TEST_SUITE
