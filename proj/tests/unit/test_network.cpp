#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "chaoswave/errors.hpp"
#include "chaoswave/network.hpp"
#include "chaoswave/train.hpp"
#include "gradcheck.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

namespace chaoswave {
namespace {

NetworkSpec tiny_spec() { return NetworkSpec::conv_blocks(8, 8, {2, 2}); }

Tensor random_batch(std::size_t n, std::size_t size, std::mt19937_64& rng) {
  Tensor t({n, 1, size, size});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : t.values()) v = u(rng);
  return t;
}

TEST(NetworkSpec, DefaultShapes) {
  const NetworkSpec spec = NetworkSpec::full_size();
  const auto shapes = spec.output_shapes();
  ASSERT_EQ(shapes.size(), 13u);
  EXPECT_EQ(shapes[0], (Shape{8, 512, 512}));
  EXPECT_EQ(shapes[3], (Shape{8, 256, 256}));
  EXPECT_EQ(shapes[7], (Shape{16, 128, 128}));
  EXPECT_EQ(shapes[11], (Shape{32, 64, 64}));
  EXPECT_EQ(shapes[12], (Shape{2}));
  EXPECT_EQ(spec.num_classes(), 2u);
  EXPECT_NE(spec.hash(), tiny_spec().hash());
  EXPECT_EQ(spec.hash(), NetworkSpec::full_size().hash());
  EXPECT_THROW(NetworkSpec::conv_blocks(6, 6, {2, 2, 2}).output_shapes(), InvalidInput);
}

TEST(NetworkSpec, ShapeLedger) {
  Network net(NetworkSpec::full_size());
  const auto rows = net.shape_ledger();
  ASSERT_EQ(rows.size(), 15u);
  EXPECT_EQ(rows[0].layer, "Input Image");
  EXPECT_EQ(rows[0].output, (Shape{512, 512, 1}));
  EXPECT_EQ(rows[1].layer, "Convolution1");
  EXPECT_EQ(rows[1].output, (Shape{512, 512, 8}));
  ASSERT_FALSE(rows[1].notes.empty());
  EXPECT_EQ(rows[1].notes[0], "Weights: 3 x 3 x 1 x 8");
  EXPECT_EQ(rows[4].layer, "Max Pooling1");
  EXPECT_EQ(rows[4].output, (Shape{256, 256, 8}));
  EXPECT_EQ(rows[8].layer, "Max Pooling2");
  EXPECT_EQ(rows[8].output, (Shape{128, 128, 16}));
  EXPECT_EQ(rows[12].output, (Shape{64, 64, 32}));
  EXPECT_EQ(rows[13].layer, "Fully Connected1");
  EXPECT_EQ(rows[13].output, (Shape{1, 1, 2}));
  EXPECT_EQ(rows[13].notes[0], "Weights: 2 x 131072");
  EXPECT_EQ(rows[14].layer, "Classification Output");
}

TEST(Network, ForwardTraceMatchesSpec) {
  // Full-size forward on one image: every recorded shape agrees with the spec.
  NetworkSpec spec = NetworkSpec::full_size();
  Network net(spec);
  net.initialize(1);
  std::mt19937_64 rng(1);
  std::vector<Shape> trace;
  const Tensor logits = net.forward(random_batch(1, 512, rng), Mode::Infer, &trace);
  EXPECT_EQ(logits.shape(), (Shape{1, 2}));
  EXPECT_EQ(trace, spec.output_shapes());
}

TEST(Network, UninitializedThrows) {
  Network net(tiny_spec());
  std::mt19937_64 rng(2);
  EXPECT_THROW(net.forward(random_batch(2, 8, rng), Mode::Infer), InvalidState);
  EXPECT_THROW(compute_gradients(net, random_batch(2, 8, rng), {0, 1}, {1.0, 1.0}), InvalidState);
}

TEST(Network, FullGradientMatchesFiniteDifferences) {
  Network net(tiny_spec());
  net.initialize(3, 0.5);
  std::mt19937_64 rng(3);
  const Tensor batch = random_batch(4, 8, rng);
  const std::vector<std::size_t> labels{0, 1, 1, 0};
  const std::vector<double> weights{1.3, 0.8};
  compute_gradients(net, batch, labels, weights);
  std::vector<Tensor> grads;
  for (Tensor* g : net.gradients()) grads.push_back(*g);
  const auto params = net.parameters();

  // Batch-norm running stats drift on every train-mode pass but never feed
  // the train-mode output, so repeated loss evaluations stay consistent.
  const auto loss = [&] { return compute_gradients(net, batch, labels, weights).loss; };
  std::size_t checked = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::size_t samples = std::min<std::size_t>(params[i]->size(), 40);
    const auto rep = testing::check_gradient(loss, params[i]->values(), grads[i].values(), samples, rng);
    checked += rep.checked;
    worst = std::max(worst, rep.max_relative_error);
  }
  EXPECT_GE(checked, 80u);
  EXPECT_LT(worst, 1e-4);
}

TEST(Network, ZeroClassWeightsGiveZeroGradient) {
  Network net(tiny_spec());
  net.initialize(4, 0.5);
  std::mt19937_64 rng(4);
  const auto res = compute_gradients(net, random_batch(3, 8, rng), {0, 1, 0}, {0.0, 0.0});
  EXPECT_EQ(res.loss, 0.0);
  for (Tensor* g : net.gradients()) {
    for (double v : g->values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(Network, DuplicatedSampleKeepsMeanGradient) {
  Network net(tiny_spec());
  net.initialize(5, 0.5);
  std::mt19937_64 rng(5);
  const Tensor a = random_batch(2, 8, rng);
  Tensor twice({4, 1, 8, 8});
  std::copy(a.values().begin(), a.values().end(), twice.values().begin());
  std::copy(a.values().begin(), a.values().end(), twice.values().begin() + 128);
  const auto r1 = compute_gradients(net, a, {0, 1}, {1.0, 1.0});
  std::vector<Tensor> g1;
  for (Tensor* g : net.gradients()) g1.push_back(*g);
  const auto r2 = compute_gradients(net, twice, {0, 1, 0, 1}, {1.0, 1.0});
  EXPECT_NEAR(r1.loss, r2.loss, 1e-12);
  const auto g2 = net.gradients();
  for (std::size_t i = 0; i < g1.size(); ++i) {
    for (std::size_t k = 0; k < g1[i].size(); ++k) EXPECT_NEAR(g1[i][k], (*g2[i])[k], 1e-10);
  }
}

TEST(Network, ScaledWeightsScaleLoss) {
  Network net(tiny_spec());
  net.initialize(6, 0.5);
  std::mt19937_64 rng(6);
  const Tensor batch = random_batch(4, 8, rng);
  const std::vector<std::size_t> labels{1, 0, 0, 1};
  const auto a = compute_gradients(net, batch, labels, {1.0, 1.0});
  const auto b = compute_gradients(net, batch, labels, {3.0, 3.0});
  EXPECT_EQ(a.logits, b.logits);
  EXPECT_NEAR(b.loss, 3.0 * a.loss, 1e-12);
}

TEST(Sgdm, Steps) {
  Tensor p({2}, std::vector<double>{1.0, -2.0});
  Tensor g({2}, std::vector<double>{0.5, 1.0});
  std::vector<Tensor> vel{Tensor({2})};
  sgdm_step({&p}, vel, {&g}, 0.01, 0.0);
  EXPECT_DOUBLE_EQ(p[0], 1.0 - 0.005);
  EXPECT_DOUBLE_EQ(p[1], -2.0 - 0.01);

  Tensor q({2}, std::vector<double>{1.0, -2.0});
  Tensor zero({2});
  std::vector<Tensor> v0{Tensor({2})};
  sgdm_step({&q}, v0, {&zero}, 0.01, 0.9);
  EXPECT_EQ(q, Tensor({2}, std::vector<double>{1.0, -2.0}));

  // Two steps with a constant gradient: v1 = g, v2 = 1.9 g, total -0.029 g.
  Tensor r({2});
  std::vector<Tensor> v{Tensor({2})};
  sgdm_step({&r}, v, {&g}, 0.01, 0.9);
  sgdm_step({&r}, v, {&g}, 0.01, 0.9);
  EXPECT_NEAR(r[0], -0.029 * 0.5, 1e-15);
  EXPECT_NEAR(r[1], -0.029, 1e-15);

  std::vector<Tensor> wrong{Tensor({3})};
  EXPECT_THROW(sgdm_step({&r}, wrong, {&g}, 0.01, 0.9), InvalidInput);
  std::vector<Tensor> none;
  EXPECT_THROW(sgdm_step({&r}, none, {&g}, 0.01, 0.9), InvalidInput);
}

TrainConfig quick_config(std::size_t epochs) {
  TrainConfig c;
  c.batch_size = 16;
  c.max_epochs = epochs;
  c.seed = 11;
  c.validation_frequency = 10;
  c.init_std = 0.1;
  return c;
}

TEST(Train, DeterministicForFixedSeed) {
  const LabeledDataset ds = testing::flat_vs_checkerboard(40, 16, 1);
  const NetworkSpec spec = NetworkSpec::conv_blocks(16, 16, {2, 4});
  const TrainResult a = train(ds, spec, quick_config(2));
  const TrainResult b = train(ds, spec, quick_config(2));
  EXPECT_EQ(a.checkpoint, b.checkpoint);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
  EXPECT_EQ(encode_checkpoint(a.checkpoint), encode_checkpoint(b.checkpoint));
}

TEST(Train, LearnsFlatVersusCheckerboard) {
  const LabeledDataset ds = testing::flat_vs_checkerboard(200, 64, 2);
  const NetworkSpec spec = NetworkSpec::conv_blocks(64, 64, {4, 8, 8});
  const TrainResult r = train(ds, spec, quick_config(5));
  ASSERT_EQ(r.epoch_losses.size(), 5u);
  EXPECT_LT(r.epoch_losses[3], r.epoch_losses[0]);
  Network net = restore_network(spec, r.checkpoint);
  const auto probs = predict_proba(net, ds);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool malignant = probs[i][1] > probs[i][0];
    correct += malignant == (ds.items[i].label == Label::Malignant);
  }
  EXPECT_GE(static_cast<double>(correct) / static_cast<double>(ds.size()), 0.99);
  bool has_validation = false;
  for (const auto& p : r.curves) has_validation |= p.split == "validation";
  EXPECT_FALSE(has_validation);  // no validation set given
}

TEST(Train, ZeroLearningRateLeavesParameters) {
  const LabeledDataset ds = testing::flat_vs_checkerboard(20, 16, 3);
  const NetworkSpec spec = NetworkSpec::conv_blocks(16, 16, {2});
  TrainConfig c = quick_config(1);
  c.learning_rate = 0.0;
  const TrainResult one = train(ds, spec, c);
  c.max_epochs = 3;
  const TrainResult three = train(ds, spec, c);
  EXPECT_EQ(one.checkpoint.parameters, three.checkpoint.parameters);
  for (const Tensor& v : three.checkpoint.velocities) {
    for (double x : v.values()) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Train, NonFiniteLossDiverges) {
  LabeledDataset ds = testing::flat_vs_checkerboard(8, 16, 4);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t k = 0; k < 16; ++k) ds.items[0].image.pixels(r, k) = std::numeric_limits<double>::quiet_NaN();
  }
  TrainConfig c = quick_config(1);
  c.batch_size = 8;
  EXPECT_THROW(train(ds, NetworkSpec::conv_blocks(16, 16, {2}), c), NumericalDivergence);
}

TEST(Train, ValidationCurvesRecorded) {
  const LabeledDataset ds = testing::flat_vs_checkerboard(32, 16, 5);
  const LabeledDataset val = testing::flat_vs_checkerboard(8, 16, 6);
  const TrainResult r = train(ds, NetworkSpec::conv_blocks(16, 16, {2}), quick_config(2), &val);
  std::size_t train_pts = 0, val_pts = 0;
  for (const auto& p : r.curves) (p.split == "train" ? train_pts : val_pts) += 1;
  EXPECT_EQ(train_pts, 4u);  // 2 epochs x 2 batches
  EXPECT_GE(val_pts, 1u);
}

TEST(Checkpoint, RoundTripAndRestore) {
  const LabeledDataset ds = testing::flat_vs_checkerboard(16, 16, 7);
  const NetworkSpec spec = NetworkSpec::conv_blocks(16, 16, {2, 2});
  const TrainResult r = train(ds, spec, quick_config(1));
  const std::string bytes = encode_checkpoint(r.checkpoint);
  EXPECT_EQ(bytes.substr(0, 8), "CHWVCKPT");
  EXPECT_EQ(decode_checkpoint(bytes), r.checkpoint);

  testing::TempDir dir("ckpt");
  save_checkpoint(dir.path() / "m.ckpt", r.checkpoint);
  const Checkpoint loaded = load_checkpoint(dir.path() / "m.ckpt");
  EXPECT_EQ(loaded, r.checkpoint);

  Network a = restore_network(spec, r.checkpoint);
  Network b = restore_network(spec, loaded);
  const Tensor batch = make_batch(ds, {0, 1, 2, 3});
  EXPECT_EQ(a.forward(batch, Mode::Infer), b.forward(batch, Mode::Infer));
}

TEST(Checkpoint, RejectsCorruptInput) {
  const NetworkSpec spec = NetworkSpec::conv_blocks(8, 8, {2});
  Network net(spec);
  net.initialize(1);
  std::vector<Tensor> vel;
  for (Tensor* p : net.parameters()) vel.emplace_back(p->shape());
  const Checkpoint ck = make_checkpoint(net, vel, 1, 0);
  std::string bytes = encode_checkpoint(ck);

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad_magic), FormatError);
  EXPECT_THROW(decode_checkpoint(std::string_view(bytes).substr(0, bytes.size() - 5)), FormatError);
  EXPECT_THROW(decode_checkpoint(std::string_view(bytes).substr(0, 4)), FormatError);
  EXPECT_THROW(restore_network(NetworkSpec::conv_blocks(8, 8, {3}), ck), InvalidInput);
  testing::TempDir dir("ckpt");
  EXPECT_ANY_THROW(load_checkpoint(dir.path() / "missing.ckpt"));
}

}  // namespace
}  // namespace chaoswave
