// Copyright 2026 The maskct Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>

#include "gradcheck.hpp"
#include "maskct/backbone/extractor.hpp"
#include "maskct/backbone/features.hpp"
#include "maskct/backbone/resnet.hpp"
#include "maskct/core/error.hpp"
#include "maskct/io/tensor_container.hpp"

using namespace maskct;
using namespace maskct::backbone;
namespace fs = std::filesystem;

namespace {

ImagePlane noise_image(int size, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> d(0, 255);
  ImagePlane img(size, size);
  for (double& v : img.data()) v = d(rng);
  return img;
}

// Trainable scalars of a torchvision-style ResNet truncated after `stages` stages.
std::size_t expected_scalars(int depth, int stages, int w) {
  const std::vector<int> blocks = depth == 18   ? std::vector<int>{2, 2, 2, 2}
                                  : depth == 34 ? std::vector<int>{3, 4, 6, 3}
                                  : depth == 50 ? std::vector<int>{3, 4, 6, 3}
                                                : std::vector<int>{3, 4, 23, 3};
  const bool bottleneck = depth >= 50;
  std::size_t n = 3 * w * 49 + 2 * w;
  int in = w;
  for (int s = 0; s < stages; ++s) {
    const int width = w << s;
    const int out = bottleneck ? 4 * width : width;
    for (int b = 0; b < blocks[s]; ++b) {
      if (bottleneck)
        n += in * width + 2 * width + width * width * 9 + 2 * width + width * out + 2 * out;
      else
        n += in * width * 9 + 2 * width + width * width * 9 + 2 * width;
      if (b == 0 && (s > 0 || in != out)) n += in * out + 2 * out;
      in = out;
    }
  }
  return n;
}

fs::path temp_file(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "maskct_backbone_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(BackboneConfig, StrideAndChannels) {
  BackboneConfig c;
  EXPECT_EQ(c.stride(), 8);
  EXPECT_EQ(c.out_channels(), 128);
  c.stages = 3;
  EXPECT_EQ(c.stride(), 16);
  EXPECT_EQ(c.out_channels(), 256);
  c.depth = 50;
  EXPECT_EQ(c.out_channels(), 1024);
  c.depth = 19;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Backbone, FullResNetParameterCounts) {
  // Published classifier totals minus the final fully connected layer.
  for (auto [depth, expect] : {std::pair{18, std::size_t{11689512 - 513000}}, std::pair{34, std::size_t{21797672 - 513000}},
                               std::pair{50, std::size_t{25557032 - 2049000}}}) {
    ParameterSet ps;
    Rng rng(1);
    ResNetPrefix net(BackboneConfig{depth, 4, 64}, ps, rng);
    EXPECT_EQ(ps.scalar_count("backbone", true), expect) << "depth " << depth;
  }
}

TEST(Backbone, PrefixParameterCountsMatchOracle) {
  for (int depth : {18, 34, 50, 101})
    for (int stages = 1; stages <= 4; ++stages) {
      ParameterSet ps;
      Rng rng(2);
      ResNetPrefix net(BackboneConfig{depth, stages, 8}, ps, rng);
      EXPECT_EQ(ps.scalar_count("backbone", true), expected_scalars(depth, stages, 8)) << depth << "/" << stages;
    }
}

TEST(Backbone, TorchvisionParameterNames) {
  ParameterSet ps;
  Rng rng(3);
  ResNetPrefix net(BackboneConfig{50, 2, 8}, ps, rng);
  for (const char* name : {"backbone.conv1.weight", "backbone.bn1.running_var", "backbone.layer1.0.downsample.0.weight",
                           "backbone.layer2.3.bn3.weight", "backbone.layer2.0.conv2.weight"})
    EXPECT_TRUE(ps.find(name).has_value()) << name;
  EXPECT_FALSE(ps.find("backbone.layer3.0.conv1.weight").has_value());
}

TEST(Extractor, FeatureShapesAt384) {
  ParameterSet ps;
  Rng rng(4);
  WfeConfig cfg{BackboneConfig{18, 3, 16}, 384};
  WeatherFeatureExtractor wfe(cfg, ps, rng);
  FeatureMap map = wfe.extract(ps, noise_image(384, 5));
  EXPECT_EQ(map.height, 24);
  EXPECT_EQ(map.width, 24);
  EXPECT_EQ(map.channels(), 64);
  EXPECT_EQ(cfg.tokens(), 576);
  ASSERT_EQ(map.origin.size(), 576u);
  EXPECT_EQ(map.origin[25], (Rect{16, 16, 16, 16}));
  EXPECT_TRUE(map.values.allFinite());
}

TEST(Extractor, DefaultStagesGiveStrideEight) {
  ParameterSet ps;
  Rng rng(4);
  WfeConfig cfg{BackboneConfig{18, 2, 8}, 64};
  WeatherFeatureExtractor wfe(cfg, ps, rng);
  FeatureMap map = wfe.extract(ps, noise_image(64, 5));
  EXPECT_EQ(map.height, 8);
  EXPECT_EQ(map.channels(), 16);
}

TEST(Extractor, ZeroImageIsFinite) {
  ParameterSet ps;
  Rng rng(6);
  WeatherFeatureExtractor wfe(WfeConfig{BackboneConfig{34, 2, 8}, 64}, ps, rng);
  EXPECT_TRUE(wfe.extract(ps, ImagePlane(64, 64)).values.allFinite());
}

TEST(Extractor, RejectsWrongInputAndMissingWeights) {
  ParameterSet ps;
  Rng rng(7);
  WeatherFeatureExtractor wfe(WfeConfig{BackboneConfig{18, 2, 8}, 64}, ps, rng);
  EXPECT_THROW(wfe.extract(ps, ImagePlane(32, 64)), std::invalid_argument);
  ParameterSet empty;
  EXPECT_THROW(wfe.extract(empty, ImagePlane(64, 64)), std::invalid_argument);
  EXPECT_THROW((WfeConfig{BackboneConfig{18, 2, 8}, 60}.validate()), std::invalid_argument);
}

TEST(Tiling, NonOverlappingCover) {
  auto rects = tiling_origin(3, 4, 8);
  ASSERT_EQ(rects.size(), 12u);
  EXPECT_EQ(rects[0], (Rect{0, 0, 8, 8}));
  EXPECT_EQ(rects[5], (Rect{8, 8, 8, 8}));
  EXPECT_EQ(rects[11], (Rect{24, 16, 8, 8}));
}

TEST(Backbone, GradientsMatchFiniteDifferences) {
  ParameterSet ps;
  Rng rng(8);
  ResNetPrefix net(BackboneConfig{18, 2, 2}, ps, rng);
  for (ParamId id = 0; id < ps.size(); ++id)
    if (ps.at(id).trainable) ps[id] = normal_matrix(ps[id].rows(), ps[id].cols(), 0.5, rng);
  SpatialTensor x = image_to_tensor(noise_image(16, 9));
  ResNetPrefix::Cache cache;
  SpatialTensor y = net.forward(ps, x, &cache);
  Matrix probe = normal_matrix(y.values.rows(), y.values.cols(), 1.0, rng);
  GradientSet g(ps);
  net.backward(ps, cache, SpatialTensor{y.height, y.width, probe}, g);
  auto errors = maskct::testing::check_gradients(
      ps, g, [&](const ParameterSet& p) { return (net.forward(p, x, nullptr).values.array() * probe.array()).sum(); });
  for (auto& e : errors) EXPECT_LT(e.relative, 1e-4) << e.name;
}

TEST(Embedding, LinearProjectionAndGradient) {
  ParameterSet ps;
  Rng rng(10);
  FeatureEmbedding emb(ps, "embed", 4, 6, rng);
  FeatureMap map{2, 2, normal_matrix(4, 4, 1.0, rng), tiling_origin(2, 2, 8)};
  FeatureSequence seq = emb.forward(ps, map);
  EXPECT_EQ(seq.tokens.rows(), 4);
  EXPECT_EQ(seq.tokens.cols(), 6);
  EXPECT_EQ(seq.positions, map.origin);
  Matrix probe = normal_matrix(4, 6, 1.0, rng);
  GradientSet g(ps);
  Matrix dmap = emb.backward(ps, map, probe, g);
  Matrix numeric = maskct::testing::numeric_input_gradient(map.values, [&](const Matrix& v) {
    FeatureMap m = map;
    m.values = v;
    return (emb.forward(ps, m).tokens.array() * probe.array()).sum();
  });
  EXPECT_LT(maskct::testing::relative_error(dmap, numeric), 1e-6);
}

TEST(Loader, MapsTorchvisionLayoutAndReportsChecksum) {
  ParameterSet ps;
  Rng rng(11);
  BackboneConfig cfg{18, 1, 4};
  ResNetPrefix net(cfg, ps, rng);

  // Hand-built F32 container: conv weights as [out, in, kh, kw], norms as [c].
  struct Raw {
    std::string name;
    std::vector<std::int64_t> shape;
    std::vector<float> values;
  };
  std::vector<Raw> raws;
  std::uniform_int_distribution<int> small(-64, 64);
  for (ParamId id : net.parameter_ids()) {
    const Parameter& p = ps.at(id);
    Raw r{p.name, {}, {}};
    if (p.name.find("conv") != std::string::npos || p.name.find("downsample.0") != std::string::npos) {
      const std::int64_t out = p.value.cols();
      const std::int64_t k = p.name.find("downsample") != std::string::npos ? 1
                             : p.name == "backbone.conv1.weight"            ? 7
                                                                            : 3;
      r.shape = {out, p.value.rows() / (k * k), k, k};
    } else {
      r.shape = {p.value.cols()};
    }
    std::int64_t n = 1;
    for (auto d : r.shape) n *= d;
    for (std::int64_t i = 0; i < n; ++i) r.values.push_back(static_cast<float>(small(rng)) / 8.0f);
    raws.push_back(std::move(r));
  }
  std::string header = "{";
  std::uint64_t offset = 0;
  for (const Raw& r : raws) {
    if (header.size() > 1) header += ",";
    header += "\"" + r.name + "\":{\"dtype\":\"F32\",\"shape\":[";
    for (std::size_t i = 0; i < r.shape.size(); ++i) header += (i ? "," : "") + std::to_string(r.shape[i]);
    const std::uint64_t bytes = r.values.size() * 4;
    header += "],\"data_offsets\":[" + std::to_string(offset) + "," + std::to_string(offset + bytes) + "]}";
    offset += bytes;
  }
  header += "}";
  std::string blob(8, '\0');
  for (int i = 0; i < 8; ++i) blob[i] = static_cast<char>((header.size() >> (8 * i)) & 0xff);
  blob += header;
  for (const Raw& r : raws) blob.append(reinterpret_cast<const char*>(r.values.data()), r.values.size() * 4);
  fs::path file = temp_file("torch_layout.safetensors");
  io::write_file_atomic(file, blob);

  LoadReport report = load_pretrained_weights(file, net, ps);
  EXPECT_EQ(report.tensors, raws.size());
  EXPECT_EQ(report.checksum, parameter_checksum(ps, "backbone."));
  for (std::size_t t = 0; t < raws.size(); ++t) {
    const Raw& r = raws[t];
    const Matrix& m = ps[net.parameter_ids()[t]];
    if (r.shape.size() == 4) {
      const auto in = r.shape[1], k = r.shape[2];
      for (std::int64_t o = 0; o < r.shape[0]; ++o)
        for (std::int64_t c = 0; c < in; ++c)
          for (std::int64_t y = 0; y < k; ++y)
            for (std::int64_t x = 0; x < k; ++x)
              ASSERT_EQ(m((y * k + x) * in + c, o), r.values[((o * in + c) * k + y) * k + x]) << r.name;
    } else {
      for (std::int64_t c = 0; c < r.shape[0]; ++c) ASSERT_EQ(m(0, c), r.values[c]) << r.name;
    }
  }
}

TEST(Loader, MissingFileTensorOrShapeMismatch) {
  ParameterSet ps;
  Rng rng(13);
  ResNetPrefix net(BackboneConfig{18, 1, 4}, ps, rng);
  EXPECT_THROW(load_pretrained_weights(temp_file("does_not_exist.safetensors"), net, ps), DataError);

  Matrix w = ps[0];
  fs::path partial = temp_file("partial.safetensors");
  io::write_tensor_container(partial, {{ps.at(0).name, &w}}, {});
  try {
    load_pretrained_weights(partial, net, ps);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing layer backbone.bn1.weight"), std::string::npos) << e.what();
  }

  std::vector<Matrix> stored;
  for (ParamId id : net.parameter_ids()) stored.push_back(ps[id]);
  stored[0] = Matrix::Zero(3, 3);
  std::vector<io::TensorRef> refs;
  for (std::size_t i = 0; i < stored.size(); ++i) refs.push_back({ps.at(net.parameter_ids()[i]).name, &stored[i]});
  fs::path bad = temp_file("bad_shape.safetensors");
  io::write_tensor_container(bad, refs, {});
  try {
    load_pretrained_weights(bad, net, ps);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("shape mismatch for layer backbone.conv1.weight"), std::string::npos);
  }
}
