// Copyright 2026 The mrfc Authors
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mrfc/model.hpp"

namespace mrfc {

/// Row-major grayscale image with up to 16-bit samples.
struct GrayImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<std::uint16_t> pixels;

  GrayImage() = default;
  GrayImage(int w, int h, int max = 255);

  std::uint16_t& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }
  std::uint16_t at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
};

enum class PgmFormat { binary, ascii };

GrayImage read_pgm(std::istream& in);
GrayImage load_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, std::ostream& out, PgmFormat format = PgmFormat::binary);
void save_pgm(const GrayImage& image, const std::filesystem::path& path, PgmFormat format = PgmFormat::binary);

struct StereoSpec {
  GrayImage left;
  GrayImage right;
  int max_disparity = 15;
  double disparity_step = 1.0;
  /// Edge weight where the left-image gradient across the edge is below the threshold.
  double w_high = 20.0;
  double w_low = 5.0;
  double gradient_threshold = 8.0;
  /// Cost for matches falling outside the right image; mean in-bounds cost when unset.
  std::optional<double> out_of_bounds_cost;
};

/// phi_p(d) = |I_L(y, x) - I_R(y, x - d)| with linear interpolation, and
/// w_pq |d0 - d1| on the 4-connected grid.
Model build_stereo_model(const StereoSpec& spec);

inline constexpr int kRestorationLabels = 256;
inline constexpr double kRestorationWeight = 25.0;
inline constexpr double kRestorationTrunc = 200.0;

struct RestorationSpec {
  GrayImage image;
  /// Non-zero = known pixel. Empty means every pixel is known.
  std::optional<GrayImage> mask;
  int label_count = kRestorationLabels;
};

/// phi_p(l) = (I(p) - l)^2 on known pixels, 0 on masked ones, and
/// 25 min((l0 - l1)^2, 200) on every grid edge.
Model build_restoration_model(const RestorationSpec& spec);

struct SyntheticSpec {
  std::uint64_t seed = 0;
  int rows = 16;
  int cols = 16;
  int labels = 8;
  int regions = 4;
  double noise_sigma = 1.0;
  double pairwise_weight = 2.0;
};

struct SyntheticInstance {
  Model model;
  Solution ground_truth;
};

/// Piecewise-constant truth painted from random rectangles; unary
/// max(0, (l - truth)^2 + sigma N(0,1)) per entry, uniform abs_diff pairwise.
SyntheticInstance generate_synthetic(const SyntheticSpec& spec);

/// Smooth procedural test image with flat patches, ramps and a disc.
GrayImage make_test_image(std::uint64_t seed, int width, int height);

/// Adds clamped Gaussian noise and hides a random fraction of pixels.
struct DegradedImage {
  GrayImage noisy;
  GrayImage mask;
};
DegradedImage degrade_image(const GrayImage& clean, std::uint64_t seed, double noise_sigma, double missing_fraction);

/// Label image of a grid solution (labels as intensities).
GrayImage labels_to_image(const Solution& x, GridShape shape, int label_count);
Solution image_to_labels(const GrayImage& image, int label_count);

}  // namespace mrfc
