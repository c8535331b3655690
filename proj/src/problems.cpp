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

#include "mrfc/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

#include "mrfc/error.hpp"

namespace mrfc {

GrayImage::GrayImage(int w, int h, int max) : width(w), height(h), maxval(max) {
  if (w <= 0 || h <= 0) throw InvalidInput("image dimensions must be positive");
  if (max < 1 || max > 65535) throw InvalidInput("maxval must lie in [1, 65535]");
  pixels.assign(static_cast<size_t>(w) * h, 0);
}

// ---------------------------------------------------------------------------
// PGM

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::istream& in) : in_(in) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("pgm: " + what + " at byte offset " + std::to_string(offset_));
  }

  int get() {
    const int c = in_.get();
    if (c != std::char_traits<char>::eof()) ++offset_;
    return c;
  }

  // Whitespace and '#' comments between header tokens.
  void skip_separators() {
    while (true) {
      const int c = in_.peek();
      if (c == '#') {
        while (true) {
          const int d = get();
          if (d == '\n' || d == '\r' || d == std::char_traits<char>::eof()) break;
        }
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
        get();
      } else {
        return;
      }
    }
  }

  long read_uint(const char* what) {
    skip_separators();
    long v = 0;
    int digits = 0;
    while (std::isdigit(in_.peek())) {
      v = v * 10 + (get() - '0');
      if (++digits > 9) fail(std::string("number too long in ") + what);
    }
    if (digits == 0) fail(std::string("expected ") + what);
    return v;
  }

  std::size_t offset() const { return offset_; }

 private:
  std::istream& in_;
  std::size_t offset_ = 0;
};

}  // namespace

GrayImage read_pgm(std::istream& in) {
  PgmReader r(in);
  if (r.get() != 'P') r.fail("missing magic number");
  const int kind = r.get();
  if (kind != '2' && kind != '5') r.fail("unsupported magic (expected P2 or P5)");
  const long width = r.read_uint("width");
  const long height = r.read_uint("height");
  const long maxval = r.read_uint("maxval");
  if (width <= 0 || height <= 0) r.fail("non-positive image dimensions");
  if (maxval < 1 || maxval > 65535) r.fail("maxval outside [1, 65535]");
  GrayImage img(static_cast<int>(width), static_cast<int>(height), static_cast<int>(maxval));

  if (kind == '5') {
    const int c = r.get();
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') r.fail("expected whitespace after maxval");
    const bool wide = maxval > 255;
    for (auto& px : img.pixels) {
      int hi = r.get();
      if (hi == std::char_traits<char>::eof()) r.fail("truncated pixel data");
      if (wide) {
        const int lo = r.get();
        if (lo == std::char_traits<char>::eof()) r.fail("truncated pixel data");
        px = static_cast<std::uint16_t>((hi << 8) | lo);
      } else {
        px = static_cast<std::uint16_t>(hi);
      }
      if (px > maxval) r.fail("sample exceeds maxval");
    }
  } else {
    for (auto& px : img.pixels) {
      const long v = r.read_uint("pixel value");
      if (v > maxval) r.fail("sample exceeds maxval");
      px = static_cast<std::uint16_t>(v);
    }
  }
  return img;
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  try {
    return read_pgm(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_pgm(const GrayImage& image, std::ostream& out, PgmFormat format) {
  if (image.pixels.size() != static_cast<size_t>(image.width) * image.height) {
    throw InvalidInput("image pixel buffer does not match its dimensions");
  }
  out << (format == PgmFormat::binary ? "P5" : "P2") << '\n'
      << image.width << ' ' << image.height << '\n'
      << image.maxval << '\n';
  if (format == PgmFormat::binary) {
    const bool wide = image.maxval > 255;
    for (std::uint16_t px : image.pixels) {
      if (wide) out.put(static_cast<char>(px >> 8));
      out.put(static_cast<char>(px & 0xff));
    }
  } else {
    for (int r = 0; r < image.height; ++r) {
      for (int c = 0; c < image.width; ++c) out << (c ? " " : "") << image.at(r, c);
      out << '\n';
    }
  }
}

void save_pgm(const GrayImage& image, const std::filesystem::path& path, PgmFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_pgm(image, out, format);
}

// ---------------------------------------------------------------------------
// Problem builders

namespace {

std::vector<Edge> grid_edges(GridShape shape, auto&& make_potential) {
  std::vector<Edge> edges;
  for (const auto& [i, j] : grid_edge_pairs(shape)) edges.push_back({i, j, make_potential(i, j)});
  return edges;
}

}  // namespace

Model build_stereo_model(const StereoSpec& spec) {
  const GrayImage& L = spec.left;
  const GrayImage& R = spec.right;
  if (L.width != R.width || L.height != R.height) throw InvalidInput("stereo images differ in size");
  if (L.width <= 0 || L.height <= 0) throw InvalidInput("stereo images are empty");
  if (spec.max_disparity < 1) throw InvalidInput("max_disparity must be >= 1");
  if (!(spec.disparity_step > 0.0)) throw InvalidInput("disparity_step must be positive");

  const int labels = static_cast<int>(std::floor(spec.max_disparity / spec.disparity_step + 1e-9)) + 1;
  const GridShape shape{L.height, L.width};
  UnaryTable unary(shape.size(), labels);
  LabelMask outside = LabelMask::Constant(shape.size(), labels, false);
  double in_sum = 0.0;
  long in_count = 0;
  for (int y = 0; y < L.height; ++y) {
    for (int x = 0; x < L.width; ++x) {
      const int p = y * L.width + x;
      for (int l = 0; l < labels; ++l) {
        const double xr = x - l * spec.disparity_step;
        if (xr < 0.0) {
          outside(p, l) = true;
          unary(p, l) = 0.0;
          continue;
        }
        const int x0 = static_cast<int>(std::floor(xr));
        const int x1 = std::min(x0 + 1, R.width - 1);
        const double t = xr - x0;
        const double sample = (1.0 - t) * R.at(y, x0) + t * R.at(y, x1);
        unary(p, l) = std::abs(static_cast<double>(L.at(y, x)) - sample);
        in_sum += unary(p, l);
        ++in_count;
      }
    }
  }
  const double oob = spec.out_of_bounds_cost.value_or(in_count ? in_sum / static_cast<double>(in_count) : 0.0);
  for (int p = 0; p < shape.size(); ++p) {
    for (int l = 0; l < labels; ++l) {
      if (outside(p, l)) unary(p, l) = oob;
    }
  }

  auto weight = [&](int i, int j) {
    const double grad = std::abs(static_cast<double>(L.pixels[i]) - static_cast<double>(L.pixels[j]));
    const double w = grad < spec.gradient_threshold ? spec.w_high : spec.w_low;
    return PairwisePotential::weighted(Kernel::abs_diff, w);
  };
  return Model(std::move(unary), grid_edges(shape, weight), shape);
}

Model build_restoration_model(const RestorationSpec& spec) {
  const GrayImage& img = spec.image;
  if (img.width <= 0 || img.height <= 0) throw InvalidInput("restoration image is empty");
  if (spec.mask && (spec.mask->width != img.width || spec.mask->height != img.height)) {
    throw InvalidInput("mask size differs from image");
  }
  if (spec.label_count < 1) throw InvalidInput("label_count must be >= 1");
  const GridShape shape{img.height, img.width};
  UnaryTable unary = UnaryTable::Zero(shape.size(), spec.label_count);
  for (int p = 0; p < shape.size(); ++p) {
    if (spec.mask && spec.mask->pixels[p] == 0) continue;
    const double v = img.pixels[p];
    for (int l = 0; l < spec.label_count; ++l) unary(p, l) = (v - l) * (v - l);
  }
  const auto pot = PairwisePotential::weighted(Kernel::truncated_quadratic, kRestorationWeight, kRestorationTrunc);
  return Model(std::move(unary), grid_edges(shape, [&](int, int) { return pot; }), shape);
}

SyntheticInstance generate_synthetic(const SyntheticSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1 || spec.labels < 1 || spec.regions < 1) {
    throw InvalidInput("synthetic parameters must be positive");
  }
  if (spec.noise_sigma < 0.0 || spec.pairwise_weight < 0.0) throw InvalidInput("noise and weight must be >= 0");
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> label_dist(0, spec.labels - 1);
  const GridShape shape{spec.rows, spec.cols};

  Solution truth(static_cast<size_t>(shape.size()), label_dist(rng));
  // Each further region paints a random rectangle spanning at least a quarter of each side.
  for (int k = 1; k < spec.regions; ++k) {
    const int h = std::uniform_int_distribution<int>((spec.rows + 3) / 4, spec.rows)(rng);
    const int w = std::uniform_int_distribution<int>((spec.cols + 3) / 4, spec.cols)(rng);
    const int r0 = std::uniform_int_distribution<int>(0, spec.rows - h)(rng);
    const int c0 = std::uniform_int_distribution<int>(0, spec.cols - w)(rng);
    const int l = label_dist(rng);
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + w; ++c) truth[r * spec.cols + c] = l;
    }
  }

  std::normal_distribution<double> noise(0.0, 1.0);
  UnaryTable unary(shape.size(), spec.labels);
  for (int p = 0; p < shape.size(); ++p) {
    for (int l = 0; l < spec.labels; ++l) {
      const double d = l - truth[p];
      const double eps = spec.noise_sigma > 0.0 ? spec.noise_sigma * noise(rng) : 0.0;
      unary(p, l) = std::max(0.0, d * d + eps);
    }
  }
  const auto pot = PairwisePotential::weighted(Kernel::abs_diff, spec.pairwise_weight);
  Model model(std::move(unary), grid_edges(shape, [&](int, int) { return pot; }), shape);
  return {std::move(model), std::move(truth)};
}

GrayImage make_test_image(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(width, height);
  const double base = 40.0 + 60.0 * u(rng);
  const double ramp = 60.0 + 60.0 * u(rng);
  const double cx = width * (0.3 + 0.4 * u(rng));
  const double cy = height * (0.3 + 0.4 * u(rng));
  const double radius = std::min(width, height) * (0.15 + 0.15 * u(rng));
  const double disc = 180.0 + 60.0 * u(rng);
  const int split = static_cast<int>(width * (0.3 + 0.4 * u(rng)));
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double v = c < split ? base : base + ramp * r / std::max(1, height - 1);
      if (std::hypot(c - cx, r - cy) < radius) v = disc;
      img.at(r, c) = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return img;
}

DegradedImage degrade_image(const GrayImage& clean, std::uint64_t seed, double noise_sigma, double missing_fraction) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DegradedImage out{clean, GrayImage(clean.width, clean.height)};
  for (size_t p = 0; p < clean.pixels.size(); ++p) {
    const double v = clean.pixels[p] + (noise_sigma > 0.0 ? noise(rng) : 0.0);
    out.noisy.pixels[p] = static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, static_cast<long>(clean.maxval)));
    const bool missing = u(rng) < missing_fraction;
    out.mask.pixels[p] = missing ? 0 : 255;
    if (missing) out.noisy.pixels[p] = 0;
  }
  return out;
}

GrayImage labels_to_image(const Solution& x, GridShape shape, int label_count) {
  if (static_cast<int>(x.size()) != shape.size()) throw InvalidInput("solution does not match grid");
  GrayImage img(shape.cols, shape.rows, std::max(255, label_count - 1));
  for (size_t p = 0; p < x.size(); ++p) img.pixels[p] = static_cast<std::uint16_t>(x[p]);
  return img;
}

Solution image_to_labels(const GrayImage& image, int label_count) {
  Solution x(image.pixels.size());
  for (size_t p = 0; p < x.size(); ++p) {
    if (image.pixels[p] >= label_count) throw InvalidInput("label image value exceeds label count");
    x[p] = image.pixels[p];
  }
  return x;
}

}  // namespace mrfc
