#include "cocain/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocain {

Eigen::VectorXd ImageGrid::flatten() const {
  return Eigen::Map<const Eigen::VectorXd>(pixels.data(), pixels.size());
}

ImageGrid ImageGrid::from_flat(const Eigen::VectorXd& x, int rows, int cols) {
  if (x.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw std::invalid_argument("image: flat size does not match rows*cols");
  }
  ImageGrid out;
  out.pixels = Eigen::Map<const Grid>(x.data(), rows, cols);
  return out;
}

std::pair<Grid, Grid> finite_difference(const Grid& x) {
  const Eigen::Index m = x.rows();
  const Eigen::Index n = x.cols();
  if (m < 2 || n < 2) throw std::invalid_argument("finite_difference: need M, N >= 2");
  Grid first = Grid::Zero(m, n);
  Grid second = Grid::Zero(m, n);
  first.topRows(m - 1) = x.bottomRows(m - 1) - x.topRows(m - 1);
  second.leftCols(n - 1) = x.rightCols(n - 1) - x.leftCols(n - 1);
  return {std::move(first), std::move(second)};
}

Grid finite_difference_adjoint(const Grid& p, const Grid& q) {
  const Eigen::Index m = p.rows();
  const Eigen::Index n = p.cols();
  if (q.rows() != m || q.cols() != n) {
    throw std::invalid_argument("finite_difference_adjoint: shape mismatch");
  }
  Grid out = Grid::Zero(m, n);
  out.topRows(m - 1) -= p.topRows(m - 1);
  out.bottomRows(m - 1) += p.topRows(m - 1);
  out.leftCols(n - 1) -= q.leftCols(n - 1);
  out.rightCols(n - 1) += q.leftCols(n - 1);
  return out;
}

ImageGrid add_outlier_noise(const ImageGrid& image, double magnitude, double fraction,
                            std::uint64_t seed, double background_std) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("add_outlier_noise: fraction must lie in (0, 1]");
  }
  const auto total = static_cast<std::size_t>(image.pixels.size());
  const auto count = std::min<std::size_t>(
      total, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(total) - 1e-9)));

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `count` entries become the corrupted set.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, total - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  ImageGrid out = image;
  double* data = out.pixels.data();
  std::vector<bool> corrupted(total, false);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < count; ++i) {
    corrupted[order[i]] = true;
    data[order[i]] += coin(rng) ? magnitude : -magnitude;
  }
  if (background_std > 0.0) {
    std::normal_distribution<double> noise(0.0, background_std);
    for (std::size_t i = 0; i < total; ++i) {
      if (!corrupted[i]) data[i] += noise(rng);
    }
  }
  return out;
}

ImageGrid make_synthetic_image(int rows, int cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("synthetic image: need M, N >= 2");
  ImageGrid img;
  img.pixels = Grid::Constant(rows, cols, 0.2);
  const double cy = 0.65 * rows;
  const double cx = 0.6 * cols;
  const double radius = 0.2 * std::min(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (i >= rows / 8 && i < rows / 2 && j >= cols / 8 && j < cols / 2) {
        img.pixels(i, j) = 0.9;
      }
      const double di = i + 0.5 - cy;
      const double dj = j + 0.5 - cx;
      if (di * di + dj * dj <= radius * radius) img.pixels(i, j) = 0.55;
    }
  }
  return img;
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string discard;
      std::getline(in, discard);
      if (!tok.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

int parse_positive(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v <= 0) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("pgm: bad ") + what + " '" + tok + "'");
  }
}

}  // namespace

ImageGrid read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path.string());
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") {
    throw std::runtime_error("pgm: unsupported magic '" + magic + "' in " + path.string());
  }
  const int cols = parse_positive(next_token(in), "width");
  const int rows = parse_positive(next_token(in), "height");
  const int maxval = parse_positive(next_token(in), "maxval");
  if (maxval > 65535) throw std::runtime_error("pgm: maxval above 65535");
  if (rows < 2 || cols < 2) throw std::runtime_error("pgm: image must be at least 2x2");

  ImageGrid img;
  img.pixels.resize(rows, cols);
  const double scale = 1.0 / maxval;
  if (magic == "P2") {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const std::string tok = next_token(in);
        if (tok.empty()) throw std::runtime_error("pgm: truncated pixel data");
        int v = 0;
        try {
          v = std::stoi(tok);
        } catch (const std::exception&) {
          throw std::runtime_error("pgm: bad pixel '" + tok + "'");
        }
        if (v < 0 || v > maxval) throw std::runtime_error("pgm: pixel out of range");
        img.pixels(i, j) = v * scale;
      }
    }
    return img;
  }
  // next_token consumed exactly one whitespace byte after maxval.
  const int bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(static_cast<std::size_t>(rows) * cols * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw std::runtime_error("pgm: truncated pixel data");
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const std::size_t k = (static_cast<std::size_t>(i) * cols + j) * bytes;
      const int v = bytes == 1 ? raw[k] : (raw[k] << 8) | raw[k + 1];
      if (v > maxval) throw std::runtime_error("pgm: pixel out of range");
      img.pixels(i, j) = v * scale;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image, int maxval,
               bool plain) {
  if (maxval != 255 && maxval != 65535) {
    throw std::invalid_argument("pgm: maxval must be 255 or 65535");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot write " + path.string());
  out << (plain ? "P2" : "P5") << '\n'
      << image.cols() << ' ' << image.rows() << '\n'
      << maxval << '\n';
  for (int i = 0; i < image.rows(); ++i) {
    for (int j = 0; j < image.cols(); ++j) {
      const double clamped = std::clamp(image.pixels(i, j), 0.0, 1.0);
      const int v = static_cast<int>(std::lround(clamped * maxval));
      if (plain) {
        out << v << (j + 1 == image.cols() ? '\n' : ' ');
      } else if (maxval == 255) {
        out.put(static_cast<char>(v));
      } else {
        out.put(static_cast<char>(v >> 8));
        out.put(static_cast<char>(v & 0xff));
      }
    }
  }
  if (!out) throw std::runtime_error("pgm: write failed for " + path.string());
}

}  // namespace cocain
