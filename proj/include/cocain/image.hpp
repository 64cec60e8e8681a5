#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>

#include <Eigen/Core>

namespace cocain {

using Grid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// M x N grayscale image, M, N >= 2. Flattens row-major into a point of
/// dimension M*N.
struct ImageGrid {
  Grid pixels;

  int rows() const { return static_cast<int>(pixels.rows()); }
  int cols() const { return static_cast<int>(pixels.cols()); }
  Eigen::VectorXd flatten() const;
  static ImageGrid from_flat(const Eigen::VectorXd& x, int rows, int cols);
};

/// Forward differences with zero last row (first) and zero last column (second):
///   first(i,j)  = x(i+1,j) - x(i,j)   for i < M-1
///   second(i,j) = x(i,j+1) - x(i,j)   for j < N-1
std::pair<Grid, Grid> finite_difference(const Grid& x);

/// Adjoint of finite_difference: <D x, (p,q)> = <x, D^T (p,q)>.
Grid finite_difference_adjoint(const Grid& p, const Grid& q);

/// Adds +-magnitude to ceil(fraction*M*N) distinct pixels chosen by seed, and
/// optional Gaussian noise of the given std to the remaining pixels.
ImageGrid add_outlier_noise(const ImageGrid& image, double magnitude, double fraction,
                            std::uint64_t seed, double background_std = 0.0);

/// Piecewise-constant test image in [0,1]: background, a bright square and a
/// mid-grey disc.
ImageGrid make_synthetic_image(int rows, int cols);

/// Portable graymap reader: P2 or P5, 8- or 16-bit; values scaled to [0,1].
ImageGrid read_pgm(const std::filesystem::path& path);

/// Writes binary P5, clamping to [0,1]; maxval 255 or 65535.
void write_pgm(const std::filesystem::path& path, const ImageGrid& image, int maxval = 255,
               bool plain = false);

}  // namespace cocain
