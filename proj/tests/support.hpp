#pragma once

// Random samples shared by the unit tests.

#include "funkslice/geometry.hpp"

#include <cmath>
#include <random>

namespace fstest {

using funkslice::Matrix;
using funkslice::StiefelFrame;
using funkslice::Vector;

struct Sampler {
  std::mt19937_64 rng;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> uniform{0.0, 1.0};

  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double unit() { return uniform(rng); }
  double between(double lo, double hi) { return lo + (hi - lo) * uniform(rng); }

  Vector gaussian(int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v[i] = normal(rng);
    return v;
  }
  Vector on_sphere(int dim) { return gaussian(dim).normalized(); }
  // uniform in the ball of radius r
  Vector in_ball(int dim, double r = 1.0) {
    return on_sphere(dim) * (r * std::pow(unit(), 1.0 / dim));
  }
  Matrix gaussian_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int j = 0; j < cols; ++j) m.col(j) = gaussian(rows);
    return m;
  }
  StiefelFrame frame(int dim, int size) { return StiefelFrame::orthonormalize(gaussian_matrix(dim, size)); }
  // frame with every column orthogonal to a
  StiefelFrame frame_perp(const Vector& a, int size) {
    Matrix m = gaussian_matrix(static_cast<int>(a.size()), size);
    const Vector u = a.normalized();
    for (int j = 0; j < size; ++j) m.col(j) -= u * u.dot(m.col(j));
    return StiefelFrame::orthonormalize(m);
  }
};

inline double max_abs(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace fstest
