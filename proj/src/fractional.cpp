#include "funkslice/fractional.hpp"

#include "funkslice/errors.hpp"
#include "funkslice/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace funkslice {

namespace {

std::array<double, 4> lagrange4(double p) {
  return {-(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0, p * (p - 2.0) * (p - 3.0) / 2.0,
          -p * (p - 1.0) * (p - 3.0) / 2.0, p * (p - 1.0) * (p - 2.0) / 6.0};
}

void check_layout(const std::vector<double>& breaks, int nodes) {
  if (breaks.size() < 2) {
    throw DomainError("RadialProfile: need at least one segment");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) {
      throw DomainError("RadialProfile: breaks must be strictly increasing");
    }
  }
  if (breaks.front() < 0.0) {
    throw DomainError("RadialProfile: profile lives on t >= 0");
  }
  if (nodes < 4) {
    throw DomainError("RadialProfile: cubic interpolation needs 4 nodes per segment");
  }
}

double int_power(double x, int p) {
  double base = p < 0 ? 1.0 / x : x;
  double out = 1.0;
  for (int e = p < 0 ? -p : p; e > 0; e >>= 1) {
    if (e & 1) out *= base;
    base *= base;
  }
  return out;
}

const Rule1D& reference_rule(int n) {
  thread_local std::vector<Rule1D> cache;
  if (cache.size() <= static_cast<std::size_t>(n)) {
    cache.resize(static_cast<std::size_t>(n) + 1);
  }
  Rule1D& r = cache[static_cast<std::size_t>(n)];
  if (r.nodes.empty()) {
    r = gauss_legendre(n);
  }
  return r;
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> breaks, int nodes_per_segment,
                             const std::function<double(double)>& f)
    : breaks_(std::move(breaks)), nodes_(nodes_per_segment) {
  check_layout(breaks_, nodes_);
  const int segments = static_cast<int>(breaks_.size()) - 1;
  values_.resize(static_cast<std::size_t>(segments * nodes_));
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < nodes_; ++j) {
      values_[static_cast<std::size_t>(i * nodes_ + j)] = f(node(i, j));
    }
  }
}

RadialProfile::RadialProfile(std::vector<double> breaks, int nodes_per_segment,
                             std::vector<double> values)
    : breaks_(std::move(breaks)), nodes_(nodes_per_segment), values_(std::move(values)) {
  check_layout(breaks_, nodes_);
  if (values_.size() != (breaks_.size() - 1) * static_cast<std::size_t>(nodes_)) {
    throw DomainError("RadialProfile: value count does not match the layout");
  }
}

double RadialProfile::node(int segment, int j) const {
  const double lo = breaks_[static_cast<std::size_t>(segment)];
  const double hi = breaks_[static_cast<std::size_t>(segment) + 1];
  if (j == 0) return lo;
  if (j == nodes_ - 1) return hi;
  return lo + 0.5 * (hi - lo) * (1.0 - std::cos(std::numbers::pi * j / (nodes_ - 1)));
}

std::vector<double> RadialProfile::grid() const {
  std::vector<double> out;
  const int segments = static_cast<int>(breaks_.size()) - 1;
  for (int i = 0; i < segments; ++i) {
    for (int j = (i == 0 ? 0 : 1); j < nodes_; ++j) {
      out.push_back(node(i, j));
    }
  }
  return out;
}

double RadialProfile::operator()(double t) const {
  if (t >= breaks_.back()) {
    return 0.0;
  }
  t = std::max(t, breaks_.front());
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const int seg = static_cast<int>(std::distance(breaks_.begin(), it)) - 1;
  const double lo = breaks_[static_cast<std::size_t>(seg)];
  const double hi = breaks_[static_cast<std::size_t>(seg) + 1];
  const double c = std::clamp(1.0 - 2.0 * (t - lo) / (hi - lo), -1.0, 1.0);
  const double x = std::acos(c) / std::numbers::pi * (nodes_ - 1);
  const int i0 = std::clamp(static_cast<int>(std::floor(x)) - 1, 0, nodes_ - 4);
  const auto w = lagrange4(x - i0);
  const double* v = values_.data() + static_cast<std::ptrdiff_t>(seg * nodes_ + i0);
  return w[0] * v[0] + w[1] * v[1] + w[2] * v[2] + w[3] * v[3];
}

std::vector<double> centred_stencil(int derivative, int points) {
  if (points < 1 || points % 2 == 0 || derivative < 0 || derivative >= points) {
    throw DomainError("centred_stencil: need an odd number of points exceeding the order");
  }
  const int p = points / 2;
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    x[static_cast<std::size_t>(i)] = i - p;
  }
  // c[j][k]: weight of node j for the k-th derivative
  std::vector<std::vector<double>> c(static_cast<std::size_t>(points),
                                     std::vector<double>(static_cast<std::size_t>(derivative) + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0];
  c[0][0] = 1.0;
  for (int i = 1; i < points; ++i) {
    const int mn = std::min(i, derivative);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    w[static_cast<std::size_t>(i)] = c[i][derivative];
  }
  return w;
}

double ek_integral_at(double alpha, const RadialProfile& f, double t, int power,
                      int quadrature_nodes) {
  if (!(alpha > 0.0)) {
    throw DomainError("ek_integral: order must be positive");
  }
  if (t < 0.0 || (power < 0 && !(t > 0.0))) {
    throw DomainError("ek_integral: t must be positive");
  }
  const double tmax = f.t_max();
  if (t >= tmax) {
    return 0.0;
  }
  const double t2 = t * t;
  const bool half = alpha == 0.5;
  const double inv_alpha = 1.0 / alpha;
  auto w_of = [&](double s) {
    const double d = (s - t) * (s + t);
    return half ? std::sqrt(d) : std::pow(d, alpha);
  };
  auto s_of = [&](double w) { return std::sqrt(t2 + (half ? w * w : std::pow(w, inv_alpha))); };

  std::vector<double> cuts{0.0, w_of(tmax)};
  const int segments = static_cast<int>(f.breaks().size()) - 1;
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < f.nodes_per_segment(); ++j) {
      const double k = f.node(i, j);
      if (k > t && k < tmax) {
        cuts.push_back(w_of(k));
      }
    }
  }
  if (t > 0.0) {
    // ladder on the scale where s - t ~ t
    const double base = std::pow(t2, alpha);
    for (double b = base / 16.0; b < cuts[1]; b *= 2.0) {
      cuts.push_back(b);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const Rule1D& ref = reference_rule(quadrature_nodes);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    const double h = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double part = 0.0;
    for (std::size_t q = 0; q < ref.nodes.size(); ++q) {
      const double s = s_of(mid + h * ref.nodes[q]);
      double v = f(s);
      if (power != 0) {
        v *= int_power(s, power);
      }
      part += ref.weights[q] * v;
    }
    sum += h * part;
  }
  return sum / std::tgamma(alpha + 1.0);
}

RadialProfile ek_integral(double alpha, const RadialProfile& f, int quadrature_nodes) {
  return RadialProfile(f.breaks(), f.nodes_per_segment(),
                       [&](double t) { return ek_integral_at(alpha, f, t, 0, quadrature_nodes); });
}

double minus_d_power_at(const FractionalOpSpec& spec, int q, const std::function<double(double)>& h,
                        double t) {
  if (!(t > 0.0)) {
    throw DomainError("fractional derivative: t must be positive");
  }
  const int p = spec.stencil_points / 2;
  if (!(spec.relative_step > 0.0) || spec.relative_step * p >= 1.0) {
    throw DomainError("fractional derivative: stencil would cross sigma = 0");
  }
  if (q == 0) {
    return h(t);
  }
  const std::vector<double> w = centred_stencil(q, spec.stencil_points);
  const double sigma = t * t;
  const double step = spec.relative_step * sigma;
  double sum = 0.0;
  for (int j = -p; j <= p; ++j) {
    const double wj = w[static_cast<std::size_t>(j + p)];
    if (wj != 0.0) {
      sum += wj * h(std::sqrt(sigma + j * step));
    }
  }
  const double sign = (q % 2 == 0) ? 1.0 : -1.0;
  return sign * sum / int_power(step, q);
}

double ek_derivative_at(const FractionalOpSpec& spec, const RadialProfile& f, double t) {
  if (spec.d < 1) {
    throw DomainError("fractional derivative: d must be positive");
  }
  if (spec.even()) {
    return minus_d_power_at(spec, spec.d / 2, [&](double s) { return f(s); }, t);
  }
  const int m = spec.m();
  const double alpha = spec.ek_order();
  auto h = [&](double s) {
    return int_power(s, spec.d) * ek_integral_at(alpha, f, s, -2 * m - 2, spec.quadrature_nodes);
  };
  return int_power(t, 2 - spec.d + 2 * m) * minus_d_power_at(spec, m + 1, h, t);
}

double ek_derivative_even_at(const FractionalOpSpec& spec, const std::function<double(double)>& f,
                             double t) {
  if (!spec.even()) {
    throw DomainError("ek_derivative_even_at: d must be even");
  }
  return minus_d_power_at(spec, spec.d / 2, f, t);
}

RadialProfile ek_derivative(const FractionalOpSpec& spec, const RadialProfile& f) {
  const int segments = static_cast<int>(f.breaks().size()) - 1;
  const int nodes = f.nodes_per_segment();
  std::vector<double> values(static_cast<std::size_t>(segments * nodes));
  for (int i = 0; i < segments; ++i) {
    for (int j = 0; j < nodes; ++j) {
      const double t = f.node(i, j);
      values[static_cast<std::size_t>(i * nodes + j)] = t > 0.0 ? ek_derivative_at(spec, f, t) : 0.0;
    }
  }
  // t = 0 is outside the operator's domain; continue the next sample
  if (f.node(0, 0) == 0.0) {
    values[0] = values[1];
  }
  return RadialProfile(f.breaks(), nodes, std::move(values));
}

}  // namespace funkslice
