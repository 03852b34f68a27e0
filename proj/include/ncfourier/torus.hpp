#pragma once

// Torus backend T^n = R^n / Z^n. Irreps are the characters
// e_k(x) = e^{2 pi i k.x}, k in Z^n; band limits use the sup norm of k and
// the Casimir normalization lambda_k = |k| (the Laplacian divided by 4 pi^2).

#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ncfourier/core.hpp"

namespace ncf {

class Torus {
 public:
  using Label = std::vector<int>;
  using Element = std::vector<double>;

  class Grid;

  explicit Torus(int n = 1) : n_(n) {
    if (n < 1) throw error("torus dimension must be >= 1");
  }

  std::string name() const { return "t" + std::to_string(n_); }
  int dimension() const { return n_; }

  bool valid(const Label& k) const { return static_cast<int>(k.size()) == n_; }
  void require_valid(const Label& k) const {
    if (!valid(k))
      throw invalid_label_error("torus label of length " + std::to_string(k.size()) +
                                " for T^" + std::to_string(n_));
  }
  int dim(const Label&) const { return 1; }
  HalfInt label_band(const Label& k) const {
    int m = 0;
    for (int v : k) m = std::max(m, std::abs(v));
    return HalfInt(m);
  }
  std::string format_label(const Label& k) const {
    std::string s = "(";
    for (std::size_t i = 0; i < k.size(); ++i) s += (i ? "," : "") + std::to_string(k[i]);
    return s + ")";
  }

  // "(a,b,c)" or "a,b,c"
  Label parse_label(std::string_view text) const {
    std::string t(text);
    if (t.size() >= 2 && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    Label k;
    std::size_t pos = 0;
    while (pos <= t.size()) {
      const std::size_t comma = std::min(t.find(',', pos), t.size());
      const std::string part = t.substr(pos, comma - pos);
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(part, &used);
      } catch (const std::exception&) {
        throw parse_error("bad torus label '" + std::string(text) + "'");
      }
      if (used != part.size()) throw parse_error("bad torus label '" + std::string(text) + "'");
      k.push_back(v);
      pos = comma + 1;
    }
    if (!valid(k)) throw invalid_label_error("torus label '" + std::string(text) + "' has wrong length for T^" + std::to_string(n_));
    return k;
  }

  double laplacian_eigenvalue(const Label& k) const {
    double s = 0.0;
    for (int v : k) s += static_cast<double>(v) * v;
    return s;
  }
  double casimir_weight(const Label& k) const {
    return std::max(1.0, std::sqrt(laplacian_eigenvalue(k)));
  }

  int band_int(HalfInt band) const {
    if (band.twice() < 0) throw band_limit_error("band limit must be >= 0");
    if (!band.is_integer()) throw band_limit_error("torus band limit must be an integer, got " + band.str());
    return band.twice() / 2;
  }

  // Lexicographic in [-B,B]^n, first coordinate slowest.
  std::vector<Label> labels(HalfInt band) const {
    const int b = band_int(band);
    const std::size_t count = label_count(band);
    std::vector<Label> out;
    out.reserve(count);
    Label k(static_cast<std::size_t>(n_), -b);
    for (std::size_t c = 0; c < count; ++c) {
      out.push_back(k);
      for (int a = n_ - 1; a >= 0; --a) {
        if (++k[a] <= b) break;
        k[a] = -b;
      }
    }
    return out;
  }
  std::size_t label_count(HalfInt band) const {
    const std::size_t side = static_cast<std::size_t>(2 * band_int(band) + 1);
    std::size_t c = 1;
    for (int a = 0; a < n_; ++a) c *= side;
    return c;
  }
  std::size_t label_index(const Label& k, HalfInt band) const {
    require_valid(k);
    const int b = band_int(band);
    const std::size_t side = static_cast<std::size_t>(2 * b + 1);
    std::size_t idx = 0;
    for (int v : k) {
      if (std::abs(v) > b)
        throw band_limit_error("label " + format_label(k) + " exceeds band " + band.str());
      idx = idx * side + static_cast<std::size_t>(v + b);
    }
    return idx;
  }

  Element identity() const { return Element(static_cast<std::size_t>(n_), 0.0); }

  Matrix irrep_matrix(const Label& k, const Element& x) const {
    require_valid(k);
    double phase = 0.0;
    for (int a = 0; a < n_; ++a) phase += k[a] * x[a];
    Matrix m(1, 1);
    m(0, 0) = std::polar(1.0, 2 * pi * phase);
    return m;
  }

  Element multiply(const Element& x, const Element& y) const {
    Element z(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) {
      z[a] = std::fmod(x[a] + y[a], 1.0);
      if (z[a] < 0) z[a] += 1.0;
    }
    return z;
  }
  Element inverse(const Element& x) const {
    Element z(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a) z[a] = x[a] == 0.0 ? 0.0 : 1.0 - x[a];
    return z;
  }
  Element exp(int axis, double t) const {
    require_axis(axis);
    Element z = identity();
    z[static_cast<std::size_t>(axis - 1)] = t;
    return multiply(identity(), z);
  }

  // Symbol of d/dx_axis: 2 pi i k_axis.
  Matrix lie_algebra_matrix(const Label& k, int axis) const {
    require_valid(k);
    require_axis(axis);
    Matrix m(1, 1);
    m(0, 0) = cplx(0.0, 2 * pi * k[static_cast<std::size_t>(axis - 1)]);
    return m;
  }
  void require_axis(int axis) const {
    if (axis < 1 || axis > n_)
      throw error("axis " + std::to_string(axis) + " out of range 1.." + std::to_string(n_));
  }

  // The 2n characters +-e_j.
  std::vector<Label> delta0_labels() const {
    std::vector<Label> out;
    for (int j = 0; j < n_; ++j) {
      Label plus(static_cast<std::size_t>(n_), 0), minus(static_cast<std::size_t>(n_), 0);
      plus[j] = 1;
      minus[j] = -1;
      out.push_back(plus);
      out.push_back(minus);
    }
    return out;
  }

  std::shared_ptr<const Grid> make_grid(HalfInt band, std::size_t max_nodes) const;
  std::vector<Matrix> analysis(const Grid& grid, std::span<const cplx> values, HalfInt out_band) const;
  std::vector<cplx> synthesis(const Grid& grid, std::span<const Matrix> coeffs, HalfInt band) const;

  bool operator==(const Torus&) const = default;

 private:
  int n_;
};

// (2B+1)^n equispaced nodes x = j/(2B+1), row-major with x_1 slowest.
class Torus::Grid {
 public:
  Grid(Torus group, HalfInt band, std::size_t max_nodes) : group_(group), band_(band) {
    side_ = 2 * group.band_int(band) + 1;
    double nodes = 1.0;
    for (int a = 0; a < group.dimension(); ++a) nodes *= side_;
    if (nodes > static_cast<double>(max_nodes))
      throw band_limit_error(group.name() + " grid for band " + band.str() + " needs " +
                             std::to_string(static_cast<long long>(nodes)) +
                             " nodes, above the budget of " + std::to_string(max_nodes));
    size_ = static_cast<std::size_t>(nodes);
  }

  Torus group() const { return group_; }
  HalfInt band() const { return band_; }
  std::size_t size() const { return size_; }
  int side() const { return side_; }

  std::vector<double> node(std::size_t i) const {
    const int n = group_.dimension();
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int a = n - 1; a >= 0; --a) {
      x[a] = static_cast<double>(i % side_) / side_;
      i /= side_;
    }
    return x;
  }
  double weight(std::size_t) const { return 1.0 / static_cast<double>(size_); }

 private:
  Torus group_;
  HalfInt band_;
  int side_ = 1;
  std::size_t size_ = 1;
};

inline std::shared_ptr<const Torus::Grid> Torus::make_grid(HalfInt band, std::size_t max_nodes) const {
  return std::make_shared<const Grid>(*this, band, max_nodes);
}

namespace detail {

// Applies a dense (out x in) matrix along one axis of a row-major array.
inline std::vector<cplx> transform_axis(const std::vector<cplx>& in, const std::vector<int>& shape, int axis,
                                        const std::vector<cplx>& w, int out_len) {
  const int in_len = shape[static_cast<std::size_t>(axis)];
  std::size_t outer = 1, inner = 1;
  for (int a = 0; a < axis; ++a) outer *= static_cast<std::size_t>(shape[a]);
  for (std::size_t a = static_cast<std::size_t>(axis) + 1; a < shape.size(); ++a) inner *= static_cast<std::size_t>(shape[a]);
  std::vector<cplx> out(outer * out_len * inner, cplx{});
  parallel_for(outer, [&](std::size_t o) {
    for (int x = 0; x < in_len; ++x) {
      const cplx* src = in.data() + (o * in_len + x) * inner;
      for (int m = 0; m < out_len; ++m) {
        const cplx wm = w[static_cast<std::size_t>(m) * in_len + x];
        cplx* dst = out.data() + (o * out_len + m) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += wm * src[i];
      }
    }
  });
  return out;
}

}  // namespace detail

inline std::vector<Matrix> Torus::analysis(const Grid& grid, std::span<const cplx> values,
                                           HalfInt out_band) const {
  if (values.size() != grid.size()) throw grid_mismatch_error("value count does not match grid");
  if (out_band > grid.band())
    throw band_limit_error("requested labels up to " + out_band.str() + " on a grid of band " +
                           grid.band().str());
  const int L = band_int(out_band);
  const int N = grid.side();
  const int M = 2 * L + 1;
  std::vector<cplx> w(static_cast<std::size_t>(M) * N);
  for (int m = 0; m < M; ++m)
    for (int x = 0; x < N; ++x) {
      const long long kx = static_cast<long long>(m - L) * x;
      w[static_cast<std::size_t>(m) * N + x] =
          std::polar(1.0 / N, -2 * pi * static_cast<double>(((kx % N) + N) % N) / N);
    }
  std::vector<cplx> data(values.begin(), values.end());
  std::vector<int> shape(static_cast<std::size_t>(n_), N);
  for (int a = 0; a < n_; ++a) {
    data = detail::transform_axis(data, shape, a, w, M);
    shape[static_cast<std::size_t>(a)] = M;
  }
  std::vector<Matrix> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = Matrix(1, 1);
    out[i](0, 0) = data[i];
  }
  return out;
}

inline std::vector<cplx> Torus::synthesis(const Grid& grid, std::span<const Matrix> coeffs,
                                          HalfInt band) const {
  if (band > grid.band())
    throw band_limit_error("coefficients up to " + band.str() + " exceed grid band " + grid.band().str());
  const int L = band_int(band);
  if (coeffs.size() != label_count(band)) throw grid_mismatch_error("coefficient count does not match band");
  const int N = grid.side();
  const int M = 2 * L + 1;
  std::vector<cplx> w(static_cast<std::size_t>(N) * M);
  for (int x = 0; x < N; ++x)
    for (int m = 0; m < M; ++m) {
      const long long kx = static_cast<long long>(m - L) * x;
      w[static_cast<std::size_t>(x) * M + m] =
          std::polar(1.0, 2 * pi * static_cast<double>(((kx % N) + N) % N) / N);
    }
  std::vector<cplx> data(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) data[i] = coeffs[i](0, 0);
  std::vector<int> shape(static_cast<std::size_t>(n_), M);
  for (int a = 0; a < n_; ++a) {
    data = detail::transform_axis(data, shape, a, w, N);
    shape[static_cast<std::size_t>(a)] = N;
  }
  return data;
}

}  // namespace ncf
