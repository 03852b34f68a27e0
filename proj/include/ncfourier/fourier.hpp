#pragma once

// Group Fourier transform pair
//
//   phi^(xi) = int_G phi(x) xi(x)^* dx,    phi(x) = sum_xi d_xi tr(xi(x) phi^(xi)),
//
// Plancherel/Sobolev norms, left-invariant derivatives and seeded random
// band-limited test functions.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/group_backend.hpp"

namespace ncf {

template <CompactGroup G>
struct GridFunction {
  GridPtr<G> grid;
  std::vector<cplx> values;
  std::optional<HalfInt> band_hint;

  G group() const { return grid->group(); }
  std::size_t size() const { return values.size(); }
};

template <class Grid, CompactGroup G = decltype(std::declval<Grid>().group())>
GridFunction<G> make_grid_function(std::shared_ptr<const Grid> grid, std::vector<cplx> values,
                                   std::optional<HalfInt> band_hint = std::nullopt) {
  if (values.size() != grid->size()) throw grid_mismatch_error("value count does not match grid");
  return {std::move(grid), std::move(values), band_hint};
}

// Samples a callable x -> cplx at every node.
template <class Grid, class F, CompactGroup G = decltype(std::declval<Grid>().group())>
GridFunction<G> sample(std::shared_ptr<const Grid> grid, F&& f, std::optional<HalfInt> band_hint = std::nullopt) {
  std::vector<cplx> v(grid->size());
  parallel_for(v.size(), [&](std::size_t i) { v[i] = f(grid->node(i)); });
  return {std::move(grid), std::move(v), band_hint};
}

// Dense per-label matrices, aligned with group.labels(support_limit).
template <CompactGroup G>
struct FourierCoefficients {
  G group;
  HalfInt support_limit;
  std::vector<Matrix> entries;

  static FourierCoefficients zeros(const G& group, HalfInt support) {
    FourierCoefficients c{group, support, {}};
    const auto labels = group.labels(support);
    c.entries.reserve(labels.size());
    for (const auto& l : labels) {
      const int d = group.dim(l);
      c.entries.push_back(Matrix::Zero(d, d));
    }
    return c;
  }

  Matrix& at(const typename G::Label& l) { return entries[group.label_index(l, support_limit)]; }
  const Matrix& at(const typename G::Label& l) const { return entries[group.label_index(l, support_limit)]; }
  std::vector<typename G::Label> labels() const { return group.labels(support_limit); }
};

// Forward transform onto labels up to out_band (at most the grid band).
template <CompactGroup G>
FourierCoefficients<G> forward(const GridFunction<G>& f, HalfInt out_band) {
  const auto& grid = *f.grid;
  if (f.values.size() != grid.size()) throw grid_mismatch_error("grid function does not match its grid");
  if (f.band_hint && *f.band_hint > grid.band())
    throw band_limit_error("function band " + f.band_hint->str() + " exceeds grid band " + grid.band().str());
  const G g = grid.group();
  return {g, out_band, g.analysis(grid, f.values, out_band)};
}

template <CompactGroup G>
FourierCoefficients<G> forward(const GridFunction<G>& f) {
  return forward(f, f.grid->band());
}

template <CompactGroup G>
GridFunction<G> inverse(const FourierCoefficients<G>& c, GridPtr<G> grid) {
  if (!(c.group == grid->group())) throw grid_mismatch_error("coefficients and grid belong to different groups");
  if (c.support_limit > grid->band())
    throw band_limit_error("support " + c.support_limit.str() + " exceeds grid band " + grid->band().str());
  auto values = c.group.synthesis(*grid, c.entries, c.support_limit);
  return {std::move(grid), std::move(values), c.support_limit};
}

// Pointwise synthesis at an arbitrary element.
template <CompactGroup G>
cplx evaluate(const FourierCoefficients<G>& c, const typename G::Element& x) {
  const auto labels = c.labels();
  cplx s{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (c.entries[i].squaredNorm() == 0.0) continue;
    s += static_cast<double>(c.group.dim(labels[i])) * (c.group.irrep_matrix(labels[i], x) * c.entries[i]).trace();
  }
  return s;
}

// sqrt(sum_xi d_xi ||c(xi)||_HS^2 w(xi)^2) with w = <xi>^s.
template <CompactGroup G>
double sobolev_norm(const FourierCoefficients<G>& c, double s) {
  const auto labels = c.labels();
  CompensatedSum acc;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = s == 0.0 ? 1.0 : std::pow(c.group.casimir_weight(labels[i]), s);
    acc.add(c.group.dim(labels[i]) * c.entries[i].squaredNorm() * w * w);
  }
  return std::sqrt(acc.value());
}

template <CompactGroup G>
double plancherel_norm(const FourierCoefficients<G>& c) {
  return sobolev_norm(c, 0.0);
}

// (sum_x w |f(x)|^2)^{1/2}
template <CompactGroup G>
double quadrature_l2_norm(const GridFunction<G>& f) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc.add(f.grid->weight(i) * std::norm(f.values[i]));
  return std::sqrt(acc.value());
}

// Coefficients of x -> f(y x): c(xi) xi(y).
template <CompactGroup G>
FourierCoefficients<G> left_translate(const FourierCoefficients<G>& c, const typename G::Element& y) {
  auto out = c;
  const auto labels = c.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) out.entries[i] = c.entries[i] * c.group.irrep_matrix(labels[i], y);
  return out;
}

// Left-invariant derivative (d/dt) f(x exp(t X_axis)) at t = 0, computed
// spectrally: coefficients are multiplied by dxi(X_axis).
template <CompactGroup G>
GridFunction<G> left_derivative(const GridFunction<G>& f, int axis) {
  const G g = f.group();
  g.require_axis(axis);
  const HalfInt band = f.band_hint.value_or(f.grid->band());
  auto c = forward(f, band);
  const auto labels = c.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) c.entries[i] = g.lie_algebra_matrix(labels[i], axis) * c.entries[i];
  auto out = inverse(c, f.grid);
  out.band_hint = f.band_hint;
  return out;
}

// Seeded i.i.d. standard complex normal coefficients (E|z|^2 = 1) up to band.
template <CompactGroup G>
FourierCoefficients<G> random_coefficients(const G& group, HalfInt band, std::uint64_t seed) {
  auto c = FourierCoefficients<G>::zeros(group, band);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (auto& m : c.entries)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        m(i, j) = cplx(re, im);
      }
  return c;
}

// splitmix64: derives independent per-trial seeds from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace ncf
