#pragma once

// The backend contract shared by SU(2) and T^n, and the free functions the
// other modules use: quadrature grids, irrep matrices, Casimir weights, the
// difference family Delta_0 and rho^2.

#include <concepts>
#include <deque>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/su2.hpp"
#include "ncfourier/torus.hpp"

namespace ncf {

template <class G>
concept CompactGroup = requires(const G g, const typename G::Label& l, const typename G::Element& x,
                                HalfInt b, const typename G::Grid& grid, std::span<const cplx> vals,
                                std::span<const Matrix> coeffs) {
  { g.name() } -> std::convertible_to<std::string>;
  { g.dimension() } -> std::convertible_to<int>;
  { g.dim(l) } -> std::convertible_to<int>;
  { g.label_band(l) } -> std::same_as<HalfInt>;
  { g.labels(b) } -> std::same_as<std::vector<typename G::Label>>;
  { g.label_index(l, b) } -> std::convertible_to<std::size_t>;
  { g.casimir_weight(l) } -> std::convertible_to<double>;
  { g.laplacian_eigenvalue(l) } -> std::convertible_to<double>;
  { g.irrep_matrix(l, x) } -> std::same_as<Matrix>;
  { g.lie_algebra_matrix(l, 1) } -> std::same_as<Matrix>;
  { g.multiply(x, x) } -> std::same_as<typename G::Element>;
  { g.identity() } -> std::same_as<typename G::Element>;
  { g.delta0_labels() } -> std::same_as<std::vector<typename G::Label>>;
  { g.analysis(grid, vals, b) } -> std::same_as<std::vector<Matrix>>;
  { g.synthesis(grid, coeffs, b) } -> std::same_as<std::vector<cplx>>;
  { grid.size() } -> std::convertible_to<std::size_t>;
  { grid.weight(std::size_t{}) } -> std::convertible_to<double>;
  { grid.band() } -> std::same_as<HalfInt>;
};

template <CompactGroup G>
using GridPtr = std::shared_ptr<const typename G::Grid>;

inline constexpr std::size_t default_max_grid_nodes = 40'000'000;

template <CompactGroup G>
GridPtr<G> haar_grid(const G& group, HalfInt band, std::size_t max_nodes = default_max_grid_nodes) {
  return group.make_grid(band, max_nodes);
}

// Grids are immutable and expensive to build (Wigner tables); recently used
// ones are shared.
template <CompactGroup G>
GridPtr<G> cached_haar_grid(const G& group, HalfInt band) {
  struct Entry {
    G group;
    HalfInt band;
    GridPtr<G> grid;
  };
  static std::mutex mu;
  static std::deque<Entry> cache;
  {
    std::lock_guard lock(mu);
    for (const auto& e : cache)
      if (e.group == group && e.band == band) return e.grid;
  }
  auto grid = haar_grid(group, band);
  std::lock_guard lock(mu);
  cache.push_back({group, band, grid});
  if (cache.size() > 6) cache.pop_front();
  return grid;
}

template <CompactGroup G>
Matrix irrep_matrix(const G& group, const typename G::Label& xi, const typename G::Element& x) {
  return group.irrep_matrix(xi, x);
}

template <CompactGroup G>
double casimir_weight(const G& group, const typename G::Label& xi) {
  return group.casimir_weight(xi);
}

// One first-order difference _{xi0}D_{ij}; indices are 0-based.
template <CompactGroup G>
struct DifferenceFactor {
  typename G::Label xi0;
  int i = 0;
  int j = 0;
  bool operator==(const DifferenceFactor&) const = default;
};

template <CompactGroup G>
struct Delta0 {
  std::vector<typename G::Label> labels;
  std::vector<DifferenceFactor<G>> component_index;
  HalfInt max_label_band;  // largest band of a Delta_0 label: the per-difference margin
};

template <CompactGroup G>
Delta0<G> delta0_set(const G& group) {
  Delta0<G> out;
  out.labels = group.delta0_labels();
  for (const auto& xi : out.labels) {
    out.max_label_band = std::max(out.max_label_band, group.label_band(xi));
    const int d = group.dim(xi);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.component_index.push_back({xi, i, j});
  }
  return out;
}

template <CompactGroup G>
bool in_delta0(const G& group, const DifferenceFactor<G>& f) {
  for (const auto& e : delta0_set(group).component_index)
    if (e == f) return true;
  return false;
}

// rho^2(x) = sum_{xi in Delta_0} (d_xi - tr xi(x)).
template <CompactGroup G>
double rho_squared(const G& group, const typename G::Element& x) {
  cplx s{};
  for (const auto& xi : group.delta0_labels()) s += static_cast<double>(group.dim(xi)) - group.irrep_matrix(xi, x).trace();
  return s.real();
}

}  // namespace ncf
