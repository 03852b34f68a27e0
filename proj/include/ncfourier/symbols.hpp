#pragma once

// Matrix-valued symbols and their quantization
//
//   sigma_A(x, xi) = xi(x)^* (A xi)(x),
//   A phi(x) = sum_xi d_xi tr(xi(x) sigma_A(x, xi) phi^(xi)).

#include <limits>
#include <optional>
#include <type_traits>
#include <variant>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/fourier.hpp"

namespace ncf {

// Label-indexed symbol, dense for all labels up to `cutoff`. Entries above
// `trusted_cutoff` carry truncation error (e.g. after a difference) and are
// excluded from suprema.
template <CompactGroup G>
struct InvariantSymbol {
  G group;
  HalfInt cutoff;
  HalfInt trusted_cutoff;
  std::vector<Matrix> entries;
  std::optional<double> declared_order;

  Matrix& at(const typename G::Label& l) { return entries[group.label_index(l, cutoff)]; }
  const Matrix& at(const typename G::Label& l) const { return entries[group.label_index(l, cutoff)]; }
  std::vector<typename G::Label> labels() const { return group.labels(cutoff); }
  bool trusted(const typename G::Label& l) const { return group.label_band(l) <= trusted_cutoff; }
};

template <CompactGroup G>
InvariantSymbol<G> zero_symbol(const G& group, HalfInt cutoff) {
  auto c = FourierCoefficients<G>::zeros(group, cutoff);
  return {group, cutoff, cutoff, std::move(c.entries), std::nullopt};
}

template <CompactGroup G>
InvariantSymbol<G> identity_symbol(const G& group, HalfInt cutoff) {
  auto s = zero_symbol(group, cutoff);
  for (auto& m : s.entries) m.setIdentity();
  s.declared_order = 0.0;
  return s;
}

// Restriction to a smaller cutoff; the trusted range shrinks accordingly.
template <CompactGroup G>
InvariantSymbol<G> restrict_symbol(const InvariantSymbol<G>& s, HalfInt cutoff) {
  if (cutoff > s.cutoff) throw budget_error("cannot restrict a symbol of cutoff " + s.cutoff.str() + " to " + cutoff.str());
  auto out = zero_symbol(s.group, cutoff);
  const auto labels = out.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) out.entries[i] = s.at(labels[i]);
  out.trusted_cutoff = std::min(cutoff, s.trusted_cutoff);
  out.declared_order = s.declared_order;
  return out;
}

// Symbol sampled at every node of a grid: entries[node][label].
template <CompactGroup G>
struct FullSymbol {
  GridPtr<G> grid;
  HalfInt cutoff;
  HalfInt trusted_cutoff;
  std::vector<std::vector<Matrix>> entries;

  G group() const { return grid->group(); }
  std::vector<typename G::Label> labels() const { return group().labels(cutoff); }

  InvariantSymbol<G> slice(std::size_t node) const {
    return {group(), cutoff, trusted_cutoff, entries.at(node), std::nullopt};
  }
};

// Builds a diagonal symbol from g(label, diagonal index) or g(label).
template <CompactGroup G, class F>
InvariantSymbol<G> spectral_multiplier(const G& group, HalfInt cutoff, F&& g) {
  auto s = zero_symbol(group, cutoff);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int d = group.dim(labels[i]);
    for (int a = 0; a < d; ++a) {
      if constexpr (std::is_invocable_v<F, const typename G::Label&, int>)
        s.entries[i](a, a) = cplx(g(labels[i], a));
      else
        s.entries[i](a, a) = cplx(g(labels[i]));
    }
  }
  return s;
}

// sup over trusted labels of ||sigma(xi)||_op: the L^2 operator norm of the
// truncated multiplier.
template <CompactGroup G>
double symbol_sup_norm(const InvariantSymbol<G>& s) {
  const auto labels = s.labels();
  double m = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (s.trusted(labels[i])) m = std::max(m, op_norm(s.entries[i]));
  return m;
}

template <CompactGroup G>
GridFunction<G> op_apply(const InvariantSymbol<G>& s, const GridFunction<G>& phi) {
  const HalfInt band = phi.band_hint.value_or(phi.grid->band());
  if (band > s.cutoff)
    throw budget_error("symbol cutoff " + s.cutoff.str() + " does not cover function band " + band.str());
  auto c = forward(phi, band);
  const auto labels = c.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) c.entries[i] = s.at(labels[i]) * c.entries[i];
  auto out = inverse(c, phi.grid);
  out.band_hint = phi.band_hint;
  return out;
}

template <CompactGroup G>
GridFunction<G> op_apply(const FullSymbol<G>& s, const GridFunction<G>& phi) {
  if (s.grid->size() != phi.grid->size() || !(s.grid->band() == phi.grid->band()))
    throw grid_mismatch_error("full symbol and function live on different grids");
  const HalfInt band = phi.band_hint.value_or(phi.grid->band());
  if (band > s.cutoff)
    throw budget_error("symbol cutoff " + s.cutoff.str() + " does not cover function band " + band.str());
  const G g = phi.group();
  const auto c = forward(phi, band);
  const auto labels = c.labels();
  const auto sym_labels = s.labels();
  std::vector<std::size_t> sym_index(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) sym_index[i] = g.label_index(labels[i], s.cutoff);
  std::vector<cplx> out(phi.size());
  parallel_for(out.size(), [&](std::size_t n) {
    const auto x = phi.grid->node(n);
    cplx acc{};
    for (std::size_t i = 0; i < labels.size(); ++i)
      acc += static_cast<double>(g.dim(labels[i])) *
             (g.irrep_matrix(labels[i], x) * s.entries[n][sym_index[i]] * c.entries[i]).trace();
    out[n] = acc;
  });
  return {phi.grid, std::move(out), phi.band_hint};
}

// Values of every matrix coefficient x -> xi(x)_{ij}, xi up to `band`,
// sampled on `grid`: basis[label][i * d + j].
template <class Grid, CompactGroup G = decltype(std::declval<Grid>().group())>
std::vector<std::vector<GridFunction<G>>> matrix_coefficient_functions(const std::shared_ptr<const Grid>& grid,
                                                                       HalfInt band) {
  const G g = grid->group();
  const auto labels = g.labels(band);
  std::vector<std::vector<GridFunction<G>>> out(labels.size());
  for (std::size_t li = 0; li < labels.size(); ++li) {
    const int d = g.dim(labels[li]);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        auto c = FourierCoefficients<G>::zeros(g, g.label_band(labels[li]));
        c.at(labels[li])(j, i) = 1.0 / d;  // tr(xi(x) E_ji) / d * d = xi_ij
        out[li].push_back(inverse(c, grid));
      }
  }
  return out;
}

struct SymbolOfOptions {
  HalfInt guard = HalfInt(2);
  double invariance_tol = 1e-9;
  double aliasing_tol = 1e-9;
};

// sigma_A(x, xi) = xi(x)^* (A xi)(x) for every label up to `cutoff`, on a grid
// of band cutoff + guard. Images must stay strictly inside the grid band; the
// round-trip residual and the outermost label shell detect violations.
template <CompactGroup G, class Op>
std::variant<InvariantSymbol<G>, FullSymbol<G>> symbol_of(Op&& op, const G& group, HalfInt cutoff,
                                                          SymbolOfOptions opts = {}) {
  const auto grid = haar_grid(group, cutoff + opts.guard);
  const auto labels = group.labels(cutoff);
  const auto basis = matrix_coefficient_functions(grid, cutoff);
  const std::size_t nodes = grid->size();

  std::vector<std::vector<std::vector<cplx>>> image(labels.size());
  for (std::size_t li = 0; li < labels.size(); ++li) {
    for (const auto& f : basis[li]) {
      GridFunction<G> g = op(f);
      if (g.values.size() != nodes) throw grid_mismatch_error("operator changed the grid");
      const auto c = forward(GridFunction<G>{grid, g.values, std::nullopt});
      const auto back = inverse(c, grid);
      double res = 0.0, scale = 0.0;
      for (std::size_t n = 0; n < nodes; ++n) {
        res = std::max(res, std::abs(back.values[n] - g.values[n]));
        scale = std::max(scale, std::abs(g.values[n]));
      }
      double shell = 0.0;
      const auto clabels = c.labels();
      for (std::size_t k = 0; k < clabels.size(); ++k)
        if (group.label_band(clabels[k]) == grid->band()) shell = std::max(shell, c.entries[k].cwiseAbs().maxCoeff());
      if (res > opts.aliasing_tol * std::max(scale, 1.0) || shell > opts.aliasing_tol * std::max(scale, 1.0))
        throw aliasing_error("operator output for label " + group.format_label(labels[li]) +
                             " exceeds the grid band " + grid->band().str());
      image[li].push_back(std::move(g.values));
    }
  }

  FullSymbol<G> full{grid, cutoff, cutoff, std::vector<std::vector<Matrix>>(nodes)};
  parallel_for(nodes, [&](std::size_t n) {
    auto& row = full.entries[n];
    row.reserve(labels.size());
    for (std::size_t li = 0; li < labels.size(); ++li) {
      const int d = group.dim(labels[li]);
      Matrix xi(d, d), axi(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          xi(i, j) = basis[li][static_cast<std::size_t>(i * d + j)].values[n];
          axi(i, j) = image[li][static_cast<std::size_t>(i * d + j)][n];
        }
      row.push_back(xi.adjoint() * axi);
    }
  });

  auto avg = zero_symbol(group, cutoff);
  double scale = 0.0;
  for (std::size_t li = 0; li < labels.size(); ++li) {
    for (std::size_t n = 0; n < nodes; ++n) {
      avg.entries[li] += grid->weight(n) * full.entries[n][li];
      scale = std::max(scale, full.entries[n][li].cwiseAbs().maxCoeff());
    }
  }
  double deviation = 0.0;
  for (std::size_t li = 0; li < labels.size(); ++li)
    for (std::size_t n = 0; n < nodes; ++n)
      deviation = std::max(deviation, (full.entries[n][li] - avg.entries[li]).cwiseAbs().maxCoeff());
  if (deviation <= opts.invariance_tol * std::max(scale, std::numeric_limits<double>::min())) return avg;
  return full;
}

struct ModerateFit {
  double C = 0.0;
  double N = 0.0;
};

// Least-squares fit log||sigma(xi)||_op ~ log C + N log<xi> over trusted
// labels with nonzero symbol; diagnostic only.
template <CompactGroup G>
ModerateFit moderate_fit(const InvariantSymbol<G>& s) {
  std::vector<double> x, y;
  const auto labels = s.labels();
  bool any = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!s.trusted(labels[i])) continue;
    const double nrm = op_norm(s.entries[i]);
    if (nrm == 0.0) continue;
    any = true;
    x.push_back(std::log(s.group.casimir_weight(labels[i])));
    y.push_back(std::log(nrm));
  }
  if (!any) return {0.0, -std::numeric_limits<double>::infinity()};
  std::vector<double> distinct = x;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw error("moderate_fit needs at least 3 distinct Casimir weights");
  const auto f = fit_line(x, y);
  return {std::exp(f.intercept), f.slope};
}

}  // namespace ncf
