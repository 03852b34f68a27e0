#pragma once

// Empirical L^p and W^{p,r} experiments on quadrature grids: norms,
// randomized lower bounds for truncated L^p operator norms, and a-priori
// inequality ratios for the sub-Laplacian (r = 1 - |1/p - 1/2|) and for
// X + c (r = kappa |1/p - 1/2|). At p = 2 the suprema are computed exactly
// on the Fourier side.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/fourier.hpp"
#include "ncfourier/multiplier_check.hpp"
#include "ncfourier/operators_zoo.hpp"
#include "ncfourier/symbols.hpp"

namespace ncf {

inline constexpr double p_infinity = std::numeric_limits<double>::infinity();

template <CompactGroup G>
double lp_norm(const GridFunction<G>& f, double p) {
  if (!(p >= 1.0)) throw error("p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  CompensatedSum acc;
  double scale = 0.0;
  for (const auto& v : f.values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) acc.add(f.grid->weight(i) * std::pow(std::abs(f.values[i]) / scale, p));
  return scale * std::pow(acc.value(), 1.0 / p);
}

// (1 + lambda^2)^{r/2}, lambda^2 the Laplacian eigenvalue.
template <CompactGroup G>
InvariantSymbol<G> bessel_symbol(const G& group, HalfInt cutoff, double r) {
  return spectral_multiplier(group, cutoff,
                             [&](const typename G::Label& l) { return std::pow(1.0 + group.laplacian_eigenvalue(l), r / 2); });
}

template <CompactGroup G>
double wpr_norm(const GridFunction<G>& f, double p, double r) {
  if (r == 0.0) return lp_norm(f, p);
  const HalfInt band = f.band_hint.value_or(f.grid->band());
  return lp_norm(op_apply(bessel_symbol(f.group(), band, r), f), p);
}

struct ProbeResult {
  std::string kind;
  std::string group;
  double p = 2.0;
  double r = 0.0;
  std::vector<HalfInt> band_limits;
  std::vector<double> statistic;               // reported statistic per band limit
  std::vector<double> sampled;                 // max over random trials
  std::vector<std::optional<double>> exact;    // Fourier-side supremum where available
  std::optional<double> trend;                 // slope of log statistic vs log band limit
  int trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::optional<double> fit_trend(const std::vector<HalfInt>& bands, const std::vector<double>& stat) {
  if (bands.size() < 3) return std::nullopt;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!(stat[i] > 0.0) || bands[i].value() <= 0.0) return std::nullopt;
    x.push_back(std::log(bands[i].value()));
    y.push_back(std::log(stat[i]));
  }
  return fit_line(x, y).slope;
}

// Evaluation grid. p = 2 is exact at the band limit; otherwise twice the
// band limit, so |f|^p is integrated accurately (exactly for p = 4).
template <CompactGroup G>
GridPtr<G> probe_grid(const G& group, HalfInt band, double p) {
  if (p == 2.0) return cached_haar_grid(group, band);
  return cached_haar_grid(group, band.twice() == 0 ? HalfInt(1) : band * 2);
}

// Seeded random band-limited function; all-zero draws are redrawn.
template <CompactGroup G>
FourierCoefficients<G> draw(const G& group, HalfInt band, std::uint64_t seed, bool drop_trivial) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    auto c = random_coefficients(group, band, derive_seed(seed, attempt));
    if (drop_trivial) c.entries[0].setZero();
    if (plancherel_norm(c) > 0.0) return c;
  }
}

}  // namespace detail

template <CompactGroup G>
ProbeResult opnorm_lower_bound(const InvariantSymbol<G>& s, double p, const std::vector<HalfInt>& band_limits,
                               int trials, std::uint64_t seed) {
  if (trials < 1) throw error("trials must be >= 1");
  ProbeResult res;
  res.kind = "opnorm";
  res.group = s.group.name();
  res.p = p;
  res.band_limits = band_limits;
  res.trials = trials;
  res.seed = seed;
  for (std::size_t b = 0; b < band_limits.size(); ++b) {
    const HalfInt band = band_limits[b];
    if (band > s.cutoff) throw budget_error("symbol cutoff " + s.cutoff.str() + " below band limit " + band.str());
    const auto grid = detail::probe_grid(s.group, band, p);
    const auto sym = restrict_symbol(s, band);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto c = detail::draw(s.group, band, derive_seed(derive_seed(seed, b), static_cast<std::uint64_t>(t)), false);
      auto ac = c;
      for (std::size_t i = 0; i < ac.entries.size(); ++i) ac.entries[i] = sym.entries[i] * c.entries[i];
      const double num = lp_norm(inverse(ac, grid), p), den = lp_norm(inverse(c, grid), p);
      if (den > 0.0) best = std::max(best, num / den);
    }
    res.sampled.push_back(best);
    res.statistic.push_back(best);
    if (p == 2.0)
      res.exact.push_back(symbol_sup_norm(sym));
    else
      res.exact.push_back(std::nullopt);
  }
  res.trend = detail::fit_trend(res.band_limits, res.statistic);
  return res;
}

struct AprioriKind {
  enum class Type { sub_elliptic, x_plus_c } type = Type::sub_elliptic;
  NamedOperator op = NamedOperator::sub_laplacian();  // sub_elliptic: sub_laplacian or heat
  int axis = 3;
  cplx c{1.0, 0.0};

  static AprioriKind sub_elliptic(NamedOperator op = NamedOperator::sub_laplacian()) {
    return {Type::sub_elliptic, op, 3, {}};
  }
  static AprioriKind x_plus_c(int axis, cplx c) {
    return {Type::x_plus_c, NamedOperator::x_plus_c(axis, c), axis, c};
  }
  std::string name() const { return type == Type::sub_elliptic ? "subelliptic" : "xplusc"; }
};

inline double apriori_r(const AprioriKind& kind, double p) {
  const double dev = std::abs(1.0 / p - 0.5);
  if (kind.type == AprioriKind::Type::sub_elliptic) return 1.0 - dev;
  return kappa(SU2::dimension()).kappa * dev;
}

// LHS / RHS of the a-priori inequality for one band-limited function u:
//   sub-elliptic:  ||u||_{W^{p,r}} / ||L_s u||_{L^p}
//   X + c:         ||u||_{L^p} / ||(X + c) u||_{W^{p,r}}
inline double apriori_ratio_of(const AprioriKind& kind, double p, const GridFunction<SU2>& u) {
  const SU2 g;
  const HalfInt band = u.band_hint.value_or(u.grid->band());
  const double r = apriori_r(kind, p);
  const auto a = named_symbol(g, kind.op, band);
  const auto au = op_apply(a, u);
  if (kind.type == AprioriKind::Type::sub_elliptic) return wpr_norm(u, p, r) / lp_norm(au, p);
  return lp_norm(u, p) / wpr_norm(au, p, r);
}

// Fourier-side supremum of the p = 2 ratio over labels up to band.
inline double apriori_exact_p2(const AprioriKind& kind, HalfInt band) {
  const SU2 g;
  const double r = apriori_r(kind, 2.0);
  const auto a = named_symbol(g, kind.op, band);
  double best = 0.0;
  for (const auto& l : g.labels(band)) {
    const double w = std::pow(1.0 + g.laplacian_eigenvalue(l), r / 2);
    const Matrix& m = a.at(l);
    if (kind.type == AprioriKind::Type::sub_elliptic) {
      if (l.twice() == 0) continue;  // test functions are orthogonal to constants
      Eigen::JacobiSVD<Matrix> svd(m);
      const double smin = svd.singularValues().minCoeff();
      if (smin == 0.0) throw singularity_error("operator symbol is singular at l = " + l.str());
      best = std::max(best, w / smin);
    } else {
      Eigen::JacobiSVD<Matrix> svd(m);
      const double smin = svd.singularValues().minCoeff();
      if (smin == 0.0) throw singularity_error("X + c is singular at l = " + l.str());
      best = std::max(best, 1.0 / (w * smin));
    }
  }
  return best;
}

inline ProbeResult apriori_ratio(const AprioriKind& kind, double p, const std::vector<HalfInt>& band_limits,
                                 int trials, std::uint64_t seed) {
  if (!(p > 1.0) || std::isinf(p)) throw error("p must satisfy 1 < p < infinity");
  if (trials < 1) throw error("trials must be >= 1");
  if (kind.type == AprioriKind::Type::x_plus_c) {
    const auto e = exceptional_set(SU2{}, kind.axis, std::abs(kind.c.imag()) + 1.0);
    if (e.contains(kind.c))
      throw singularity_error("c = (" + std::to_string(kind.c.real()) + "," + std::to_string(kind.c.imag()) +
                              ") lies in the exceptional set");
  }
  const SU2 g;
  ProbeResult res;
  res.kind = kind.name();
  res.group = g.name();
  res.p = p;
  res.r = apriori_r(kind, p);
  res.band_limits = band_limits;
  res.trials = trials;
  res.seed = seed;
  const bool drop_trivial = kind.type == AprioriKind::Type::sub_elliptic;
  for (std::size_t b = 0; b < band_limits.size(); ++b) {
    const HalfInt band = band_limits[b];
    const auto grid = detail::probe_grid(g, band, p);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
      const auto c = detail::draw(g, band, derive_seed(derive_seed(seed, b), static_cast<std::uint64_t>(t)), drop_trivial);
      auto u = inverse(c, grid);
      u.band_hint = band;
      best = std::max(best, apriori_ratio_of(kind, p, u));
    }
    res.sampled.push_back(best);
    if (p == 2.0) {
      const double ex = apriori_exact_p2(kind, band);
      res.exact.push_back(ex);
      res.statistic.push_back(ex);
    } else {
      res.exact.push_back(std::nullopt);
      res.statistic.push_back(best);
    }
  }
  res.trend = detail::fit_trend(res.band_limits, res.statistic);
  return res;
}

}  // namespace ncf
