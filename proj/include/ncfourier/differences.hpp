#pragma once

// Difference operators on symbols: Q sigma = F(q F^{-1} sigma) for q vanishing
// at the identity, the first-order family from Delta_0, their compositions,
// and the second-order difference associated with rho^2.
//
// Everything goes through the spatial route (synthesis, pointwise product,
// analysis) on a grid fine enough for the product to be integrated exactly.

#include <algorithm>
#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/fourier.hpp"
#include "ncfourier/symbols.hpp"

namespace ncf {

// Factors in composition order: factors.back() is applied first.
template <CompactGroup G>
struct DifferenceSpec {
  std::vector<DifferenceFactor<G>> factors;
  int order() const { return static_cast<int>(factors.size()); }
};

// Label bookkeeping for `order` differences of band `margin` each. A symbol
// known exactly up to input_cutoff gives exact differences up to
// input_cutoff - order * margin; if it is supported in input_cutoff, the
// result is supported in (and exact up to) output_cutoff.
struct TruncationBudget {
  HalfInt input_cutoff;
  HalfInt output_cutoff;
  HalfInt margin;
  int order = 0;

  HalfInt trusted_cutoff() const { return input_cutoff - margin * order; }
};

template <CompactGroup G>
TruncationBudget truncation_budget(const G& group, HalfInt input_cutoff, int order) {
  const HalfInt margin = delta0_set(group).max_label_band;
  return {input_cutoff, input_cutoff + margin * order, margin, order};
}

namespace detail {

template <CompactGroup G>
HalfInt valid_band(const G&, HalfInt b) {
  if constexpr (std::is_same_v<G, Torus>) return HalfInt((b.twice() + 1) / 2);
  return b;
}

// Smallest grid band integrating (band a) x (band b) x (band c) products.
template <CompactGroup G>
HalfInt product_grid_band(const G& group, HalfInt a, HalfInt q, HalfInt out) {
  const int sum2 = a.twice() + q.twice() + out.twice();
  HalfInt b = HalfInt::from_twice((sum2 + 1) / 2);
  b = std::max({b, a, q, out});
  return valid_band(group, b);
}

template <CompactGroup G>
typename G::Label trivial_label(const G& group) {
  return group.labels(HalfInt(0)).front();
}

}  // namespace detail

// Coefficients of q(x) = xi0(x)_{ij} - delta_ij.
template <CompactGroup G>
FourierCoefficients<G> difference_function(const G& group, const DifferenceFactor<G>& f) {
  const int d = group.dim(f.xi0);
  if (f.i < 0 || f.j < 0 || f.i >= d || f.j >= d)
    throw invalid_label_error("matrix index (" + std::to_string(f.i + 1) + "," + std::to_string(f.j + 1) +
                              ") out of range for label " + group.format_label(f.xi0));
  auto c = FourierCoefficients<G>::zeros(group, group.label_band(f.xi0));
  c.at(f.xi0)(f.j, f.i) += 1.0 / d;
  if (f.i == f.j) c.at(detail::trivial_label(group))(0, 0) -= 1.0;
  return c;
}

// Coefficients of rho^2(x) = sum_{xi in Delta_0} (d_xi - tr xi(x)).
template <CompactGroup G>
FourierCoefficients<G> rho_squared_function(const G& group) {
  const auto d0 = delta0_set(group);
  auto c = FourierCoefficients<G>::zeros(group, d0.max_label_band);
  for (const auto& xi : d0.labels) {
    const int d = group.dim(xi);
    c.at(detail::trivial_label(group))(0, 0) += static_cast<double>(d);
    c.at(xi) -= Matrix::Identity(d, d) / static_cast<double>(d);
  }
  return c;
}

struct DifferenceOptions {
  // Labels computed in the result; defaults to the input cutoff, or to the
  // full support of the result when finite_support is set.
  std::optional<HalfInt> output_cutoff;
  // The input is exactly zero beyond its cutoff, so no label is lost.
  bool finite_support = false;
  // Vanishing order claimed for q; >= 1 requires q(1) = 0.
  int claimed_order = 1;
};

inline constexpr double order_tolerance = 1e-12;

template <CompactGroup G>
InvariantSymbol<G> difference_apply(const FourierCoefficients<G>& q, const InvariantSymbol<G>& s,
                                    const DifferenceOptions& opt = {}) {
  const G group = s.group;
  if (!(q.group == group)) throw grid_mismatch_error("difference function and symbol belong to different groups");
  if (opt.claimed_order >= 1) {
    const cplx q1 = evaluate(q, group.identity());
    double scale = 1.0;
    for (const auto& m : q.entries)
      if (m.size() > 0) scale = std::max(scale, m.cwiseAbs().maxCoeff());
    if (std::abs(q1) > order_tolerance * scale)
      throw order_violation_error("q(1) = " + std::to_string(std::abs(q1)) + " but order " +
                                  std::to_string(opt.claimed_order) + " was claimed");
  }
  const HalfInt qband = q.support_limit;
  const HalfInt out = opt.output_cutoff.value_or(opt.finite_support ? s.cutoff + qband : s.cutoff);
  HalfInt trusted = out;
  if (!opt.finite_support) {
    if ((s.trusted_cutoff - qband).twice() < 0)
      throw budget_error("difference of band " + qband.str() + " exhausts the trusted range " +
                         s.trusted_cutoff.str());
    trusted = std::min(out, s.trusted_cutoff - qband);
  }
  const auto grid = cached_haar_grid(group, detail::product_grid_band(group, s.cutoff, qband, out));
  const auto qv = group.synthesis(*grid, q.entries, qband);
  auto fv = group.synthesis(*grid, s.entries, s.cutoff);
  for (std::size_t n = 0; n < fv.size(); ++n) fv[n] *= qv[n];
  return {group, out, trusted, group.analysis(*grid, fv, out), std::nullopt};
}

template <CompactGroup G>
InvariantSymbol<G> difference_apply(const GridFunction<G>& q, const InvariantSymbol<G>& s,
                                    const DifferenceOptions& opt = {}) {
  return difference_apply(forward(q, q.band_hint.value_or(q.grid->band())), s, opt);
}

template <CompactGroup G>
InvariantSymbol<G> first_difference(const DifferenceFactor<G>& f, const InvariantSymbol<G>& s,
                                    DifferenceOptions opt = {}) {
  if (!in_delta0(s.group, f))
    throw invalid_label_error("difference (" + s.group.format_label(f.xi0) + "; " + std::to_string(f.i + 1) + "," +
                              std::to_string(f.j + 1) + ") is not in the Delta_0 family");
  opt.claimed_order = 1;
  return difference_apply(difference_function(s.group, f), s, opt);
}

template <CompactGroup G>
InvariantSymbol<G> laplace_difference(const InvariantSymbol<G>& s, DifferenceOptions opt = {}) {
  opt.claimed_order = 2;
  return difference_apply(rho_squared_function(s.group), s, opt);
}

// D^alpha sigma, rightmost factor first.
template <CompactGroup G>
InvariantSymbol<G> multi_difference(const DifferenceSpec<G>& spec, const InvariantSymbol<G>& s,
                                    const DifferenceOptions& opt = {}) {
  InvariantSymbol<G> out = s;
  for (auto it = spec.factors.rbegin(); it != spec.factors.rend(); ++it) {
    out = first_difference(*it, out, opt);
  }
  return out;
}

// ---- torus closed forms -------------------------------------------------

namespace detail {

inline void require_torus_dim(const InvariantSymbol<Torus>& s, int n) {
  if (n > 0 && s.group.dimension() != n)
    throw invalid_label_error("expected a symbol on T^" + std::to_string(n) + ", got " + s.group.name());
}

// sigma(k + shift), zero outside the stored range.
inline cplx shifted(const InvariantSymbol<Torus>& s, const Torus::Label& k, const Torus::Label& shift) {
  Torus::Label m = k;
  for (std::size_t a = 0; a < m.size(); ++a) m[a] += shift[a];
  if (s.group.label_band(m) > s.cutoff) return {};
  return s.at(m)(0, 0);
}

template <class F>
InvariantSymbol<Torus> torus_map(const InvariantSymbol<Torus>& s, int margin, F&& f) {
  auto out = zero_symbol(s.group, s.cutoff);
  out.trusted_cutoff = s.trusted_cutoff - HalfInt(margin);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) out.entries[i](0, 0) = f(labels[i]);
  return out;
}

}  // namespace detail

// Difference for the character e: q = e^{2 pi i e.x} - 1, giving
// sigma(k - e) - sigma(k).
inline InvariantSymbol<Torus> torus_character_difference(const InvariantSymbol<Torus>& s, const Torus::Label& e) {
  s.group.require_valid(e);
  Torus::Label minus = e;
  for (auto& v : minus) v = -v;
  const int margin = s.group.label_band(e).floor();
  return detail::torus_map(s, margin, [&](const Torus::Label& k) { return detail::shifted(s, k, minus) - s.at(k)(0, 0); });
}

// 2n sigma(k) - sum_j (sigma(k + e_j) + sigma(k - e_j))
inline InvariantSymbol<Torus> torus_laplace_closed_form(const InvariantSymbol<Torus>& s) {
  const int n = s.group.dimension();
  return detail::torus_map(s, 1, [&](const Torus::Label& k) {
    cplx acc = 2.0 * n * s.at(k)(0, 0);
    for (int j = 0; j < n; ++j) {
      Torus::Label e(static_cast<std::size_t>(n), 0);
      e[j] = 1;
      acc -= detail::shifted(s, k, e);
      e[j] = -1;
      acc -= detail::shifted(s, k, e);
    }
    return acc;
  });
}

// sigma(k) - (1/6) sum_j (sigma(k + e_j) + sigma(k - e_j)) on T^3.
inline InvariantSymbol<Torus> t3_second_difference(const InvariantSymbol<Torus>& s) {
  detail::require_torus_dim(s, 3);
  return detail::torus_map(s, 1, [&](const Torus::Label& k) {
    cplx nb{};
    for (int j = 0; j < 3; ++j) {
      Torus::Label e(3, 0);
      e[j] = 1;
      nb += detail::shifted(s, k, e);
      e[j] = -1;
      nb += detail::shifted(s, k, e);
    }
    return s.at(k)(0, 0) - nb / 6.0;
  });
}

// ---- batched evaluation for the checker ----------------------------------

// Nondecreasing index sequences of length 0..max_order over `count`
// components (multi-indices as multisets), by length then lexicographically.
inline std::vector<std::vector<int>> enumerate_multi_indices(int count, int max_order) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> layer{{}};
  for (int ord = 1; ord <= max_order; ++ord) {
    std::vector<std::vector<int>> next;
    for (const auto& a : layer)
      for (int c = a.empty() ? 0 : a.back(); c < count; ++c) {
        auto b = a;
        b.push_back(c);
        next.push_back(std::move(b));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

// Evaluates many D^alpha (rho^2)^p sigma for one symbol: sigma is synthesized
// once and each request costs one pointwise product and one analysis. The
// result equals sequential application because the multiplication functions
// commute.
template <CompactGroup G>
class DifferenceEngine {
 public:
  DifferenceEngine(const InvariantSymbol<G>& s, HalfInt max_margin, HalfInt out_cutoff)
      : group_(s.group), d0_(delta0_set(s.group)), out_(out_cutoff), max_margin_(max_margin),
        trusted_in_(s.trusted_cutoff) {
    if (out_cutoff > s.cutoff) throw budget_error("output cutoff beyond the symbol cutoff");
    grid_ = cached_haar_grid(group_, detail::product_grid_band(group_, s.cutoff, max_margin, out_cutoff));
    f_ = group_.synthesis(*grid_, s.entries, s.cutoff);
    for (const auto& comp : d0_.component_index) {
      const auto q = difference_function(group_, comp);
      q_.push_back(group_.synthesis(*grid_, q.entries, q.support_limit));
    }
    const auto r = rho_squared_function(group_);
    rho2_ = group_.synthesis(*grid_, r.entries, r.support_limit);
    rho_band_ = r.support_limit;
  }

  const Delta0<G>& delta0() const { return d0_; }
  std::size_t component_count() const { return d0_.component_index.size(); }
  HalfInt margin_of(std::span<const int> alpha, int laplace_power = 0) const {
    HalfInt m = rho_band_ * laplace_power;
    for (int a : alpha) m = m + group_.label_band(d0_.component_index.at(static_cast<std::size_t>(a)).xi0);
    return m;
  }

  // alpha indexes delta0().component_index.
  InvariantSymbol<G> apply(std::span<const int> alpha, int laplace_power = 0) const {
    const HalfInt margin = margin_of(alpha, laplace_power);
    if (margin > max_margin_) throw budget_error("difference order exceeds the engine budget " + max_margin_.str());
    if ((trusted_in_ - margin).twice() < 0) throw budget_error("differences exhaust the trusted label range");
    std::vector<cplx> v = f_;
    for (int a : alpha) {
      const auto& q = q_.at(static_cast<std::size_t>(a));
      for (std::size_t n = 0; n < v.size(); ++n) v[n] *= q[n];
    }
    for (int p = 0; p < laplace_power; ++p)
      for (std::size_t n = 0; n < v.size(); ++n) v[n] *= rho2_[n];
    return {group_, out_, std::min(out_, trusted_in_ - margin), group_.analysis(*grid_, v, out_), std::nullopt};
  }

  DifferenceSpec<G> spec_of(std::span<const int> alpha) const {
    DifferenceSpec<G> s;
    for (int a : alpha) s.factors.push_back(d0_.component_index.at(static_cast<std::size_t>(a)));
    return s;
  }

 private:
  G group_;
  Delta0<G> d0_;
  HalfInt out_, max_margin_, trusted_in_, rho_band_;
  GridPtr<G> grid_;
  std::vector<cplx> f_, rho2_;
  std::vector<std::vector<cplx>> q_;
};

// ---- textual form: "su2:1:(2,3)^2 su2:1/2:(1,1)", indices 1-based ----------

template <CompactGroup G>
std::string format_difference_spec(const G& group, const DifferenceSpec<G>& spec) {
  std::string out;
  for (std::size_t k = 0; k < spec.factors.size();) {
    std::size_t run = 1;
    while (k + run < spec.factors.size() && spec.factors[k + run] == spec.factors[k]) ++run;
    const auto& f = spec.factors[k];
    if (!out.empty()) out += ' ';
    out += group.name() + ":" + group.format_label(f.xi0) + ":(" + std::to_string(f.i + 1) + "," +
           std::to_string(f.j + 1) + ")";
    if (run > 1) out += "^" + std::to_string(run);
    k += run;
  }
  return out;
}

template <CompactGroup G>
DifferenceSpec<G> parse_difference_spec(const G& group, std::string_view text) {
  DifferenceSpec<G> spec;
  std::size_t pos = 0;
  const std::string s(text);
  while (pos < s.size()) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos >= s.size()) break;
    std::size_t end = pos;
    while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
    const std::string tok = s.substr(pos, end - pos);
    pos = end;
    const auto bad = [&](const std::string& why) { return parse_error("difference factor '" + tok + "': " + why); };
    const std::size_t c1 = tok.find(':');
    const std::size_t open = tok.rfind('(');
    if (c1 == std::string::npos || open == std::string::npos || open == 0 || tok[open - 1] != ':')
      throw bad("expected group:label:(i,j)");
    if (tok.substr(0, c1) != group.name()) throw bad("group is not " + group.name());
    const std::string label = tok.substr(c1 + 1, open - 1 - (c1 + 1));
    const std::size_t close = tok.find(')', open);
    if (close == std::string::npos) throw bad("missing ')'");
    const std::string idx = tok.substr(open + 1, close - open - 1);
    const std::size_t comma = idx.find(',');
    if (comma == std::string::npos) throw bad("expected (i,j)");
    int i = 0, j = 0, power = 1;
    try {
      i = std::stoi(idx.substr(0, comma));
      j = std::stoi(idx.substr(comma + 1));
      if (close + 1 < tok.size()) {
        if (tok[close + 1] != '^') throw bad("unexpected trailing text");
        power = std::stoi(tok.substr(close + 2));
      }
    } catch (const parse_error&) {
      throw;
    } catch (const std::exception&) {
      throw bad("bad integer");
    }
    if (power < 0) throw bad("negative power");
    DifferenceFactor<G> f{group.parse_label(label), i - 1, j - 1};
    if (!in_delta0(group, f)) throw bad("not in the Delta_0 family");
    for (int p = 0; p < power; ++p) spec.factors.push_back(f);
  }
  return spec;
}

}  // namespace ncf
