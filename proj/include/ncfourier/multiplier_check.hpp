#pragma once

// Finite-range evaluation of the multiplier hypotheses:
//
//   hm       <xi>^kappa ||Lap*^{kappa/2} sigma(xi)||  and  <xi>^|a| ||D^a sigma(xi)||, |a| <= kappa - 1
//   class    <xi>^{-m + rho|a|} ||D^a sigma(xi)||, |a| <= max_order
//   noninv   <xi>^|a| ||d_x^b D^a sigma(x, xi)||, |a| <= kappa, |b| <= l, l the smallest integer > n/p
//
// Each constant is a supremum over trusted labels up to a cutoff. All
// cutoffs are served by one evaluation at the largest; the two largest are
// compared for the stability verdict.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/differences.hpp"
#include "ncfourier/symbols.hpp"

namespace ncf {

struct KappaParams {
  int n = 0;
  int kappa = 0;
};

// Smallest even integer > n/2.
inline KappaParams kappa(int n) {
  if (n < 1) throw error("group dimension must be >= 1");
  return {n, 2 * (n / 4 + 1)};
}

// Number of x-derivatives for x-dependent symbols: smallest integer > n/p.
inline int x_derivative_order(int n, double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw error("p must satisfy 1 < p < infinity");
  return static_cast<int>(std::floor(n / p)) + 1;
}

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConditionRecord {
  std::string id;        // "alpha", "laplace" or "alpha_beta"
  std::string alpha;     // difference spec text, empty for |alpha| = 0
  std::string beta;      // x-derivative axes, e.g. "1,3"
  int alpha_order = 0;
  int beta_order = 0;
  int laplace_power = 0;
  double weight_exponent = 0.0;
  std::vector<double> constants;         // per cutoff
  std::vector<std::string> argmax;       // label attaining each constant
  std::vector<long long> argmax_node;    // -1 for invariant symbols
  double instability = 0.0;              // |C_last - C_prev| / C_prev
};

// Relative growth between the two largest cutoffs above which the verdict
// is inconclusive.
inline constexpr double inconclusive_threshold = 0.25;
inline constexpr double noise_floor = 1e-8;

struct MultiplierReport {
  std::string check;  // "hm", "class", "noninv"
  std::string group;
  std::vector<HalfInt> cutoffs;  // ascending
  double cap = 0.0;
  bool cap_defaulted = false;
  int kappa = 0;
  std::optional<double> m, rho, p;
  std::optional<int> max_order, l;
  std::vector<ConditionRecord> conditions;
  double instability = 0.0;
  Verdict verdict = Verdict::pass;
  std::string caveat;

  double max_constant() const {
    double c = 0.0;
    for (const auto& r : conditions) c = std::max(c, r.constants.back());
    return c;
  }
};

struct CheckOptions {
  std::vector<HalfInt> cutoffs;  // one value gets cutoff/2 added for stability
  std::optional<double> cap;     // default: 10x the |alpha| = 0 constant over labels of band <= 1
};

namespace detail {

template <CompactGroup G>
std::vector<HalfInt> normalize_cutoffs(const G& group, std::vector<HalfInt> cutoffs) {
  if (cutoffs.empty()) throw error("at least one cutoff is required");
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  for (auto c : cutoffs)
    if (c.twice() < 0 || !(valid_band(group, c) == c)) throw band_limit_error("invalid cutoff " + c.str());
  if (cutoffs.size() == 1) {
    HalfInt half = HalfInt::from_twice(cutoffs[0].twice() / 2);
    if constexpr (std::is_same_v<G, Torus>) half = HalfInt(cutoffs[0].floor() / 2);
    if (half < cutoffs[0]) cutoffs.insert(cutoffs.begin(), half);
  }
  return cutoffs;
}

// Per-label values ordered by label band, for prefix suprema.
struct LabelSeries {
  std::vector<HalfInt> band;
  std::vector<double> value;
  std::vector<std::string> label;
  std::vector<long long> node;
};

// Suprema over labels with band <= each cutoff; ties keep the first label in
// enumeration order, so results do not depend on scheduling.
inline void fill_sups(const LabelSeries& s, const std::vector<HalfInt>& cutoffs, ConditionRecord& rec) {
  rec.constants.assign(cutoffs.size(), 0.0);
  rec.argmax.assign(cutoffs.size(), "");
  rec.argmax_node.assign(cutoffs.size(), -1);
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    double best = -1.0;
    for (std::size_t i = 0; i < s.value.size(); ++i) {
      if (s.band[i] > cutoffs[c]) continue;
      if (s.value[i] > best) {
        best = s.value[i];
        rec.argmax[c] = s.label[i];
        rec.argmax_node[c] = s.node[i];
      }
    }
    rec.constants[c] = std::max(best, 0.0);
  }
}

template <CompactGroup G>
void add_symbol(LabelSeries& s, const InvariantSymbol<G>& sym, double weight_exponent, HalfInt max_cutoff,
                long long node) {
  const auto labels = sym.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const HalfInt b = sym.group.label_band(labels[i]);
    if (b > max_cutoff) continue;
    if (!sym.trusted(labels[i])) throw budget_error("label " + sym.group.format_label(labels[i]) + " is untrusted");
    const double w = weight_exponent == 0.0 ? 1.0 : std::pow(sym.group.casimir_weight(labels[i]), weight_exponent);
    s.band.push_back(b);
    s.value.push_back(w * op_norm(sym.entries[i]));
    s.label.push_back(sym.group.format_label(labels[i]));
    s.node.push_back(node);
  }
}

template <CompactGroup G>
void require_support(const G& group, HalfInt have_cutoff, HalfInt have_trusted, HalfInt need) {
  if (have_cutoff < need || have_trusted < need)
    throw budget_error("insufficient symbol support: " + group.name() + " symbol known up to " + have_trusted.str() +
                       ", the requested cutoffs need " + need.str());
}

inline void finish(MultiplierReport& r, std::optional<double> cap, double low_alpha0) {
  double top = r.max_constant();
  // Constants below this are round-off (e.g. differences of exact constants).
  const double floor = noise_floor * top;
  r.instability = 0.0;
  for (auto& c : r.conditions) {
    if (c.constants.size() < 2) continue;
    const double a = c.constants[c.constants.size() - 1], b = c.constants[c.constants.size() - 2];
    const double den = std::max(b, floor);
    c.instability = den > 0.0 ? std::abs(a - b) / den : 0.0;
    r.instability = std::max(r.instability, c.instability);
  }
  if (cap) {
    r.cap = *cap;
  } else {
    r.cap_defaulted = true;
    double base = low_alpha0;
    if (base == 0.0)
      for (const auto& c : r.conditions)
        if (c.alpha_order == 0 && c.beta_order == 0 && c.laplace_power == 0) base = c.constants.back();
    r.cap = 10.0 * base;
  }
  if (top > r.cap)
    r.verdict = Verdict::fail;
  else if (r.instability > inconclusive_threshold)
    r.verdict = Verdict::inconclusive;
  else
    r.verdict = Verdict::pass;
  r.caveat = "constants are suprema over labels up to cutoff " + r.cutoffs.back().str() +
             " only; a finite range cannot certify the bound for all labels";
}

template <CompactGroup G>
double low_band_sup(const InvariantSymbol<G>& s) {
  double m = 0.0;
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (s.group.label_band(labels[i]) <= HalfInt(1)) m = std::max(m, op_norm(s.entries[i]));
  return m;
}

template <CompactGroup G>
void alpha_conditions(MultiplierReport& r, const InvariantSymbol<G>& sym, const DifferenceEngine<G>& engine,
                      const G& group, int max_order, const std::function<double(int)>& weight) {
  for (const auto& alpha : enumerate_multi_indices(static_cast<int>(engine.component_count()), max_order)) {
    // |alpha| = 0 reads the symbol itself, free of synthesis round-off.
    const auto d = alpha.empty() ? sym : engine.apply(alpha);
    ConditionRecord rec;
    rec.id = "alpha";
    rec.alpha = format_difference_spec(group, engine.spec_of(alpha));
    rec.alpha_order = static_cast<int>(alpha.size());
    rec.weight_exponent = weight(rec.alpha_order);
    LabelSeries s;
    add_symbol(s, d, rec.weight_exponent, r.cutoffs.back(), -1);
    fill_sups(s, r.cutoffs, rec);
    r.conditions.push_back(std::move(rec));
  }
}

}  // namespace detail

template <CompactGroup G>
MultiplierReport check_hm(const InvariantSymbol<G>& s, const CheckOptions& opt) {
  const G group = s.group;
  MultiplierReport r;
  r.check = "hm";
  r.group = group.name();
  r.cutoffs = detail::normalize_cutoffs(group, opt.cutoffs);
  r.kappa = kappa(group.dimension()).kappa;
  const HalfInt unit = delta0_set(group).max_label_band;
  const HalfInt margin = unit * std::max(r.kappa - 1, r.kappa / 2);
  const HalfInt need = r.cutoffs.back() + margin;
  detail::require_support(group, s.cutoff, s.trusted_cutoff, need);
  const auto sym = restrict_symbol(s, need);
  const DifferenceEngine<G> engine(sym, margin, r.cutoffs.back());
  detail::alpha_conditions<G>(r, sym, engine, group, r.kappa - 1, [](int a) { return static_cast<double>(a); });
  const auto lap = engine.apply({}, r.kappa / 2);
  ConditionRecord rec;
  rec.id = "laplace";
  rec.laplace_power = r.kappa / 2;
  rec.weight_exponent = r.kappa;
  detail::LabelSeries series;
  detail::add_symbol(series, lap, rec.weight_exponent, r.cutoffs.back(), -1);
  detail::fill_sups(series, r.cutoffs, rec);
  r.conditions.push_back(std::move(rec));
  detail::finish(r, opt.cap, detail::low_band_sup(sym));
  return r;
}

template <CompactGroup G>
MultiplierReport check_class(const InvariantSymbol<G>& s, double m, double rho, int max_order,
                             const CheckOptions& opt) {
  if (rho < 0.0 || rho > 1.0) throw error("rho must lie in [0, 1]");
  if (max_order < 0) throw error("max_order must be >= 0");
  const G group = s.group;
  MultiplierReport r;
  r.check = "class";
  r.group = group.name();
  r.cutoffs = detail::normalize_cutoffs(group, opt.cutoffs);
  r.kappa = kappa(group.dimension()).kappa;
  r.m = m;
  r.rho = rho;
  r.max_order = max_order;
  const HalfInt margin = delta0_set(group).max_label_band * max_order;
  const HalfInt need = r.cutoffs.back() + margin;
  detail::require_support(group, s.cutoff, s.trusted_cutoff, need);
  const auto sym = restrict_symbol(s, need);
  const DifferenceEngine<G> engine(sym, margin, r.cutoffs.back());
  detail::alpha_conditions<G>(r, sym, engine, group, max_order, [&](int a) { return -m + rho * a; });
  // The cap scale uses the weighted |alpha| = 0 quantity on low labels.
  double low = 0.0;
  const auto labels = sym.labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (group.label_band(labels[i]) <= HalfInt(1))
      low = std::max(low, std::pow(group.casimir_weight(labels[i]), -m) * op_norm(sym.entries[i]));
  detail::finish(r, opt.cap, low);
  return r;
}

// ---- x-dependent symbols ---------------------------------------------------

// Full symbol with every matrix entry, as a function of x, differentiated
// along the left-invariant field X_axis.
template <CompactGroup G>
FullSymbol<G> full_symbol_x_derivative(const FullSymbol<G>& s, int axis, double alias_tol = 1e-9) {
  const G group = s.group();
  group.require_axis(axis);
  const auto labels = s.labels();
  const std::size_t nodes = s.grid->size();
  FullSymbol<G> out = s;
  for (std::size_t li = 0; li < labels.size(); ++li) {
    const int d = group.dim(labels[li]);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        std::vector<cplx> v(nodes);
        double scale = 0.0;
        for (std::size_t n = 0; n < nodes; ++n) {
          v[n] = s.entries[n][li](a, b);
          scale = std::max(scale, std::abs(v[n]));
        }
        const GridFunction<G> f{s.grid, std::move(v), std::nullopt};
        const auto back = inverse(forward(f), s.grid);
        double res = 0.0;
        for (std::size_t n = 0; n < nodes; ++n) res = std::max(res, std::abs(back.values[n] - f.values[n]));
        if (res > alias_tol * std::max(scale, 1.0))
          throw aliasing_error("x-dependence of entry (" + std::to_string(a + 1) + "," + std::to_string(b + 1) +
                               ") at label " + group.format_label(labels[li]) + " is not band-limited on the grid");
        const auto g = left_derivative(f, axis);
        for (std::size_t n = 0; n < nodes; ++n) out.entries[n][li](a, b) = g.values[n];
      }
  }
  return out;
}

// D^alpha applied to every node slice; alpha indexes delta0_set().component_index.
template <CompactGroup G>
FullSymbol<G> full_symbol_difference(const FullSymbol<G>& s, const std::vector<int>& alpha, HalfInt out_cutoff) {
  const G group = s.group();
  const auto d0 = delta0_set(group);
  HalfInt margin;
  for (int a : alpha) margin = margin + group.label_band(d0.component_index.at(static_cast<std::size_t>(a)).xi0);
  FullSymbol<G> out{s.grid, out_cutoff, out_cutoff, std::vector<std::vector<Matrix>>(s.grid->size())};
  for (std::size_t n = 0; n < s.grid->size(); ++n) {
    const DifferenceEngine<G> engine(s.slice(n), margin, out_cutoff);
    auto d = engine.apply(alpha);
    out.trusted_cutoff = d.trusted_cutoff;
    out.entries[n] = std::move(d.entries);
  }
  return out;
}

template <CompactGroup G>
MultiplierReport check_noninvariant(const FullSymbol<G>& s, double p, const CheckOptions& opt) {
  const G group = s.group();
  MultiplierReport r;
  r.check = "noninv";
  r.group = group.name();
  r.p = p;
  r.l = x_derivative_order(group.dimension(), p);
  r.cutoffs = detail::normalize_cutoffs(group, opt.cutoffs);
  r.kappa = kappa(group.dimension()).kappa;
  const auto d0 = delta0_set(group);
  const HalfInt margin = d0.max_label_band * r.kappa;
  const HalfInt need = r.cutoffs.back() + margin;
  detail::require_support(group, s.cutoff, s.trusted_cutoff, need);
  const std::size_t nodes = s.grid->size();

  // Differences first: D^alpha sigma(x, .) per node.
  std::vector<DifferenceEngine<G>> engines;
  engines.reserve(nodes);
  for (std::size_t n = 0; n < nodes; ++n) engines.emplace_back(restrict_symbol(s.slice(n), need), margin, r.cutoffs.back());

  const auto alphas = enumerate_multi_indices(static_cast<int>(d0.component_index.size()), r.kappa);
  const auto betas = enumerate_multi_indices(group.dimension(), *r.l);
  double low = 0.0;
  for (const auto& alpha : alphas) {
    FullSymbol<G> d{s.grid, r.cutoffs.back(), r.cutoffs.back(), std::vector<std::vector<Matrix>>(nodes)};
    for (std::size_t n = 0; n < nodes; ++n) {
      auto sym = alpha.empty() ? restrict_symbol(s.slice(n), r.cutoffs.back()) : engines[n].apply(alpha);
      d.trusted_cutoff = sym.trusted_cutoff;
      d.entries[n] = std::move(sym.entries);
    }
    for (const auto& beta : betas) {
      // then x-derivatives, rightmost axis first
      FullSymbol<G> e = d;
      for (auto it = beta.rbegin(); it != beta.rend(); ++it) e = full_symbol_x_derivative(e, *it + 1);
      ConditionRecord rec;
      rec.id = "alpha_beta";
      DifferenceSpec<G> spec;
      for (int a : alpha) spec.factors.push_back(d0.component_index[static_cast<std::size_t>(a)]);
      rec.alpha = format_difference_spec(group, spec);
      for (std::size_t k = 0; k < beta.size(); ++k) rec.beta += (k ? "," : "") + std::to_string(beta[k] + 1);
      rec.alpha_order = static_cast<int>(alpha.size());
      rec.beta_order = static_cast<int>(beta.size());
      rec.weight_exponent = rec.alpha_order;
      detail::LabelSeries series;
      for (std::size_t n = 0; n < nodes; ++n) {
        InvariantSymbol<G> slice{group, e.cutoff, e.trusted_cutoff, e.entries[n], std::nullopt};
        detail::add_symbol(series, slice, rec.weight_exponent, r.cutoffs.back(), static_cast<long long>(n));
        if (alpha.empty() && beta.empty()) low = std::max(low, detail::low_band_sup(slice));
      }
      detail::fill_sups(series, r.cutoffs, rec);
      r.conditions.push_back(std::move(rec));
    }
  }
  detail::finish(r, opt.cap, low);
  return r;
}

}  // namespace ncf
