#pragma once

// Concrete left-invariant operators. On SU(2) the basis D_1, D_2, D_3 acts on
// t^l as i J_1, i J_2, i J_3, so D_3, the Laplacian, the sub-Laplacian
// D_1^2 + D_2^2 and the heat operator D_3 - D_1^2 - D_2^2 are diagonal in the
// standard basis. On T^n, D_j = d/dx_j and the Laplacian is normalized to
// -|k|^2 on e_k.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/fourier.hpp"
#include "ncfourier/symbols.hpp"

namespace ncf {

enum class OperatorKind { vector_field, laplacian, sub_laplacian, heat, x_plus_c };

struct NamedOperator {
  OperatorKind kind = OperatorKind::laplacian;
  int axis = 3;  // vector_field, x_plus_c
  cplx c{};      // x_plus_c

  static NamedOperator vector_field(int axis) { return {OperatorKind::vector_field, axis, {}}; }
  static NamedOperator laplacian() { return {OperatorKind::laplacian, 0, {}}; }
  static NamedOperator sub_laplacian() { return {OperatorKind::sub_laplacian, 0, {}}; }
  static NamedOperator heat() { return {OperatorKind::heat, 0, {}}; }
  static NamedOperator x_plus_c(int axis, cplx c) { return {OperatorKind::x_plus_c, axis, c}; }
};

inline std::string to_string(const NamedOperator& op) {
  switch (op.kind) {
    case OperatorKind::vector_field: return "D" + std::to_string(op.axis);
    case OperatorKind::laplacian: return "laplacian";
    case OperatorKind::sub_laplacian: return "sublaplacian";
    case OperatorKind::heat: return "heat";
    case OperatorKind::x_plus_c: {
      return "D" + std::to_string(op.axis) + "+(" + std::to_string(op.c.real()) + "," + std::to_string(op.c.imag()) + ")";
    }
  }
  return "?";
}

namespace detail {

template <CompactGroup G>
void require_supported(const G& group, const NamedOperator& op) {
  const bool su2 = std::is_same_v<G, SU2>;
  if ((op.kind == OperatorKind::sub_laplacian || op.kind == OperatorKind::heat) && !su2)
    throw error(to_string(op) + " is only defined on SU(2), not on " + group.name());
  if (op.kind == OperatorKind::vector_field || op.kind == OperatorKind::x_plus_c) group.require_axis(op.axis);
}

}  // namespace detail

// Symbol of a named operator for all labels up to cutoff.
template <CompactGroup G>
InvariantSymbol<G> named_symbol(const G& group, const NamedOperator& op, HalfInt cutoff) {
  detail::require_supported(group, op);
  auto s = zero_symbol(group, cutoff);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& xi = labels[i];
    const int d = group.dim(xi);
    switch (op.kind) {
      case OperatorKind::vector_field: s.entries[i] = group.lie_algebra_matrix(xi, op.axis); break;
      case OperatorKind::x_plus_c:
        s.entries[i] = group.lie_algebra_matrix(xi, op.axis) + op.c * Matrix::Identity(d, d);
        break;
      case OperatorKind::laplacian:
        s.entries[i] = -group.laplacian_eigenvalue(xi) * Matrix::Identity(d, d);
        break;
      case OperatorKind::sub_laplacian:
      case OperatorKind::heat:
        if constexpr (std::is_same_v<G, SU2>) {
          const double l = xi.value();
          for (int a = 0; a < d; ++a) {
            const double m = -l + a;
            const double sub = m * m - l * (l + 1);
            s.entries[i](a, a) = op.kind == OperatorKind::sub_laplacian ? cplx(sub) : cplx(-sub, m);
          }
        }
        break;
    }
  }
  s.declared_order = op.kind == OperatorKind::vector_field || op.kind == OperatorKind::x_plus_c ? 1.0 : 2.0;
  return s;
}

// The same operator realized on grid functions through left-invariant
// derivatives, independently of named_symbol.
template <CompactGroup G>
std::function<GridFunction<G>(const GridFunction<G>&)> grid_realization(const G& group, const NamedOperator& op) {
  detail::require_supported(group, op);
  auto second = [](const GridFunction<G>& f, int axis) { return left_derivative(left_derivative(f, axis), axis); };
  auto add = [](GridFunction<G> a, const GridFunction<G>& b, double sb) {
    for (std::size_t n = 0; n < a.values.size(); ++n) a.values[n] += sb * b.values[n];
    return a;
  };
  const int n = group.dimension();
  switch (op.kind) {
    case OperatorKind::vector_field: return [op](const GridFunction<G>& f) { return left_derivative(f, op.axis); };
    case OperatorKind::x_plus_c:
      return [op](const GridFunction<G>& f) {
        auto g = left_derivative(f, op.axis);
        for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] += op.c * f.values[k];
        return g;
      };
    case OperatorKind::laplacian:
      return [=](const GridFunction<G>& f) {
        auto g = second(f, 1);
        for (int a = 2; a <= n; ++a) g = add(g, second(f, a), 1.0);
        // T^n: d/dx_j carries 2 pi per unit of k; rescale to -|k|^2.
        if constexpr (std::is_same_v<G, Torus>)
          for (auto& v : g.values) v /= 4 * pi * pi;
        return g;
      };
    case OperatorKind::sub_laplacian:
      return [=](const GridFunction<G>& f) { return add(second(f, 1), second(f, 2), 1.0); };
    case OperatorKind::heat:
      return [=](const GridFunction<G>& f) {
        return add(add(left_derivative(f, 3), second(f, 1), -1.0), second(f, 2), -1.0);
      };
  }
  throw error("unknown operator");
}

// ---- X + c on SU(2) ----------------------------------------------------------

// Lattice offset + step * Z on the imaginary axis plus its members with
// |Im c| <= window.
struct ExceptionalSet {
  double offset = 0.0;
  double step = 0.5;
  double window = 0.0;
  std::vector<cplx> members;  // ascending imaginary part

  bool contains(cplx c, double tol = 1e-9) const {
    if (std::abs(c.real()) > tol) return false;
    const double t = (c.imag() - offset) / step;
    return std::abs(t - std::round(t)) * step <= tol;
  }
  double distance(cplx c) const {
    const double t = (c.imag() - offset) / step;
    const double dy = std::abs(t - std::round(t)) * step;
    return std::hypot(c.real(), dy);
  }
};

// Spectrum of -sigma_X over all spins whose eigenvalues reach |Im| <= window:
// the c for which X + c fails to be invertible.
inline ExceptionalSet exceptional_set(const SU2& group, int axis, double window) {
  group.require_axis(axis);
  if (!(window >= 0.0)) throw error("window must be >= 0");
  ExceptionalSet e;
  e.window = window;
  const HalfInt cutoff = HalfInt::from_twice(static_cast<int>(std::ceil(2 * window)));
  std::vector<double> im;
  for (const auto& l : group.labels(cutoff)) {
    const Matrix x = group.lie_algebra_matrix(l, axis);  // i J, eigenvalues i m
    std::vector<double> ev;
    if (axis == 3) {
      for (Eigen::Index a = 0; a < x.rows(); ++a) ev.push_back(-x(a, a).imag());
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es((x / cplx(0.0, 1.0)).eval(), Eigen::EigenvaluesOnly);
      for (Eigen::Index a = 0; a < es.eigenvalues().size(); ++a) ev.push_back(-es.eigenvalues()(a));
    }
    for (double v : ev) {
      const double snapped = std::round(2 * v) / 2;  // eigenvalues of J lie in Z/2
      if (std::abs(v - snapped) > 1e-9) throw error("unexpected eigenvalue of the spin matrix");
      if (std::abs(snapped) <= window) im.push_back(snapped == 0.0 ? 0.0 : snapped);
    }
  }
  std::sort(im.begin(), im.end());
  im.erase(std::unique(im.begin(), im.end()), im.end());
  for (double v : im) e.members.emplace_back(0.0, v);
  return e;
}

// Inverse symbol of X + c on SU(2), X = D_axis; throws when c is within tol
// of the exceptional set, naming the singular (l, m).
inline InvariantSymbol<SU2> invert_x_plus_c(int axis, cplx c, HalfInt cutoff, double tol = 1e-9) {
  const SU2 group;
  const auto s = named_symbol(group, NamedOperator::x_plus_c(axis, c), cutoff);
  auto out = zero_symbol(group, cutoff);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double l = labels[i].value();
    // i J has eigenvalues i m, m = -l..l, for every axis.
    for (int a = 0; a < group.dim(labels[i]); ++a) {
      const double m = -l + a;
      if (std::abs(cplx(0.0, m) + c) <= tol)
        throw singularity_error("X + c is singular at (l, m) = (" + labels[i].str() + ", " +
                                HalfInt::from_twice(static_cast<int>(std::lround(2 * m))).str() + ")");
    }
    if (axis == 3) {
      for (int a = 0; a < group.dim(labels[i]); ++a) out.entries[i](a, a) = 1.0 / s.entries[i](a, a);
    } else {
      out.entries[i] = s.entries[i].inverse();
    }
  }
  out.declared_order = 0.0;
  return out;
}

// Exact inverse of the sub-Laplacian or heat symbol off its kernel (l = 0).
inline InvariantSymbol<SU2> parametrix_symbol(const NamedOperator& op, HalfInt cutoff) {
  if (op.kind != OperatorKind::sub_laplacian && op.kind != OperatorKind::heat)
    throw error("parametrix is provided for the sub-Laplacian and the heat operator only");
  const auto s = named_symbol(SU2{}, op, cutoff);
  auto out = zero_symbol(SU2{}, cutoff);
  for (std::size_t i = 0; i < s.entries.size(); ++i)
    for (Eigen::Index a = 0; a < s.entries[i].rows(); ++a) {
      const cplx v = s.entries[i](a, a);
      out.entries[i](a, a) = v == cplx{} ? cplx{} : 1.0 / v;
    }
  out.declared_order = -1.0;
  return out;
}

// diag(i m / <l>): a Riesz-type transform along D_3.
inline InvariantSymbol<SU2> riesz_symbol(HalfInt cutoff) {
  const SU2 g;
  return spectral_multiplier(g, cutoff, [&](HalfInt l, int a) {
    return cplx(0.0, (-l.value() + a) / g.casimir_weight(l));
  });
}

}  // namespace ncf
