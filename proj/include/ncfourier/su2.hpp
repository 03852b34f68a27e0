#pragma once

// SU(2) backend. Irreps t^l are labelled by the spin l in {0, 1/2, 1, ...};
// group elements are ZYZ Euler angles with alpha in [0,2pi), beta in [0,pi],
// gamma in [0,4pi), so half-integer spins are single valued.
//
//   t^l(alpha,beta,gamma)_{mn} = e^{i m alpha} d^l_{mn}(beta) e^{i n gamma}
//
// with row/column index i <-> m = -l + i and d^l(beta) = exp(-i beta J_2).
// The Lie algebra basis X_k acts as dt^l(X_k) = i J_k, which is orthonormal
// for the metric with Casimir eigenvalue -l(l+1).

#include <array>
#include <cassert>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ncfourier/core.hpp"
#include "ncfourier/quadrature.hpp"

namespace ncf {

struct EulerAngles {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

// d^l_{mu,nu} at the lowest level l = max(|mu|,|nu|); arguments in twice units.
inline double wigner_seed(int l2, int mu2, int nu2, double c, double s) {
  auto top = [&](int n2) {  // d^l_{l,n}
    const int plus = (l2 + n2) / 2, minus = (l2 - n2) / 2;
    return parity_sign(minus) * std::sqrt(binomial(l2, plus)) * std::pow(c, plus) *
           std::pow(s, minus);
  };
  if (std::abs(mu2) >= std::abs(nu2)) {
    if (mu2 == l2) return top(nu2);
    return parity_sign((l2 + nu2) / 2) * top(-nu2);  // d_{-l,n} = (-1)^{l+n} d_{l,-n}
  }
  if (nu2 == l2) return parity_sign((l2 - mu2) / 2) * top(mu2);  // d_{m,l} = (-1)^{l-m} d_{l,m}
  return top(-mu2);                                              // d_{m,-l} = d_{l,-m}
}

}  // namespace detail

// Wigner small-d matrices d^l(beta) for every spin up to max_twice/2, by the
// three-term recurrence in l at fixed (m, n). table[l2] is (l2+1)x(l2+1).
inline std::vector<Eigen::MatrixXd> wigner_d_table(int max_twice, double beta) {
  std::vector<Eigen::MatrixXd> d(static_cast<std::size_t>(max_twice + 1));
  for (int l2 = 0; l2 <= max_twice; ++l2) d[l2] = Eigen::MatrixXd::Zero(l2 + 1, l2 + 1);
  const double c = std::cos(beta / 2), s = std::sin(beta / 2), cb = std::cos(beta);
  for (int mu2 = -max_twice; mu2 <= max_twice; ++mu2) {
    for (int nu2 = -max_twice; nu2 <= max_twice; ++nu2) {
      if (((mu2 - nu2) & 1) != 0) continue;
      const int l0 = std::max(std::abs(mu2), std::abs(nu2));
      const double m = mu2 / 2.0, n = nu2 / 2.0;
      double prev2 = 0.0;
      double prev1 = detail::wigner_seed(l0, mu2, nu2, c, s);
      d[l0]((mu2 + l0) / 2, (nu2 + l0) / 2) = prev1;
      for (int l2 = l0 + 2; l2 <= max_twice; l2 += 2) {
        const double l = l2 / 2.0;
        const double a = l * (2 * l - 1) / std::sqrt((l * l - m * m) * (l * l - n * n));
        const double mn = (mu2 == 0 || nu2 == 0) ? 0.0 : m * n / (l * (l - 1));
        double b = 0.0;
        if (l2 - 4 >= l0)
          b = std::sqrt(((l - 1) * (l - 1) - m * m) * ((l - 1) * (l - 1) - n * n)) /
              ((l - 1) * (2 * l - 1));
        const double cur = a * ((cb - mn) * prev1 - b * prev2);
        d[l2]((mu2 + l2) / 2, (nu2 + l2) / 2) = cur;
        prev2 = prev1;
        prev1 = cur;
      }
    }
  }
  return d;
}

inline Eigen::MatrixXd wigner_d(HalfInt l, double beta) {
  return wigner_d_table(l.twice(), beta)[static_cast<std::size_t>(l.twice())];
}

// Hermitian spin matrices J_1, J_2, J_3 in the basis m = -l..l.
inline std::array<Matrix, 3> spin_matrices(HalfInt l) {
  const int d = l.twice() + 1;
  const double lv = l.value();
  Matrix jp = Matrix::Zero(d, d);
  Matrix j3 = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = -lv + i;
    j3(i, i) = m;
    if (i + 1 < d) jp(i + 1, i) = std::sqrt(lv * (lv + 1) - m * (m + 1));
  }
  const Matrix jm = jp.adjoint();
  const Matrix j1 = 0.5 * (jp + jm);
  const Matrix j2 = (jp - jm) / cplx(0.0, 2.0);
  return {j1, j2, j3};
}

class SU2 {
 public:
  using Label = HalfInt;
  using Element = EulerAngles;

  class Grid;

  std::string name() const { return "su2"; }
  static constexpr int dimension() { return 3; }

  bool valid(const Label& l) const { return l.twice() >= 0; }
  void require_valid(const Label& l) const {
    if (!valid(l)) throw invalid_label_error("invalid SU(2) spin " + l.str());
  }
  int dim(const Label& l) const { return l.twice() + 1; }
  HalfInt label_band(const Label& l) const { return l; }
  std::string format_label(const Label& l) const { return l.str(); }
  Label parse_label(std::string_view text) const {
    const Label l = HalfInt::parse(text);
    require_valid(l);
    return l;
  }

  // lambda^2 with -lambda^2 the Casimir eigenvalue: l(l+1).
  double laplacian_eigenvalue(const Label& l) const { return l.value() * (l.value() + 1.0); }
  double casimir_weight(const Label& l) const {
    return std::max(1.0, std::sqrt(laplacian_eigenvalue(l)));
  }

  void require_band(HalfInt band) const {
    if (band.twice() < 0) throw band_limit_error("band limit must be >= 0");
  }
  std::vector<Label> labels(HalfInt band) const {
    require_band(band);
    std::vector<Label> out;
    for (int t = 0; t <= band.twice(); ++t) out.push_back(HalfInt::from_twice(t));
    return out;
  }
  std::size_t label_count(HalfInt band) const { return static_cast<std::size_t>(band.twice() + 1); }
  std::size_t label_index(const Label& l, HalfInt band) const {
    require_valid(l);
    if (l > band) throw band_limit_error("spin " + l.str() + " exceeds band " + band.str());
    return static_cast<std::size_t>(l.twice());
  }

  Element identity() const { return {}; }

  Matrix irrep_matrix(const Label& l, const Element& x) const {
    require_valid(l);
    const Eigen::MatrixXd d = wigner_d(l, x.beta);
    const int n = dim(l);
    Matrix out(n, n);
    const double lv = l.value();
    for (int i = 0; i < n; ++i) {
      const double mi = -lv + i;
      for (int j = 0; j < n; ++j) {
        const double mj = -lv + j;
        out(i, j) = std::polar(1.0, mi * x.alpha + mj * x.gamma) * d(i, j);
      }
    }
    return out;
  }

  // Defining 2x2 representation t^{1/2}; it is faithful.
  Matrix to_matrix(const Element& x) const { return irrep_matrix(HalfInt::from_twice(1), x); }

  Element from_matrix(const Matrix& u) const {
    // u(1,1) = e^{i(a+g)/2} cos(b/2), u(1,0) = -e^{i(a-g)/2} sin(b/2)
    const double cmag = std::abs(u(1, 1)), smag = std::abs(u(1, 0));
    Element x;
    x.beta = 2.0 * std::atan2(smag, cmag);
    const double half_sum = cmag > 0.0 ? std::arg(u(1, 1)) : 0.0;
    const double half_diff = smag > 0.0 ? std::arg(-u(1, 0)) : 0.0;
    double a = std::fmod(half_sum + half_diff, 4 * pi);
    double g = std::fmod(half_sum - half_diff, 4 * pi);
    if (a < 0) a += 4 * pi;
    if (g < 0) g += 4 * pi;
    if (a >= 2 * pi) {  // (a, g) ~ (a - 2pi, g + 2pi)
      a -= 2 * pi;
      g = std::fmod(g + 2 * pi, 4 * pi);
    }
    x.alpha = a;
    x.gamma = g;
    return x;
  }

  Element multiply(const Element& x, const Element& y) const {
    return from_matrix(to_matrix(x) * to_matrix(y));
  }
  Element inverse(const Element& x) const { return from_matrix(to_matrix(x).adjoint()); }

  // exp(t X_axis), axis in 1..3.
  Element exp(int axis, double t) const {
    require_axis(axis);
    const auto j = spin_matrices(HalfInt::from_twice(1));
    const Matrix u = std::cos(t / 2) * Matrix::Identity(2, 2) +
                     cplx(0.0, std::sin(t / 2)) * (2.0 * j[static_cast<std::size_t>(axis - 1)]);
    return from_matrix(u);
  }

  // dt^l(X_axis) = i J_axis.
  Matrix lie_algebra_matrix(const Label& l, int axis) const {
    require_valid(l);
    require_axis(axis);
    return cplx(0.0, 1.0) * spin_matrices(l)[static_cast<std::size_t>(axis - 1)];
  }

  void require_axis(int axis) const {
    if (axis < 1 || axis > 3) throw error("axis " + std::to_string(axis) + " out of range 1..3");
  }

  // Adjoint irrep l = 1 plus the centre-separating l = 1/2.
  std::vector<Label> delta0_labels() const { return {HalfInt(1), HalfInt::from_twice(1)}; }

  // Grid with exactness for products of coefficients with l + l' <= 2B.
  std::shared_ptr<const Grid> make_grid(HalfInt band, std::size_t max_nodes) const;

  std::vector<Matrix> analysis(const Grid& grid, std::span<const cplx> values, HalfInt out_band) const;
  std::vector<cplx> synthesis(const Grid& grid, std::span<const Matrix> coeffs, HalfInt band) const;

  bool operator==(const SU2&) const = default;
};

// Product grid: alpha equispaced on [0,2pi) (2B+1 points), beta at
// Gauss-Legendre nodes in cos(beta) (floor(B)+1 points), gamma equispaced on
// [0,4pi) (4B+1 points). Node order is [beta][alpha][gamma].
class SU2::Grid {
 public:
  Grid(HalfInt band, std::size_t max_nodes) : band_(band) {
    if (band.twice() < 0) throw band_limit_error("band limit must be >= 0");
    n_alpha_ = band.twice() + 1;
    n_beta_ = band.floor() + 1;
    n_gamma_ = 2 * band.twice() + 1;
    const double nodes = static_cast<double>(n_alpha_) * n_beta_ * n_gamma_;
    if (nodes > static_cast<double>(max_nodes))
      throw band_limit_error("SU(2) grid for band " + band.str() + " needs " +
                             std::to_string(static_cast<long long>(nodes)) +
                             " nodes, above the budget of " + std::to_string(max_nodes));
    const auto gl = gauss_legendre(n_beta_);
    beta_.resize(static_cast<std::size_t>(n_beta_));
    beta_weight_.resize(static_cast<std::size_t>(n_beta_));
    for (int k = 0; k < n_beta_; ++k) {
      beta_[k] = std::acos(gl.nodes[k]);
      beta_weight_[k] = 0.5 * gl.weights[k];
    }
    wigner_.resize(static_cast<std::size_t>(n_beta_));
    parallel_for(static_cast<std::size_t>(n_beta_),
                 [&](std::size_t k) { wigner_[k] = wigner_d_table(band.twice(), beta_[k]); });
  }

  SU2 group() const { return {}; }
  HalfInt band() const { return band_; }
  std::size_t size() const {
    return static_cast<std::size_t>(n_alpha_) * n_beta_ * n_gamma_;
  }
  int n_alpha() const { return n_alpha_; }
  int n_beta() const { return n_beta_; }
  int n_gamma() const { return n_gamma_; }

  EulerAngles node(std::size_t i) const {
    const std::size_t c = i % n_gamma_;
    const std::size_t a = (i / n_gamma_) % n_alpha_;
    const std::size_t k = i / (static_cast<std::size_t>(n_gamma_) * n_alpha_);
    return {2 * pi * a / n_alpha_, beta_[k], 4 * pi * c / n_gamma_};
  }
  double weight(std::size_t i) const {
    const std::size_t k = i / (static_cast<std::size_t>(n_gamma_) * n_alpha_);
    return beta_weight_[k] / (static_cast<double>(n_alpha_) * n_gamma_);
  }

  double beta(int k) const { return beta_[k]; }
  double beta_weight(int k) const { return beta_weight_[k]; }
  const Eigen::MatrixXd& wigner(int k, int l2) const { return wigner_[k][l2]; }

 private:
  HalfInt band_;
  int n_alpha_ = 0, n_beta_ = 0, n_gamma_ = 0;
  std::vector<double> beta_, beta_weight_;
  std::vector<std::vector<Eigen::MatrixXd>> wigner_;  // [beta node][2l]
};

inline std::shared_ptr<const SU2::Grid> SU2::make_grid(HalfInt band, std::size_t max_nodes) const {
  return std::make_shared<const Grid>(band, max_nodes);
}

namespace detail {

// e^{-i pi j / period2} tables indexed modulo the period (twice-frequency units).
inline std::vector<cplx> phase_table(int period, double sign) {
  std::vector<cplx> t(static_cast<std::size_t>(period));
  for (int j = 0; j < period; ++j) t[j] = std::polar(1.0, sign * 2 * pi * j / period);
  return t;
}

inline int mod(long long a, int n) {
  long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace detail

// phi^(l)_{ij} = sum_x w(x) phi(x) conj(t^l(x)_{ji})
//   = sum_k w_k d^l_{m_j m_i}(beta_k) F_k(m_j, m_i),
// F_k(mu, nu) = mean over (alpha, gamma) of phi e^{-i mu alpha} e^{-i nu gamma}.
inline std::vector<Matrix> SU2::analysis(const Grid& grid, std::span<const cplx> values,
                                         HalfInt out_band) const {
  if (values.size() != grid.size()) throw grid_mismatch_error("value count does not match grid");
  if (out_band > grid.band())
    throw band_limit_error("requested spins up to " + out_band.str() + " on a grid of band " +
                           grid.band().str());
  const int L = out_band.twice();
  const int na = grid.n_alpha(), nb = grid.n_beta(), ng = grid.n_gamma();
  const int nf = 2 * L + 1;  // twice-frequencies -L..L
  // alpha = 2 pi a / na, mu = mu2/2: phase e^{-i pi mu2 a / na}, period 2na.
  const auto ta = detail::phase_table(2 * na, -1.0);
  // gamma = 4 pi c / ng, nu = nu2/2: phase e^{-2 pi i nu2 c / ng}, period ng.
  const auto tg = detail::phase_table(ng, -1.0);
  const double norm = 1.0 / (static_cast<double>(na) * ng);

  // F[k][(mu2+L)*nf + (nu2+L)]
  std::vector<std::vector<cplx>> F(static_cast<std::size_t>(nb));
  parallel_for(static_cast<std::size_t>(nb), [&](std::size_t k) {
    std::vector<cplx> H(static_cast<std::size_t>(na) * nf, cplx{});
    const cplx* slice = values.data() + k * static_cast<std::size_t>(na) * ng;
    for (int a = 0; a < na; ++a) {
      const cplx* row = slice + static_cast<std::size_t>(a) * ng;
      for (int nu2 = -L; nu2 <= L; ++nu2) {
        cplx acc{};
        for (int c = 0; c < ng; ++c) acc += row[c] * tg[detail::mod(static_cast<long long>(nu2) * c, ng)];
        H[static_cast<std::size_t>(a) * nf + (nu2 + L)] = acc;
      }
    }
    auto& Fk = F[k];
    Fk.assign(static_cast<std::size_t>(nf) * nf, cplx{});
    for (int mu2 = -L; mu2 <= L; ++mu2) {
      for (int nu2 = -L; nu2 <= L; ++nu2) {
        if (((mu2 - nu2) & 1) != 0) continue;
        cplx acc{};
        for (int a = 0; a < na; ++a)
          acc += H[static_cast<std::size_t>(a) * nf + (nu2 + L)] *
                 ta[detail::mod(static_cast<long long>(mu2) * a, 2 * na)];
        Fk[static_cast<std::size_t>(mu2 + L) * nf + (nu2 + L)] = acc * norm;
      }
    }
  });

  std::vector<Matrix> out(static_cast<std::size_t>(L + 1));
  parallel_for(static_cast<std::size_t>(L + 1), [&](std::size_t l2s) {
    const int l2 = static_cast<int>(l2s);
    const int d = l2 + 1;
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < nb; ++k) {
      const auto& w = grid.wigner(k, l2);
      const double wk = grid.beta_weight(k);
      const auto& Fk = F[k];
      for (int i = 0; i < d; ++i) {
        const int nu2 = 2 * i - l2;  // m_i drives the gamma frequency
        for (int j = 0; j < d; ++j) {
          const int mu2 = 2 * j - l2;  // m_j drives the alpha frequency
          m(i, j) += wk * w(j, i) * Fk[static_cast<std::size_t>(mu2 + L) * nf + (nu2 + L)];
        }
      }
    }
    out[l2s] = std::move(m);
  });
  return out;
}

// f(x) = sum_l (2l+1) tr(t^l(x) c_l)
//      = sum_{mu,nu} e^{i mu alpha} e^{i nu gamma} G_k(mu,nu),
// G_k(mu,nu) = sum_l (2l+1) d^l_{mu nu}(beta_k) c_l(nu, mu).
inline std::vector<cplx> SU2::synthesis(const Grid& grid, std::span<const Matrix> coeffs,
                                        HalfInt band) const {
  if (band > grid.band())
    throw band_limit_error("coefficients up to spin " + band.str() + " exceed grid band " +
                           grid.band().str());
  const int L = band.twice();
  if (coeffs.size() != static_cast<std::size_t>(L + 1))
    throw grid_mismatch_error("coefficient count does not match band");
  const int na = grid.n_alpha(), nb = grid.n_beta(), ng = grid.n_gamma();
  const int nf = 2 * L + 1;
  const auto ta = detail::phase_table(2 * na, 1.0);
  const auto tg = detail::phase_table(ng, 1.0);
  std::vector<cplx> values(grid.size());
  parallel_for(static_cast<std::size_t>(nb), [&](std::size_t k) {
    std::vector<cplx> G(static_cast<std::size_t>(nf) * nf, cplx{});
    for (int l2 = 0; l2 <= L; ++l2) {
      const auto& w = grid.wigner(static_cast<int>(k), l2);
      const Matrix& c = coeffs[static_cast<std::size_t>(l2)];
      const double d = l2 + 1;
      for (int i = 0; i <= l2; ++i) {
        const int mu2 = 2 * i - l2;
        for (int j = 0; j <= l2; ++j) {
          const int nu2 = 2 * j - l2;
          G[static_cast<std::size_t>(mu2 + L) * nf + (nu2 + L)] += d * w(i, j) * c(j, i);
        }
      }
    }
    // H(mu, c) = sum_nu G(mu,nu) e^{i nu gamma_c}
    std::vector<cplx> H(static_cast<std::size_t>(nf) * ng, cplx{});
    for (int mu2 = -L; mu2 <= L; ++mu2) {
      for (int c = 0; c < ng; ++c) {
        cplx acc{};
        for (int nu2 = -L; nu2 <= L; ++nu2) {
          if (((mu2 - nu2) & 1) != 0) continue;
          acc += G[static_cast<std::size_t>(mu2 + L) * nf + (nu2 + L)] *
                 tg[detail::mod(static_cast<long long>(nu2) * c, ng)];
        }
        H[static_cast<std::size_t>(mu2 + L) * ng + c] = acc;
      }
    }
    cplx* slice = values.data() + k * static_cast<std::size_t>(na) * ng;
    for (int a = 0; a < na; ++a) {
      for (int c = 0; c < ng; ++c) {
        cplx acc{};
        for (int mu2 = -L; mu2 <= L; ++mu2)
          acc += H[static_cast<std::size_t>(mu2 + L) * ng + c] *
                 ta[detail::mod(static_cast<long long>(mu2) * a, 2 * na)];
        slice[static_cast<std::size_t>(a) * ng + c] = acc;
      }
    }
  });
  return values;
}

}  // namespace ncf
