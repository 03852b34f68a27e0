#include <gtest/gtest.h>

#include "ncfourier.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ncf;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST(HalfInt, ParseAndFormat) {
  EXPECT_EQ(HalfInt::parse("3/2").twice(), 3);
  EXPECT_EQ(HalfInt::parse("1.5").twice(), 3);
  EXPECT_EQ(HalfInt::parse("4").twice(), 8);
  EXPECT_EQ(HalfInt::from_twice(3).str(), "3/2");
  EXPECT_THROW(HalfInt::parse("1/3"), parse_error);
  EXPECT_THROW(HalfInt::parse("0.3"), parse_error);
  EXPECT_THROW(HalfInt::parse("x"), parse_error);
}

TEST(Labels, ParseAndValidate) {
  EXPECT_EQ(SU2{}.parse_label("1/2"), HalfInt::from_twice(1));
  EXPECT_THROW(SU2{}.parse_label("-1"), invalid_label_error);
  EXPECT_EQ(Torus(2).parse_label("(1,-2)"), (Torus::Label{1, -2}));
  EXPECT_THROW(Torus(2).parse_label("(1,2,3)"), invalid_label_error);
  EXPECT_THROW(Torus(2).parse_label("(1;2)"), parse_error);
}

TEST(LabelEnumeration, CountsAndIndex) {
  EXPECT_EQ(SU2{}.labels(HalfInt(2)).size(), 5u);
  const Torus t3(3);
  const auto labels = t3.labels(HalfInt(2));
  EXPECT_EQ(labels.size(), 125u);
  for (std::size_t i = 0; i < labels.size(); ++i) EXPECT_EQ(t3.label_index(labels[i], HalfInt(2)), i);
  EXPECT_THROW(SU2{}.label_index(HalfInt(3), HalfInt(2)), band_limit_error);
}

// ---- grids --------------------------------------------------------------

TEST(HaarGrid, TorusOneBandTwo) {
  const auto grid = haar_grid(Torus(1), HalfInt(2));
  ASSERT_EQ(grid->size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(grid->weight(i), 0.2);
    EXPECT_NEAR(grid->node(i)[0], i / 5.0, 1e-15);
  }
}

TEST(HaarGrid, SpinHalfOrthogonalityIntegral) {
  // Brute-force midpoint rule in Euler angles as the oracle.
  const auto brute = oracle::su2_integral(
      [](double a, double b, double g) { return std::norm(oracle::su2_irrep(HalfInt::from_twice(1), a, b, g)(0, 0)); },
      8, 400, 8);
  EXPECT_NEAR(brute.real(), 0.5, 1e-5);

  const SU2 g;
  const auto grid = haar_grid(g, HalfInt::from_twice(1));
  double q = 0.0;
  for (std::size_t n = 0; n < grid->size(); ++n)
    q += grid->weight(n) * std::norm(g.irrep_matrix(HalfInt::from_twice(1), grid->node(n))(0, 0));
  EXPECT_NEAR(q, 0.5, 1e-14);
  EXPECT_NEAR(q, brute.real(), 1e-5);
}

TEST(HaarGrid, WeightsSumToOne) {
  for (int t = 0; t <= 12; ++t) {
    const auto grid = haar_grid(SU2{}, HalfInt::from_twice(t));
    CompensatedSum s;
    for (std::size_t n = 0; n < grid->size(); ++n) s.add(grid->weight(n));
    EXPECT_NEAR(s.value(), 1.0, 1e-14) << "SU2 band " << t / 2.0;
  }
  for (int n = 1; n <= 3; ++n)
    for (int b = 0; b <= 4; ++b) {
      const auto grid = haar_grid(Torus(n), HalfInt(b));
      CompensatedSum s;
      for (std::size_t i = 0; i < grid->size(); ++i) s.add(grid->weight(i));
      EXPECT_NEAR(s.value(), 1.0, 1e-14);
    }
}

TEST(HaarGrid, NodeBudget) {
  EXPECT_THROW(haar_grid(SU2{}, HalfInt(40), 1000), band_limit_error);
  EXPECT_THROW(haar_grid(Torus(3), HalfInt(40), 1000), band_limit_error);
}

TEST(HaarGrid, CacheReturnsSameGrid) {
  const auto a = cached_haar_grid(SU2{}, HalfInt(3));
  const auto b = cached_haar_grid(SU2{}, HalfInt(3));
  EXPECT_EQ(a.get(), b.get());
}

// ---- irreducible representations -------------------------------------------

TEST(IrrepMatrix, TrivialAndCharacter) {
  const SU2 g;
  gen::Rng rng(gen::master_seed);
  for (int i = 0; i < 5; ++i) {
    const Matrix m = g.irrep_matrix(HalfInt(0), rng.su2_element());
    ASSERT_EQ(m.rows(), 1);
    EXPECT_NEAR(std::abs(m(0, 0) - 1.0), 0.0, 1e-15);
  }
  const Matrix c = Torus(2).irrep_matrix({1, 0}, {0.25, 0.9});
  EXPECT_NEAR(std::abs(c(0, 0) - cplx(0.0, 1.0)), 0.0, 1e-15);
}

// Euler angles (0, beta, 0) are exp(-beta X_2), so t^l(0, beta, 0) = exp(-i beta J_2).
TEST(IrrepMatrix, SpinHalfRotationBlockMatchesExponential) {
  const SU2 g;
  const HalfInt half = HalfInt::from_twice(1);
  for (double beta : {0.1, 0.7, 1.9, 3.0}) {
    const Matrix m = g.irrep_matrix(half, {0.0, beta, 0.0});
    const Matrix e = oracle::matrix_exp(-beta * cplx(0.0, 1.0) * oracle::spin(half)[1]);
    EXPECT_LT(max_abs(m - e), 1e-14);
    EXPECT_NEAR(m(0, 0).real(), std::cos(beta / 2), 1e-15);
    EXPECT_NEAR(m(1, 1).real(), std::cos(beta / 2), 1e-15);
    EXPECT_NEAR(std::abs(m(0, 1)), std::sin(beta / 2), 1e-15);
    EXPECT_NEAR(m(0, 1).real(), -m(1, 0).real(), 1e-15);
  }
}

TEST(IrrepMatrix, MatchesFactorialSumOracle) {
  const SU2 g;
  gen::Rng rng(gen::case_seed(gen::master_seed, 1));
  for (int c = 0; c < 20; ++c) {
    const auto x = rng.su2_element();
    const HalfInt l = rng.spin(8);
    EXPECT_LT(max_abs(g.irrep_matrix(l, x) - oracle::su2_irrep(l, x.alpha, x.beta, x.gamma)), 1e-12) << "l=" << l.str();
  }
}

TEST(IrrepMatrix, OneParameterSubgroupsAreExponentials) {
  const SU2 g;
  for (int t = 1; t <= 6; ++t) {
    const HalfInt l = HalfInt::from_twice(t);
    for (int axis = 1; axis <= 3; ++axis)
      for (double s : {-1.3, 0.4, 2.2}) {
        const Matrix lhs = g.irrep_matrix(l, g.exp(axis, s));
        const Matrix rhs = oracle::matrix_exp(s * cplx(0.0, 1.0) * oracle::spin(l)[static_cast<std::size_t>(axis - 1)]);
        EXPECT_LT(max_abs(lhs - rhs), 1e-12) << "l=" << l.str() << " axis " << axis;
      }
  }
}

TEST(IrrepMatrix, LieAlgebraMatricesAreSpinMatrices) {
  const SU2 g;
  for (int t = 0; t <= 6; ++t) {
    const HalfInt l = HalfInt::from_twice(t);
    for (int axis = 1; axis <= 3; ++axis)
      EXPECT_LT(max_abs(g.lie_algebra_matrix(l, axis) -
                        cplx(0.0, 1.0) * oracle::spin(l)[static_cast<std::size_t>(axis - 1)]),
                1e-14);
  }
}

TEST(IrrepMatrixProperty, HomomorphismAndUnitarity) {
  const SU2 g;
  for (int c = 0; c < gen::default_cases; ++c) {
    const auto seed = gen::case_seed(gen::master_seed, 100 + c);
    gen::Rng rng(seed);
    const auto x = rng.su2_element(), y = rng.su2_element();
    const HalfInt l = rng.spin(10);
    const Matrix a = g.irrep_matrix(l, x), b = g.irrep_matrix(l, y);
    const int d = g.dim(l);
    EXPECT_LT(max_abs(g.irrep_matrix(l, g.multiply(x, y)) - a * b), 1e-11) << gen::describe(seed);
    EXPECT_LT(max_abs(a.adjoint() * a - Matrix::Identity(d, d)), 1e-12) << gen::describe(seed);
    EXPECT_LT(max_abs(g.irrep_matrix(l, g.inverse(x)) - a.adjoint()), 1e-11) << gen::describe(seed);
  }
  const Torus t3(3);
  for (int c = 0; c < gen::default_cases; ++c) {
    const auto seed = gen::case_seed(gen::master_seed, 200 + c);
    gen::Rng rng(seed);
    const auto x = rng.torus_element(3), y = rng.torus_element(3);
    const Torus::Label k{rng.integer(-5, 5), rng.integer(-5, 5), rng.integer(-5, 5)};
    EXPECT_LT(max_abs(t3.irrep_matrix(k, t3.multiply(x, y)) - t3.irrep_matrix(k, x) * t3.irrep_matrix(k, y)), 1e-12)
        << gen::describe(seed);
  }
}

// ---- Casimir weights --------------------------------------------------------

TEST(CasimirWeight, TrivialLabel) {
  EXPECT_EQ(casimir_weight(SU2{}, HalfInt(0)), 1.0);
  EXPECT_EQ(casimir_weight(Torus(3), {0, 0, 0}), 1.0);
}

TEST(CasimirWeight, SpinThreeFromFiniteDifferenceCasimir) {
  // D1^2 + D2^2 + D3^2 acts on matrix coefficients of t^l by -l(l+1).
  const HalfInt l(3);
  const Matrix x = oracle::su2_u(0.4, 1.1, 2.3);
  auto f = [&](const Matrix& u) { return oracle::su2_irrep_of(l, u)(2, 4); };
  const cplx lap = oracle::casimir_fd(f, x);
  const double eig = -(lap / f(x)).real();
  EXPECT_NEAR(eig, 12.0, 1e-4);
  EXPECT_NEAR(casimir_weight(SU2{}, l), std::sqrt(eig), 1e-5);
  EXPECT_DOUBLE_EQ(casimir_weight(SU2{}, l), std::sqrt(12.0));
}

TEST(CasimirWeight, TorusNormalizedLaplacian) {
  // -(1/4pi^2) sum_j d^2/dx_j^2 applied to e^{2 pi i k.x} by central differences.
  const Torus t3(3);
  const Torus::Label k{1, 2, 2};
  const std::vector<double> x{0.13, 0.71, 0.42};
  const double h = 1e-4;
  auto f = [&](std::vector<double> y) { return t3.irrep_matrix(k, y)(0, 0); };
  cplx lap{};
  for (int j = 0; j < 3; ++j) {
    auto p = x, m = x;
    p[j] += h;
    m[j] -= h;
    lap += (f(p) - 2.0 * f(x) + f(m)) / (h * h);
  }
  const double lambda2 = -(lap / f(x)).real() / (4 * pi * pi);
  EXPECT_NEAR(lambda2, 9.0, 1e-4);
  EXPECT_DOUBLE_EQ(casimir_weight(t3, k), 3.0);
}

// ---- Delta_0 and rho^2 -------------------------------------------------------

TEST(Delta0, TorusCharacters) {
  const auto d3 = delta0_set(Torus(3));
  EXPECT_EQ(d3.labels.size(), 6u);
  for (const auto& k : d3.labels) {
    int abs_sum = 0;
    for (int v : k) abs_sum += std::abs(v);
    EXPECT_EQ(abs_sum, 1);
  }
  const auto d1 = delta0_set(Torus(1));
  ASSERT_EQ(d1.labels.size(), 2u);
  EXPECT_EQ(std::abs(d1.labels[0][0]), 1);
  EXPECT_EQ(d1.labels[0][0], -d1.labels[1][0]);
}

TEST(Delta0, SU2AdjointAndCentre) {
  const SU2 g;
  const auto d = delta0_set(g);
  ASSERT_EQ(d.labels.size(), 2u);
  EXPECT_EQ(d.labels[0], HalfInt(1));
  EXPECT_EQ(d.labels[1], HalfInt::from_twice(1));
  EXPECT_EQ(d.component_index.size(), 13u);
  EXPECT_EQ(d.max_label_band, HalfInt(1));

  // The adjoint action Ad(u)_{ab} = tr(s_a u s_b u^*)/2 on su(2) has the
  // character of l = 1.
  const Matrix s1 = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  const Matrix s2 = (Matrix(2, 2) << 0, cplx(0, -1), cplx(0, 1), 0).finished();
  const Matrix s3 = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  const std::array<Matrix, 3> s{s1, s2, s3};
  gen::Rng rng(gen::case_seed(gen::master_seed, 3));
  for (int c = 0; c < 10; ++c) {
    const auto x = rng.su2_element();
    const Matrix u = oracle::su2_u(x.alpha, x.beta, x.gamma);
    cplx tr{};
    for (int a = 0; a < 3; ++a) tr += (s[a] * u * s[a] * u.adjoint()).trace() / 2.0;
    EXPECT_NEAR(std::abs(tr - g.irrep_matrix(HalfInt(1), x).trace()), 0.0, 1e-12);
  }
  // -I: alpha = 0, beta = 0, gamma = 2 pi. l = 1 is trivial there, l = 1/2 is not.
  const EulerAngles minus_one{0.0, 0.0, 2 * pi};
  EXPECT_LT(max_abs(g.irrep_matrix(HalfInt(1), minus_one) - Matrix::Identity(3, 3)), 1e-14);
  EXPECT_LT(max_abs(g.irrep_matrix(HalfInt::from_twice(1), minus_one) + Matrix::Identity(2, 2)), 1e-14);
}

TEST(RhoSquared, VanishesAtIdentity) {
  EXPECT_EQ(rho_squared(SU2{}, SU2{}.identity()), 0.0);
  EXPECT_NEAR(rho_squared(Torus(3), Torus(3).identity()), 0.0, 1e-15);
}

TEST(RhoSquared, TorusFormula) {
  const Torus t3(3);
  gen::Rng rng(gen::case_seed(gen::master_seed, 4));
  for (int c = 0; c < 10; ++c) {
    const auto x = rng.torus_element(3);
    double expect = 6.0;
    for (double v : x) expect -= 2 * std::cos(2 * pi * v);
    EXPECT_NEAR(rho_squared(t3, x), expect, 1e-13);
  }
}

TEST(RhoSquared, SU2RotationAboutSecondAxis) {
  const SU2 g;
  for (double beta : {0.0, 0.3, 1.4, 2.9}) {
    const Matrix u = oracle::su2_u(0.0, beta, 0.0);
    // characters by brute-force traces: l = 1 through Ad, l = 1/2 directly
    const double chi_half = u.trace().real();
    const double chi_one = chi_half * chi_half - 1.0;  // t^{1/2} (x) t^{1/2} = t^0 + t^1
    const double expect = (3.0 - chi_one) + (2.0 - chi_half);
    EXPECT_NEAR(rho_squared(g, {0.0, beta, 0.0}), expect, 1e-13);
    EXPECT_NEAR(expect, (3.0 - (1.0 + 2 * std::cos(beta))) + (2.0 - 2 * std::cos(beta / 2)), 1e-13);
  }
}

TEST(RhoSquared, PositiveAwayFromIdentity) {
  gen::Rng rng(gen::case_seed(gen::master_seed, 5));
  for (int c = 0; c < gen::default_cases; ++c) {
    const auto x = rng.su2_element();
    EXPECT_GT(rho_squared(SU2{}, x), 0.0);
  }
}

// ---- left-invariant derivatives ----------------------------------------------

TEST(LeftDerivative, ConstantIsAnnihilated) {
  const auto grid = haar_grid(SU2{}, HalfInt(2));
  const auto one = sample(grid, [](const EulerAngles&) { return cplx(1.0); });
  for (int axis = 1; axis <= 3; ++axis)
    for (const auto& v : left_derivative(one, axis).values) EXPECT_LT(std::abs(v), 1e-13);
}

TEST(LeftDerivative, TorusCharacter) {
  const auto grid = haar_grid(Torus(2), HalfInt(2));
  const auto f = sample(grid, [](const std::vector<double>& x) { return std::polar(1.0, 2 * pi * x[0]); });
  const auto d = left_derivative(f, 1);
  for (std::size_t n = 0; n < grid->size(); ++n)
    EXPECT_LT(std::abs(d.values[n] - cplx(0.0, 2 * pi) * f.values[n]), 1e-12);
}

TEST(LeftDerivative, SpinHalfCoefficientAgainstFiniteDifference) {
  const SU2 g;
  const HalfInt half = HalfInt::from_twice(1);
  const auto grid = haar_grid(g, half);
  const auto f = sample(grid, [&](const EulerAngles& x) { return g.irrep_matrix(half, x)(0, 0); });
  const auto d = left_derivative(f, 3);
  auto coeff = [&](const Matrix& u) { return oracle::su2_irrep_of(half, u)(0, 0); };
  for (std::size_t n = 0; n < grid->size(); ++n) {
    const auto x = grid->node(n);
    const cplx fd = oracle::left_fd(coeff, oracle::su2_u(x.alpha, x.beta, x.gamma), 3);
    EXPECT_LT(std::abs(d.values[n] - fd), 1e-7);
    // eigenfunction with eigenvalue i m, m = -1/2 for the first column
    EXPECT_LT(std::abs(d.values[n] - cplx(0.0, -0.5) * f.values[n]), 1e-13);
  }
}
