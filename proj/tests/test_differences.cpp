#include <gtest/gtest.h>

#include "ncfourier.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ncf;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

template <CompactGroup G>
double max_trusted_abs(const InvariantSymbol<G>& s) {
  double e = 0.0;
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (s.trusted(labels[i])) e = std::max(e, max_abs(s.entries[i]));
  return e;
}

template <CompactGroup G>
double max_diff_upto(const InvariantSymbol<G>& a, const InvariantSymbol<G>& b, HalfInt upto) {
  double e = 0.0;
  for (const auto& l : a.group.labels(upto)) e = std::max(e, max_abs(a.at(l) - b.at(l)));
  return e;
}

InvariantSymbol<Torus> torus_symbol(const Torus& t, HalfInt cutoff, const std::function<cplx(const Torus::Label&)>& f) {
  auto s = zero_symbol(t, cutoff);
  const auto labels = s.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) s.entries[i](0, 0) = f(labels[i]);
  return s;
}

FourierCoefficients<Torus> character_minus_one(const Torus& t, const Torus::Label& e) {
  auto q = FourierCoefficients<Torus>::zeros(t, t.label_band(e));
  q.at(e)(0, 0) += 1.0;
  q.at(Torus::Label(static_cast<std::size_t>(t.dimension()), 0))(0, 0) -= 1.0;
  return q;
}

}  // namespace

// ---- difference_apply -----------------------------------------------------

TEST(DifferenceApply, IdentitySymbolIsAnnihilated) {
  const SU2 g;
  const auto id = identity_symbol(g, HalfInt(4));
  for (const auto& f : delta0_set(g).component_index)
    EXPECT_LT(max_trusted_abs(difference_apply(difference_function(g, f), id)), 1e-12);
  const Torus t2(2);
  EXPECT_LT(max_trusted_abs(difference_apply(character_minus_one(t2, {1, 0}), identity_symbol(t2, HalfInt(4)))), 1e-13);
}

TEST(DifferenceApply, ZeroFunction) {
  const SU2 g;
  gen::Rng rng(gen::case_seed(gen::master_seed, 7));
  const auto s = rng.symbol(g, HalfInt(3));
  const auto r = difference_apply(FourierCoefficients<SU2>::zeros(g, HalfInt(1)), s);
  for (const auto& m : r.entries) EXPECT_EQ(max_abs(m), 0.0);
}

TEST(DifferenceApply, TorusOneAgainstBruteForceConvolution) {
  // q = e^{2 pi i x} - 1 has qhat(1) = 1, qhat(0) = -1.
  const Torus t1(1);
  const int cutoff = 6;
  auto sigma = [](int k) { return cplx(std::sin(0.7 * k) + 0.1 * k * k, 0.3 * k); };
  const auto s = torus_symbol(t1, HalfInt(cutoff), [&](const Torus::Label& k) { return sigma(k[0]); });
  DifferenceOptions opt;
  opt.finite_support = true;
  const auto r = difference_apply(character_minus_one(t1, {1}), s, opt);
  const auto brute = oracle::torus1_convolution({{1, cplx(1.0)}, {0, cplx(-1.0)}}, sigma, cutoff, cutoff + 1);
  ASSERT_EQ(r.cutoff, HalfInt(cutoff + 1));
  for (int k = -(cutoff + 1); k <= cutoff + 1; ++k)
    EXPECT_LT(std::abs(r.at({k})(0, 0) - brute[static_cast<std::size_t>(k + cutoff + 1)]), 1e-13) << "k=" << k;
  // interior labels: sigma(k - 1) - sigma(k)
  for (int k = -cutoff + 1; k <= cutoff; ++k) EXPECT_LT(std::abs(r.at({k})(0, 0) - (sigma(k - 1) - sigma(k))), 1e-13);
}

TEST(DifferenceApply, OrderClaimIsChecked) {
  const SU2 g;
  auto q = FourierCoefficients<SU2>::zeros(g, HalfInt(1));
  q.entries[0](0, 0) = 1.0;  // q = 1 does not vanish at the identity
  EXPECT_THROW(difference_apply(q, identity_symbol(g, HalfInt(3))), order_violation_error);
  DifferenceOptions opt;
  opt.claimed_order = 0;
  EXPECT_NO_THROW(difference_apply(q, identity_symbol(g, HalfInt(3)), opt));
}

TEST(DifferenceApply, TrustedRangeShrinksAndRunsOut) {
  const SU2 g;
  const auto s = identity_symbol(g, HalfInt(2));
  const DifferenceFactor<SU2> f{HalfInt(1), 0, 1};
  const auto r = first_difference(f, s);
  EXPECT_EQ(r.trusted_cutoff, HalfInt(1));
  const auto r2 = first_difference(f, r);
  EXPECT_EQ(r2.trusted_cutoff, HalfInt(0));
  EXPECT_THROW(first_difference(f, r2), budget_error);
}

TEST(DifferenceApply, GridFunctionInputMatchesCoefficients) {
  const SU2 g;
  const DifferenceFactor<SU2> f{HalfInt::from_twice(1), 1, 0};
  const auto qc = difference_function(g, f);
  auto qf = inverse(qc, haar_grid(g, HalfInt(2)));
  qf.band_hint = HalfInt::from_twice(1);
  gen::Rng rng(gen::case_seed(gen::master_seed, 8));
  const auto s = rng.symbol(g, HalfInt(3));
  EXPECT_LT(max_diff_upto(difference_apply(qf, s), difference_apply(qc, s), HalfInt::from_twice(5)), 1e-12);
}

TEST(DifferenceApply, SupportGrowthMatchesBruteForceProducts) {
  // sigma supported at one spin l; Q sigma = F(q F^{-1} sigma) with
  // q = t^{1/2}_{12}. The reference integrates the product against each
  // t^{l'} with a brute-force Euler rule.
  const SU2 g;
  const HalfInt half = HalfInt::from_twice(1);
  const DifferenceFactor<SU2> f{half, 0, 1};
  gen::Rng rng(gen::case_seed(gen::master_seed, 9));
  for (int lt = 0; lt <= 4; ++lt) {
    const HalfInt l = HalfInt::from_twice(lt);
    auto s = zero_symbol(g, l);
    s.at(l) = rng.matrix(g.dim(l));
    DifferenceOptions opt;
    opt.finite_support = true;
    const auto r = first_difference(f, s, opt);
    for (const auto& lp : r.labels()) {
      const bool allowed = lp == l + half || (lt > 0 && lp == l - half);
      if (!allowed) {
        EXPECT_LT(max_abs(r.at(lp)), 1e-12) << "l=" << l.str() << " l'=" << lp.str();
        continue;
      }
      const int d = g.dim(lp);
      const Matrix brute = oracle::su2_integral_matrix(
          [&](double a, double b, double c) -> Matrix {
            const cplx fx = static_cast<double>(g.dim(l)) * (oracle::su2_irrep(l, a, b, c) * s.at(l)).trace();
            const cplx qx = oracle::su2_irrep(half, a, b, c)(0, 1);
            return qx * fx * oracle::su2_irrep(lp, a, b, c).adjoint();
          },
          d, d, 12, 160, 12);
      EXPECT_LT(max_abs(r.at(lp) - brute), 1e-4 * std::max(1.0, max_abs(brute))) << "l=" << l.str() << " l'=" << lp.str();
    }
  }
}

// ---- first differences --------------------------------------------------------

TEST(FirstDifference, RejectsFactorsOutsideDelta0) {
  const SU2 g;
  EXPECT_THROW(first_difference(DifferenceFactor<SU2>{HalfInt(2), 0, 0}, identity_symbol(g, HalfInt(3))),
               invalid_label_error);
  EXPECT_THROW(first_difference(DifferenceFactor<SU2>{HalfInt(1), 0, 3}, identity_symbol(g, HalfInt(3))),
               invalid_label_error);
}

TEST(FirstDifference, IdentitySymbolGivesZero) {
  const Torus t3(3);
  const auto id = identity_symbol(t3, HalfInt(3));
  for (const auto& f : delta0_set(t3).component_index) EXPECT_LT(max_trusted_abs(first_difference(f, id)), 1e-13);
}

TEST(FirstDifference, TorusCharactersAreIndexShifts) {
  const Torus t3(3);
  gen::Rng rng(gen::case_seed(gen::master_seed, 10));
  const auto s = rng.symbol(t3, HalfInt(4));
  DifferenceOptions opt;
  opt.finite_support = true;
  opt.output_cutoff = HalfInt(4);
  for (const auto& e : t3.delta0_labels()) {
    const auto via_product = first_difference(DifferenceFactor<Torus>{e, 0, 0}, s, opt);
    const auto shift = torus_character_difference(s, e);
    Torus::Label minus = e;
    for (auto& v : minus) v = -v;
    for (const auto& k : s.labels()) {
      Torus::Label km = k;
      for (std::size_t a = 0; a < 3; ++a) km[a] += minus[a];
      const cplx prev = t3.label_band(km) <= s.cutoff ? s.at(km)(0, 0) : cplx{};
      const cplx expect = prev - s.at(k)(0, 0);
      EXPECT_LT(std::abs(via_product.at(k)(0, 0) - expect), 1e-12);
      EXPECT_EQ(shift.at(k)(0, 0), expect);
    }
  }
}

TEST(FirstDifference, ForwardDifferenceFromNegativeCharacter) {
  // sigma(k + e_j) - sigma(k) is the difference for the character -e_j.
  const Torus t3(3);
  const auto s = torus_symbol(t3, HalfInt(4), [](const Torus::Label& k) { return cplx(k[0] * k[0] + 2.0 * k[1] - k[2]); });
  const auto r = torus_character_difference(s, {-1, 0, 0});
  for (const auto& k : t3.labels(HalfInt(3)))
    EXPECT_EQ(r.at(k)(0, 0), cplx((k[0] + 1) * (k[0] + 1) - k[0] * k[0]));
}

TEST(FirstDifference, ResolventDecaysOneOrderFaster) {
  // sigma = (1 + l(l+1))^{-1/2}: order -1; one difference brings it to about -2.
  const SU2 g;
  const HalfInt cutoff = HalfInt(24) + HalfInt::from_twice(1);
  const auto s = spectral_multiplier(g, cutoff, [&](HalfInt l) { return 1.0 / std::sqrt(1.0 + g.laplacian_eigenvalue(l)); });
  const auto d = first_difference(DifferenceFactor<SU2>{HalfInt::from_twice(1), 0, 0}, s);
  const double n0 = moderate_fit(restrict_symbol(s, HalfInt(24))).N;
  const double n1 = moderate_fit(d).N;
  EXPECT_NEAR(n0, -1.0, 0.1);
  EXPECT_LT(n1 - n0, -0.7);
  EXPECT_GT(n1 - n0, -1.2);
}

// ---- Laplace-type difference ----------------------------------------------------

TEST(LaplaceDifference, IdentitySymbolGivesZero) {
  EXPECT_LT(max_trusted_abs(laplace_difference(identity_symbol(SU2{}, HalfInt(4)))), 1e-12);
  EXPECT_LT(max_trusted_abs(laplace_difference(identity_symbol(Torus(2), HalfInt(4)))), 1e-13);
}

TEST(LaplaceDifference, TorusClosedForm) {
  for (int n = 1; n <= 3; ++n) {
    const Torus t(n);
    gen::Rng rng(gen::case_seed(gen::master_seed, 11 + n));
    const auto s = rng.symbol(t, HalfInt(4));
    DifferenceOptions opt;
    opt.finite_support = true;
    opt.output_cutoff = HalfInt(4);
    const auto r = laplace_difference(s, opt);
    const auto closed = torus_laplace_closed_form(s);
    for (const auto& k : s.labels()) {
      cplx expect = 2.0 * n * s.at(k)(0, 0);
      for (int j = 0; j < n; ++j)
        for (int sign : {1, -1}) {
          Torus::Label m = k;
          m[j] += sign;
          if (t.label_band(m) <= s.cutoff) expect -= s.at(m)(0, 0);
        }
      EXPECT_LT(std::abs(r.at(k)(0, 0) - expect), 1e-12);
      EXPECT_EQ(closed.at(k)(0, 0), expect);
    }
  }
}

TEST(LaplaceDifference, QuadraticSymbolOnTorusOne) {
  // 2 sigma(k) - sigma(k + 1) - sigma(k - 1) = -2 for sigma(k) = k^2.
  const Torus t1(1);
  const auto s = torus_symbol(t1, HalfInt(6), [](const Torus::Label& k) { return cplx(k[0] * k[0]); });
  const auto r = laplace_difference(s);
  for (int k = -5; k <= 5; ++k) EXPECT_NEAR(std::abs(r.at({k})(0, 0) - cplx(-2.0)), 0.0, 1e-12) << "k=" << k;
  EXPECT_EQ(r.trusted_cutoff, HalfInt(5));
}

// ---- multi-differences ------------------------------------------------------------

TEST(MultiDifference, EmptySpecIsIdentity) {
  gen::Rng rng(gen::case_seed(gen::master_seed, 15));
  const auto s = rng.symbol(SU2{}, HalfInt(2));
  const auto r = multi_difference(DifferenceSpec<SU2>{}, s);
  EXPECT_EQ(max_diff_upto(r, s, HalfInt(2)), 0.0);
}

TEST(MultiDifference, TorusFactorsCommute) {
  const Torus t2(2);
  const auto s = torus_symbol(t2, HalfInt(5), [](const Torus::Label& k) { return cplx(k[0] * k[1] * k[1] + 1.0, k[0]); });
  const DifferenceFactor<Torus> e1{{-1, 0}, 0, 0}, e2{{0, -1}, 0, 0};
  const auto a = multi_difference(DifferenceSpec<Torus>{{e1, e2}}, s);
  const auto b = multi_difference(DifferenceSpec<Torus>{{e2, e1}}, s);
  EXPECT_LT(max_diff_upto(a, b, a.trusted_cutoff), 1e-12);
  // brute force: mixed forward difference of k1 k2^2 is 2 k2 + 1 at every k.
  for (const auto& k : t2.labels(a.trusted_cutoff)) EXPECT_NEAR(std::abs(a.at(k)(0, 0) - cplx(2.0 * k[1] + 1.0, 0.0)), 0.0, 1e-11);
}

TEST(MultiDifference, OrderKappaOnIdentityVanishes) {
  const SU2 g;
  const auto id = identity_symbol(g, HalfInt(4));
  const auto d0 = delta0_set(g);
  for (std::size_t a = 0; a < d0.component_index.size(); a += 3)
    for (std::size_t b = 0; b < d0.component_index.size(); b += 4) {
      const DifferenceSpec<SU2> spec{{d0.component_index[a], d0.component_index[b]}};
      EXPECT_LT(max_trusted_abs(multi_difference(spec, id)), 1e-12);
    }
}

TEST(MultiDifference, RightmostFactorAppliedFirst) {
  const SU2 g;
  gen::Rng rng(gen::case_seed(gen::master_seed, 16));
  const auto s = rng.symbol(g, HalfInt(3));
  const DifferenceFactor<SU2> a{HalfInt(1), 0, 1}, b{HalfInt::from_twice(1), 1, 1};
  const auto composed = multi_difference(DifferenceSpec<SU2>{{a, b}}, s);
  const auto manual = first_difference(a, first_difference(b, s));
  EXPECT_LT(max_diff_upto(composed, manual, composed.trusted_cutoff), 1e-13);
}

// ---- T^3 second difference ------------------------------------------------------------

TEST(T3SecondDifference, ConstantGivesZero) {
  const auto s = torus_symbol(Torus(3), HalfInt(3), [](const Torus::Label&) { return cplx(2.5); });
  const auto r = t3_second_difference(s);
  for (const auto& k : Torus(3).labels(r.trusted_cutoff)) EXPECT_EQ(r.at(k)(0, 0), cplx(0.0));
}

TEST(T3SecondDifference, OneSixthOfLaplaceDifference) {
  const Torus t3(3);
  gen::Rng rng(gen::case_seed(gen::master_seed, 17));
  const auto s = rng.symbol(t3, HalfInt(3));
  const auto t = t3_second_difference(s);
  const auto l = torus_laplace_closed_form(s);
  for (const auto& k : s.labels()) EXPECT_LT(std::abs(t.at(k)(0, 0) - l.at(k)(0, 0) / 6.0), 1e-15);
  const auto lp = laplace_difference(s);
  for (const auto& k : t3.labels(lp.trusted_cutoff)) EXPECT_LT(std::abs(t.at(k)(0, 0) - lp.at(k)(0, 0) / 6.0), 1e-13);
}

TEST(T3SecondDifference, SquaredNormGivesMinusOne) {
  const Torus t3(3);
  const auto s = torus_symbol(t3, HalfInt(4), [](const Torus::Label& k) { return cplx(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); });
  const auto r = t3_second_difference(s);
  for (const auto& k : t3.labels(HalfInt(3))) EXPECT_EQ(r.at(k)(0, 0), cplx(-1.0));
  EXPECT_THROW(t3_second_difference(identity_symbol(Torus(2), HalfInt(2))), invalid_label_error);
}

// ---- enumeration, engine, text form -------------------------------------------------------

TEST(MultiIndices, Counts) {
  EXPECT_EQ(enumerate_multi_indices(13, 2).size(), 105u);
  EXPECT_EQ(enumerate_multi_indices(6, 2).size(), 28u);
  EXPECT_EQ(enumerate_multi_indices(6, 0).size(), 1u);
  for (const auto& a : enumerate_multi_indices(5, 3)) EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(DifferenceEngine, MatchesSequentialApplication) {
  const SU2 g;
  gen::Rng rng(gen::case_seed(gen::master_seed, 18));
  const auto s = rng.symbol(g, HalfInt(4));
  const DifferenceEngine<SU2> engine(s, HalfInt(2), HalfInt(2));
  EXPECT_EQ(engine.component_count(), 13u);
  for (const auto& alpha : enumerate_multi_indices(13, 2)) {
    if (alpha.size() != 2 || (alpha[0] + alpha[1]) % 5 != 0) continue;
    const auto fast = engine.apply(alpha);
    const auto slow = multi_difference(engine.spec_of(alpha), s);
    EXPECT_LT(max_diff_upto(fast, slow, fast.trusted_cutoff), 1e-12);
  }
  const auto lap = engine.apply(std::vector<int>{}, 1);
  EXPECT_LT(max_diff_upto(lap, laplace_difference(s), lap.trusted_cutoff), 1e-12);
  EXPECT_THROW(engine.apply(std::vector<int>{0, 0, 0}), budget_error);
}

TEST(DifferenceSpecText, RoundTrip) {
  const SU2 g;
  const DifferenceSpec<SU2> spec{{{HalfInt(1), 1, 2}, {HalfInt(1), 1, 2}, {HalfInt::from_twice(1), 0, 0}}};
  const std::string text = format_difference_spec(g, spec);
  EXPECT_EQ(text, "su2:1:(2,3)^2 su2:1/2:(1,1)");
  const auto back = parse_difference_spec(g, text);
  ASSERT_EQ(back.factors.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.factors[i], spec.factors[i]);

  const Torus t3(3);
  const DifferenceSpec<Torus> ts{{{{0, -1, 0}, 0, 0}}};
  const auto tb = parse_difference_spec(t3, format_difference_spec(t3, ts));
  ASSERT_EQ(tb.factors.size(), 1u);
  EXPECT_EQ(tb.factors[0], ts.factors[0]);
}

TEST(DifferenceSpecText, ErrorsNameTheToken) {
  const SU2 g;
  for (const char* bad : {"su2:1:(2,3) su2:2:(1,1)", "t3:1:(1,1)", "su2:1:(1,x)", "su2:1:(1,1)^"}) {
    try {
      parse_difference_spec(g, bad);
      ADD_FAILURE() << "accepted " << bad;
    } catch (const parse_error& e) {
      EXPECT_NE(std::string(e.what()).find("difference factor"), std::string::npos);
    }
  }
}

TEST(TruncationBudget, Bookkeeping) {
  const auto b = truncation_budget(SU2{}, HalfInt(8), 2);
  EXPECT_EQ(b.margin, HalfInt(1));
  EXPECT_EQ(b.output_cutoff, HalfInt(10));
  EXPECT_EQ(b.trusted_cutoff(), HalfInt(6));
}
