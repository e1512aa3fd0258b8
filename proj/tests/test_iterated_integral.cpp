#include "sigrecover/iterated_integral.hpp"
#include "sigrecover/lattice.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sigrecover;

namespace {

Box big_box(int d) { return {std::vector<double>(static_cast<std::size_t>(d), -100.0),
                             std::vector<double>(static_cast<std::size_t>(d), 100.0)}; }

OneFormPtr dx(int d, int j) { return std::make_shared<CoordinateOneForm>(d, j, big_box(d)); }

} // namespace

TEST(ExtendedSignature, SingleCoordinateFormIsIncrement) {
  std::mt19937_64 rng(1);
  const auto p = oracle::random_path(rng, 3, 9);
  const std::vector<OneFormPtr> forms{dx(3, 0)};
  EXPECT_NEAR(extended_signature(p, forms).to_double(), p.total_increment()[0], 1e-13);
  const double s = 0.21;
  const double t = 0.83;
  EXPECT_NEAR(extended_signature(p, forms, s, t).to_double(), p.at(t)[0] - p.at(s)[0], 1e-13);
}

TEST(ExtendedSignature, LShapedTwoForms) {
  const auto L = PiecewiseLinearPath::polyline({{1.0, 0.0}, {1.0, 1.0}});
  const std::vector<OneFormPtr> forms{dx(2, 0), dx(2, 1)};
  EXPECT_NEAR(extended_signature(L, forms).to_double(), 1.0, 1e-14);
  const std::vector<OneFormPtr> rev{dx(2, 1), dx(2, 0)};
  EXPECT_EQ(extended_signature(L, rev).to_double(), 0.0);
}

TEST(ExtendedSignature, CoordinateWordsMatchSignatureOracle) {
  std::mt19937_64 rng(3);
  const auto p = oracle::random_path(rng, 2, 5);
  for (const std::vector<int>& w : {std::vector<int>{1, 2, 1}, {2, 2, 1}, {1, 2, 2, 1}}) {
    std::vector<OneFormPtr> forms;
    for (int l : w) {
      forms.push_back(dx(2, l - 1));
    }
    const double ref = oracle::iterated_integral(p, w, 16);
    EXPECT_NEAR(extended_signature(p, forms).to_double(), ref, 1e-10 * std::max(1.0, std::fabs(ref)));
  }
}

TEST(ExtendedSignature, UnmetSupportGivesExactZero) {
  const auto p = PiecewiseLinearPath::polyline({{0.5, 0.2}, {0.1, 0.4}});
  const std::vector<OneFormPtr> forms{dx(2, 0), bump_one_form({3.0, 3.0}, 0.5), dx(2, 1)};
  const auto r = extended_signature(p, forms);
  EXPECT_TRUE(r.value.is_zero());
}

TEST(ExtendedSignature, EmptyFormListThrows) {
  const auto p = PiecewiseLinearPath::line({1.0, 0.0});
  std::vector<OneFormPtr> none;
  EXPECT_THROW(extended_signature(p, none), std::invalid_argument);
}

TEST(ExtendedSignature, PolynomialFormsMatchTrapezoidOracle) {
  std::mt19937_64 rng(5);
  const auto p = oracle::random_unit_box_path(rng, 2, 4);
  auto f1 = std::make_shared<PolynomialOneForm>(2, std::vector<Monomial>{{1.0, {0, 1}, 1}, {0.5, {0, 0}, 2}});
  auto f2 = std::make_shared<PolynomialOneForm>(2, std::vector<Monomial>{{1.0, {2, 0}, 2}});
  const std::vector<OneFormPtr> forms{f1, f2};
  using F = std::function<double(const Point&, const Point&)>;
  const std::vector<F> ref{[](const Point& x, const Point& v) { return x[1] * v[0] + 0.5 * v[1]; },
                           [](const Point& x, const Point& v) { return x[0] * x[0] * v[1]; }};
  const double a = extended_signature(p, forms).to_double();
  EXPECT_LE(oracle::rel_diff(a, oracle::nested_trapezoid(p, ref, 400)), 1e-8);
}

TEST(ExtendedSignature, BumpSingleIntegralMatchesGaussKronrod) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const BumpOneForm f({0.0, 0.0}, 1.0);
  const std::vector<OneFormPtr> forms{std::make_shared<BumpOneForm>(f)};
  for (int n = 0; n < 20; ++n) {
    const auto p = PiecewiseLinearPath::polyline({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}});
    const auto ref = oracle::bump_interval_integral(p, f, 0.0, 1.0);
    const auto got = extended_signature(p, forms).value;
    if (ref.value.is_zero()) {
      EXPECT_TRUE(got.is_zero());
      continue;
    }
    EXPECT_LE(((got - ref.value).abs() / ref.mass).to_double(), 1e-10);
  }
}

TEST(ExtendedSignature, GrazingChordIsResolved) {
  // The chord passes within 1e-3 of the box corner region edge: a sharp,
  // very small bump that a fixed 64-step rule cannot see.
  const BumpOneForm f({0.0, 0.0}, 1.0);
  const std::vector<OneFormPtr> forms{std::make_shared<BumpOneForm>(f)};
  const auto p = PiecewiseLinearPath::polyline({{-2.0, 0.999}, {2.0, 0.999}});
  const auto ref = oracle::bump_interval_integral(p, f, 0.0, 1.0);
  const auto got = extended_signature(p, forms).value;
  ASSERT_FALSE(ref.value.is_zero());
  EXPECT_LE(oracle::rel_diff(got, ref.value), 1e-8);
}

TEST(ExtendedSignature, TwoBumpsFactorize) {
  // Visits the cube around (0,0) and then the one around (1,0) only once each.
  const CubeLattice lat(1.0, 0.1);
  const auto p = PiecewiseLinearPath::polyline({{0.3, 0.1}, {1.2, -0.1}, {1.4, 0.6}});
  const BumpOneForm f0(lat.center({0, 0}), lat.half_width());
  const BumpOneForm f1(lat.center({1, 0}), lat.half_width());
  const std::vector<OneFormPtr> forms{std::make_shared<BumpOneForm>(f0), std::make_shared<BumpOneForm>(f1)};
  const auto got = extended_signature(p, forms).value;
  const auto ref = oracle::bump_interval_integral(p, f0, 0.0, 1.0).value *
                   oracle::bump_interval_integral(p, f1, 0.0, 1.0).value;
  EXPECT_LE(oracle::rel_diff(got, ref), 1e-8);
  // Reverse order: f1 is never met before f0 ends.
  const std::vector<OneFormPtr> rev{forms[1], forms[0]};
  EXPECT_TRUE(extended_signature(p, rev).value.is_zero());
}

TEST(ExtendedSignature, SupportLocality) {
  const BumpOneForm f({0.0, 0.0}, 0.25);
  const std::vector<OneFormPtr> forms{std::make_shared<BumpOneForm>(f)};
  const PiecewiseLinearPath a({0.0, 0.3, 0.6, 1.0}, {{0.0, 0.0}, {0.2, 0.1}, {1.0, 1.0}, {2.0, 0.0}});
  const PiecewiseLinearPath b({0.0, 0.3, 0.6, 0.8, 1.0},
                              {{0.0, 0.0}, {0.2, 0.1}, {1.0, 1.0}, {-3.0, 5.0}, {4.0, 4.0}});
  const double va = extended_signature(a, forms).to_double();
  ASSERT_NE(va, 0.0);
  EXPECT_LE(oracle::rel_diff(va, extended_signature(b, forms).to_double()), 1e-12);
  // Restricting to [s, t] ignores changes outside it even inside the support.
  const PiecewiseLinearPath c({0.0, 0.3, 0.6, 1.0}, {{0.0, 0.0}, {0.2, 0.1}, {1.0, 1.0}, {0.0, 0.0}});
  EXPECT_LE(oracle::rel_diff(extended_signature(a, forms, 0.0, 0.6).to_double(),
                             extended_signature(c, forms, 0.0, 0.6).to_double()),
            1e-12);
}

TEST(ExtendedSignature, ErrorEstimateReported) {
  const auto p = PiecewiseLinearPath::polyline({{0.2, 0.1}, {-0.1, 0.2}});
  const std::vector<OneFormPtr> forms{bump_one_form({0.0, 0.0}, 0.25)};
  QuadratureOptions q;
  q.estimate_error = true;
  const auto r = extended_signature(p, forms, 0.0, 1.0, q);
  EXPECT_TRUE(std::isfinite(r.error_estimate));
  EXPECT_LE(r.error_estimate, 1e-8 * std::fabs(r.to_double()));
  EXPECT_TRUE(std::isnan(extended_signature(p, forms).error_estimate));
}

TEST(IteratedIntegrator, LevelsAgreeWithEvaluate) {
  const CubeLattice lat(0.25, 0.025);
  std::mt19937_64 rng(11);
  const auto p = oracle::random_path(rng, 2, 40, 0.08);
  const auto cubes = touched_cubes(p, lat);
  std::vector<OneFormPtr> forms;
  for (const auto& z : cubes) {
    forms.push_back(lat.bump_form(z));
  }
  const IteratedIntegrator I(p, forms);
  const auto rec = visit_sequence(p, lat);
  std::vector<std::size_t> seq;
  for (const auto& z : rec.word.letters()) {
    seq.push_back(static_cast<std::size_t>(std::find(cubes.begin(), cubes.end(), z) - cubes.begin()));
  }
  const ExtReal full = I.evaluate(seq);
  ASSERT_FALSE(full.is_zero());

  std::vector<IteratedIntegrator::Level> fwd{I.unit()};
  for (std::size_t k : seq) {
    fwd.push_back(I.extend(fwd.back(), k));
  }
  EXPECT_EQ(fwd.back().final, full);
  std::vector<IteratedIntegrator::Level> bwd(seq.size() + 1, I.unit());
  for (std::size_t k = seq.size(); k-- > 0;) {
    bwd[k] = I.extend_backward(bwd[k + 1], seq[k]);
  }
  EXPECT_LE(oracle::rel_diff(bwd[0].initial, full), 1e-9);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    EXPECT_LE(oracle::rel_diff(I.combine(fwd[k], seq[k], bwd[k + 1]), full), 1e-9) << k;
  }
  EXPECT_THROW(I.extend(I.unit(), forms.size()), std::out_of_range);
}

TEST(LineBoxInterval, ClosedAndOpen) {
  const std::vector<double> p{-1.0, 0.5};
  const std::vector<double> d{1.0, 0.0};
  const std::vector<double> lo{0.0, 0.0};
  const std::vector<double> hi{1.0, 1.0};
  const auto iv = line_box_interval(p, d, lo, hi, false);
  ASSERT_TRUE(iv);
  EXPECT_DOUBLE_EQ(iv->lo, 1.0);
  EXPECT_DOUBLE_EQ(iv->hi, 2.0);
  const std::vector<double> edge{-1.0, 1.0};
  EXPECT_TRUE(line_box_interval(edge, d, lo, hi, false));
  EXPECT_FALSE(line_box_interval(edge, d, lo, hi, true));
}
