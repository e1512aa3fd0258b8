// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "sigrecover/convergence.hpp"
#include "sigrecover/frechet.hpp"
#include "sigrecover/gaussian_sim.hpp"
#include "sigrecover/iterated_integral.hpp"
#include "sigrecover/one_forms.hpp"
#include "sigrecover/paths.hpp"
#include "sigrecover/reconstruct.hpp"
#include "sigrecover/tensor_algebra.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace sigrecover;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double rel_to_scale(const TensorSeries& a, const TensorSeries& b) {
  double scale = 1.0;
  for (int k = 0; k <= a.level(); ++k) {
    for (double v : a.level_coeffs(k)) {
      scale = std::max(scale, std::fabs(v));
    }
  }
  return a.max_abs_diff(b) / scale;
}

// 1. Chen split and associativity of the tensor product.
Outcome chen_suite() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u01;
  double worst_split = 0.0;
  double worst_assoc = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d = 1 + i % 3;
    const int L = 1 + (i / 3) % 5;
    const auto p = oracle::random_path(rng, d, 2 + static_cast<std::size_t>(i % 9));
    const double t = 0.05 + 0.9 * u01(rng);
    const TensorSeries whole = path_signature(p, L);
    const TensorSeries split = concat(path_signature(p, L, 0.0, t), path_signature(p, L, t, 1.0));
    worst_split = std::max(worst_split, rel_to_scale(whole, split));

    const double a = 0.1 + 0.3 * u01(rng);
    const double b = a + 0.1 + 0.4 * u01(rng);
    const auto x = path_signature(p, L, 0.0, a);
    const auto y = path_signature(p, L, a, b);
    const auto z = path_signature(p, L, b, 1.0);
    worst_assoc = std::max(worst_assoc, rel_to_scale(concat(concat(x, y), z), concat(x, concat(y, z))));
  }
  return {worst_split <= 1e-12 && worst_assoc <= 1e-12,
          "200 paths; max rel split " + fmt(worst_split) + ", assoc " + fmt(worst_assoc)};
}

// 2. Shuffle identity for all word pairs with |u| + |w| <= 4.
Outcome shuffle_suite() {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  std::size_t checks = 0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 2;
    const auto p = oracle::random_path(rng, d, 3 + static_cast<std::size_t>(i % 6));
    const TensorSeries s = path_signature(p, 4);
    for (std::size_t lu = 1; lu <= 3; ++lu) {
      for (std::size_t lw = 1; lu + lw <= 4; ++lw) {
        const auto nu = static_cast<std::size_t>(std::pow(d, lu));
        const auto nw = static_cast<std::size_t>(std::pow(d, lw));
        for (std::size_t iu = 0; iu < nu; ++iu) {
          for (std::size_t iw = 0; iw < nw; ++iw) {
            const Word u = word_from_index(iu, lu, d);
            const Word w = word_from_index(iw, lw, d);
            const double lhs = s[u] * s[w];
            double rhs = 0.0;
            double mass = 0.0;
            for (const Word& v : shuffle(u, w)) {
              rhs += s[v];
              mass += std::fabs(s[v]);
            }
            const double scale = std::max({std::fabs(lhs), mass, 1e-300});
            worst = std::max(worst, std::fabs(lhs - rhs) / scale);
            ++checks;
          }
        }
      }
    }
  }
  return {worst <= 1e-10, std::to_string(checks) + " identities; max rel " + fmt(worst)};
}

// 3. A path followed by its reversal has trivial signature.
Outcome tree_like_suite() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 2;
    const auto p = oracle::random_path(rng, d, 4 + static_cast<std::size_t>(i % 8));
    const auto loop = concat_paths(p, reverse_path(p));
    worst = std::max(worst, path_signature(loop, 5).max_abs_above_level0());
  }
  return {worst <= 1e-10, "50 paths, level 5; max |coeff| " + fmt(worst)};
}

// 4. Linear functional on the signature vs. nested quadrature.
Outcome polynomial_suite() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> nforms(1, 3);
  std::uniform_int_distribution<int> nterms(1, 3);
  std::uniform_int_distribution<int> deg(0, 2);
  std::uniform_int_distribution<int> letter(1, 2);
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::vector<PolynomialOneForm> forms;
    std::vector<OneFormPtr> ptrs;
    const int n = nforms(rng);
    for (int k = 0; k < n; ++k) {
      std::vector<Monomial> terms;
      const int nt = nterms(rng);
      for (int m = 0; m < nt; ++m) {
        const int total = deg(rng);
        const int a1 = std::uniform_int_distribution<int>(0, total)(rng);
        terms.push_back({coeff(rng), {a1, total - a1}, letter(rng)});
      }
      forms.emplace_back(2, terms);
      ptrs.push_back(std::make_shared<PolynomialOneForm>(forms.back()));
    }
    const int L = required_level(forms);
    const auto fn = polynomial_functional(forms, L);
    const auto p = oracle::random_unit_box_path(rng, 2, 3 + static_cast<std::size_t>(i % 5));
    worst = std::max(worst, oracle::rel_diff(fn(path_signature(p, L)), extended_signature(p, ptrs).to_double()));
  }
  return {worst <= 1e-6, "20 paths; max rel " + fmt(worst)};
}

// 5. Factorization of the true word and vanishing of its neighbours.
struct FactorCheck {
  double factorization = 0.0; ///< |V - prod S_k| / |prod S_k|
  double oracle_mass = 0.0;   ///< max_k |S_k - G_k| / M_k
  double oracle_rel = 0.0;    ///< |V - prod G_k| / |prod G_k|
  std::size_t factors = 0;
  std::size_t strict_factors = 0; ///< |S_k - G_k| <= 1e-6 |G_k|
  std::size_t neighbours = 0;
  std::size_t nonzero_neighbours = 0;
  std::size_t over_threshold = 0;
};

FactorCheck check_factorization(const PiecewiseLinearPath& x, const ReconstructionConfig& cfg) {
  FactorCheck out;
  const CubeLattice& lat = cfg.lattice;
  const VisitRecord rec = visit_sequence(x, lat);
  const ExtReal v = word_extended_signature(x, rec.word, lat);

  ExtReal prod_s(1.0);
  ExtReal prod_g(1.0);
  for (std::size_t k = 0; k <= rec.count(); ++k) {
    const double a = k == 0 ? 0.0 : rec.times[k - 1];
    const double b = k == rec.count() ? 1.0 : rec.times[k];
    const BumpOneForm f(lat.center(rec.word[k]), lat.half_width());
    const std::vector<OneFormPtr> one{std::make_shared<BumpOneForm>(f)};
    const ExtReal s = extended_signature(x, one, a, b).value;
    const auto g = oracle::bump_interval_integral(x, f, a, b);
    prod_s *= s;
    prod_g *= g.value;
    ++out.factors;
    if (!g.mass.is_zero()) {
      out.oracle_mass = std::max(out.oracle_mass, ((s - g.value).abs() / g.mass).to_double());
    }
    if (oracle::rel_diff(s, g.value) <= 1e-6) {
      ++out.strict_factors;
    }
  }
  out.factorization = prod_s.is_zero() ? INFINITY : oracle::rel_diff(v, prod_s);
  out.oracle_rel = prod_g.is_zero() ? INFINITY : oracle::rel_diff(v, prod_g);

  // All candidate cubes, so that substitutions and insertions range over the
  // whole candidate box.
  const double reach = cfg.candidate_radius + lat.half_width();
  const long zmax = static_cast<long>(std::floor(reach / lat.epsilon()));
  std::vector<LatticePoint> cubes;
  for (long a = -zmax; a <= zmax; ++a) {
    for (long b = -zmax; b <= zmax; ++b) {
      cubes.push_back({a, b});
    }
  }
  std::vector<OneFormPtr> forms;
  for (const auto& z : cubes) {
    forms.push_back(lat.bump_form(z));
  }
  auto index_of = [&](const LatticePoint& z) {
    return static_cast<std::size_t>((z[0] + zmax) * (2 * zmax + 1) + (z[1] + zmax));
  };
  const IteratedIntegrator I(x, forms, 0.0, 1.0, {});
  std::vector<std::size_t> seq;
  for (const auto& z : rec.word.letters()) {
    seq.push_back(index_of(z));
  }
  const std::size_t n = seq.size();
  std::vector<IteratedIntegrator::Level> fwd{I.unit()};
  for (std::size_t k : seq) {
    fwd.push_back(I.extend(fwd.back(), k));
  }
  std::vector<IteratedIntegrator::Level> bwd(n + 1, I.unit());
  for (std::size_t k = n; k-- > 0;) {
    bwd[k] = I.extend_backward(bwd[k + 1], seq[k]);
  }
  const double sup = forms.front()->sup_norm();
  const double len = x.polygonal_length();
  auto record = [&](const ExtReal& w, std::size_t letters) {
    ++out.neighbours;
    if (!w.is_zero()) {
      ++out.nonzero_neighbours;
    }
    if (!abs_less(w, cfg.zero(letters, sup, len))) {
      ++out.over_threshold;
    }
  };
  // Substitution at position p: prefix fwd[p], suffix bwd[p + 1].
  for (std::size_t p = 1; p < n; ++p) {
    for (std::size_t c = 0; c < forms.size(); ++c) {
      if (c == seq[p] || c == seq[p - 1] || (p + 1 < n && c == seq[p + 1])) {
        continue;
      }
      record(I.combine(fwd[p], c, bwd[p + 1]), n);
    }
  }
  // Insertion after position p (p = n - 1 appends): prefix fwd[p + 1],
  // suffix bwd[p + 1].
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t c = 0; c < forms.size(); ++c) {
      if (c == seq[p] || (p + 1 < n && c == seq[p + 1])) {
        continue;
      }
      record(I.combine(fwd[p + 1], c, bwd[p + 1]), n + 1);
    }
  }
  return out;
}

Outcome factorization_suite() {
  ReconstructionConfig cfg;
  const double s = cfg.lattice.epsilon();
  auto scaled = [&](std::vector<Point> v) {
    for (auto& p : v) {
      for (double& c : p) {
        c *= s;
      }
    }
    return PiecewiseLinearPath::polyline(v);
  };
  std::vector<Point> spiral;
  for (int k = 1; k <= 200; ++k) {
    const double t = k / 200.0;
    spiral.push_back({2.2 * t * std::cos(5.0 * M_PI * t), 2.2 * t * std::sin(5.0 * M_PI * t)});
  }
  const std::vector<PiecewiseLinearPath> fixtures{
      scaled({{2.0, 0.0}}),                               // straight line
      scaled({{0.5, 0.0}, {0.5, 0.9}, {0.5, -0.3}}),      // tunnel-confined
      scaled({{0.5, 0.5}, {1.0, 1.0}}),                   // through a tunnel corner
      scaled({{1.0, 0.2}, {0.0, -0.2}, {1.2, 0.1}}),      // there and back again
      scaled(spiral)};                                    // many cubes

  bool ok = true;
  double worst_fact = 0.0;
  double worst_mass = 0.0;
  double worst_fixture_rel = 0.0;
  std::size_t factors = 0;
  std::size_t strict = 0;
  std::size_t strict_paths = 0;
  std::size_t neighbours = 0;
  std::size_t nonzero = 0;
  std::size_t over = 0;
  auto absorb = [&](const FactorCheck& c) {
    worst_fact = std::max(worst_fact, c.factorization);
    worst_mass = std::max(worst_mass, c.oracle_mass);
    factors += c.factors;
    strict += c.strict_factors;
    neighbours += c.neighbours;
    nonzero += c.nonzero_neighbours;
    over += c.over_threshold;
    ok = ok && c.factorization <= 1e-6 && c.oracle_mass <= 1e-6 && c.over_threshold == 0;
  };
  for (const auto& f : fixtures) {
    const auto c = check_factorization(f, cfg);
    absorb(c);
    worst_fixture_rel = std::max(worst_fixture_rel, c.oracle_rel);
    ok = ok && c.oracle_rel <= 1e-6;
  }
  GaussianModel m;
  const GaussianSampler sampler(m);
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto c = check_factorization(sampler.sample(trial_seed(505, t)), cfg);
    absorb(c);
    strict_paths += c.oracle_rel <= 1e-6 ? 1 : 0;
  }
  return {ok, "5 fixtures + 50 BM; rel |V - prod S| " + fmt(worst_fact) + "; fixtures |V - prod GK| rel " +
                  fmt(worst_fixture_rel) + "; |S - GK| / mass " + fmt(worst_mass) + " (" +
                  std::to_string(strict) + "/" + std::to_string(factors) + " factors and " +
                  std::to_string(strict_paths) + "/50 BM words within 1e-6 of GK relative); " +
                  std::to_string(over) + "/" + std::to_string(neighbours) + " neighbours >= tau_zero (" +
                  std::to_string(nonzero) + " not exactly 0)"};
}

// 6. Recovered word equals the geometric visit word.
Outcome recovery_suite() {
  struct Case {
    std::string name;
    GaussianVariant v;
    double h;
  };
  const std::vector<Case> cases{{"bm", GaussianVariant::FBM, 0.5},
                                {"fbm0.3", GaussianVariant::FBM, 0.3},
                                {"fbm0.75", GaussianVariant::FBM, 0.75},
                                {"ou", GaussianVariant::OU, 0.5},
                                {"bridge", GaussianVariant::BRIDGE, 0.5}};
  const ReconstructionConfig cfg;
  bool ok = true;
  std::string detail;
  std::uint64_t base = 600;
  for (const auto& c : cases) {
    GaussianModel m;
    m.variant = c.v;
    m.hurst = c.h;
    const GaussianSampler sampler(m);
    std::size_t agree = 0;
    std::size_t ambiguous = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto x = sampler.sample(trial_seed(base, t));
      try {
        const auto r = recover_word(PathWordOracle(x, cfg), cfg);
        agree += r.word == visit_sequence(x, cfg.lattice).word ? 1 : 0;
      } catch (const AmbiguousRecovery&) {
        ++ambiguous;
      } catch (const SearchBudgetExceeded&) {
        ++ambiguous;
      }
    }
    ++base;
    ok = ok && agree >= 99;
    detail += (detail.empty() ? "" : ", ") + c.name + " " + std::to_string(agree) + "/100";
    if (ambiguous > 0) {
      detail += " (" + std::to_string(ambiguous) + " ambiguous)";
    }
  }
  return {ok, detail};
}

// 7. Polygonal approximation error against the tunnel bound.
Outcome convergence_suite() {
  ConvergenceConfig cc;
  cc.model.seed = 707;
  cc.n_list = {4, 8, 16, 32};
  cc.delta_ratio = 0.1;
  cc.trials = 200;
  const auto r = convergence_study(cc);
  bool ok = r.median_strictly_decreasing();
  std::string detail;
  for (const auto& lv : r.levels) {
    ok = ok && lv.violation_fraction <= 0.05;
    detail += (detail.empty() ? "n=" : ", n=") + std::to_string(lv.n) + " median " + fmt(lv.median) +
              " within " + fmt(100.0 * (1.0 - lv.violation_fraction)) + "%";
  }
  return {ok, detail + (r.median_strictly_decreasing() ? "; median decreasing" : "; median NOT decreasing")};
}

// 8. Frechet-type distance.
Outcome frechet_suite() {
  const std::size_t res = 512;
  const FrechetConfig fc{res};
  GaussianModel m;
  const GaussianSampler sampler(m);
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> pw(0.3, 3.0);
  bool ok = true;
  double worst_reparam = 0.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto x = sampler.sample(trial_seed(808, i));
    const auto y = reparametrize(x, Reparametrization::power(pw(rng), 32), 2048);
    const double bound = 2.0 * std::max(mesh_oscillation(x, res), mesh_oscillation(y, res));
    const double d = frechet_variant(x, y, fc);
    worst_reparam = std::max(worst_reparam, d / bound);
    ok = ok && d <= bound && d == frechet_variant(y, x, fc);
  }
  double worst_triangle = -INFINITY;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto x = sampler.sample(trial_seed(809, 3 * i));
    const auto y = sampler.sample(trial_seed(809, 3 * i + 1));
    const auto z = sampler.sample(trial_seed(809, 3 * i + 2));
    const double slack = mesh_oscillation(x, res) + mesh_oscillation(y, res) + mesh_oscillation(z, res);
    const double gap = frechet_variant(x, z, fc) - frechet_variant(x, y, fc) - frechet_variant(y, z, fc);
    worst_triangle = std::max(worst_triangle, gap / slack);
    ok = ok && gap <= 2.0 * slack;
  }
  const PiecewiseLinearPath a({0.0, 1.0}, {{0.0}, {1.0}});
  const PiecewiseLinearPath b({0.0, 0.5, 1.0}, {{0.0}, {1.0}, {1.0}});
  const double disc = mesh_oscillation(a, res) + mesh_oscillation(b, res);
  const double dab = frechet_variant(a, b, fc);
  ok = ok && dab <= disc;
  return {ok, "reparam d / bound max " + fmt(worst_reparam) + "; triangle excess / slack max " +
                  fmt(worst_triangle) + "; degenerate pair " + fmt(dab) + " <= " + fmt(disc)};
}

// 9. Sampler covariances against the closed forms.
Outcome sampler_suite() {
  struct Case {
    std::string name;
    GaussianVariant v;
    double h;
  };
  const std::vector<Case> cases{{"bm", GaussianVariant::FBM, 0.5},
                                {"fbm0.3", GaussianVariant::FBM, 0.3},
                                {"fbm0.75", GaussianVariant::FBM, 0.75},
                                {"ou", GaussianVariant::OU, 0.5},
                                {"bridge", GaussianVariant::BRIDGE, 0.5}};
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  const std::size_t N = 10000;
  bool ok = true;
  double worst = 0.0;
  std::uint64_t base = 900;
  for (const auto& c : cases) {
    GaussianModel m;
    m.variant = c.v;
    m.hurst = c.h;
    m.dim = 1;
    const GaussianSampler s(m, grid);
    double acc[5][5] = {};
    double inc[5][5] = {};
    for (std::size_t n = 0; n < N; ++n) {
      const auto x = s.sample(trial_seed(base, n));
      for (std::size_t i = 1; i < 5; ++i) {
        for (std::size_t j = 1; j < 5; ++j) {
          acc[i][j] += x.point(i)[0] * x.point(j)[0];
          const double d = x.point(j)[0] - x.point(i)[0];
          inc[i][j] += d * d;
        }
      }
    }
    ++base;
    for (std::size_t i = 1; i < 5; ++i) {
      for (std::size_t j = 1; j < 5; ++j) {
        const double r = covariance(m, grid[i], grid[j]);
        const double se = std::sqrt((covariance(m, grid[i], grid[i]) * covariance(m, grid[j], grid[j]) + r * r) / N);
        const double dev = std::fabs(acc[i][j] / N - r);
        ok = ok && dev <= 5.0 * se;
        if (se > 0.0) {
          worst = std::max(worst, dev / se);
        }
        if (c.v == GaussianVariant::FBM && i < j) {
          const double var = std::pow(grid[j] - grid[i], 2.0 * c.h);
          const double se2 = var * std::sqrt(2.0 / N);
          const double dev2 = std::fabs(inc[i][j] / N - var);
          ok = ok && dev2 <= 5.0 * se2;
          worst = std::max(worst, dev2 / se2);
        }
      }
    }
  }
  return {ok, "5 models x 1e4 samples on a 4-point grid; max deviation " + fmt(worst) + " SE"};
}

// 10. Finite-difference x^2-derivative of phi_1 is nonzero off the slice and
// flips sign across it.
Outcome bump_suite() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> cu(-2.0, 2.0);
  std::uniform_real_distribution<double> eu(0.05, 0.6);
  bool ok = true;
  double smallest_inner = INFINITY;
  std::size_t full_checked = 0;
  std::size_t full_small = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + trial % 2;
    std::vector<double> c(static_cast<std::size_t>(d));
    for (double& v : c) {
      v = cu(rng);
    }
    const double eta = eu(rng);
    const BumpOneForm f(c, eta);
    const double h = 1e-6 * eta;
    auto fd = [&](std::vector<double> x) {
      auto xp = x;
      auto xm = x;
      xp[1] += h;
      xm[1] -= h;
      return (f.component(0, xp) - f.component(0, xm)) / (2.0 * h);
    };
    for (int inner : {1, 0}) {
      const double r = inner ? 0.9 : 1.0;
      std::uniform_real_distribution<double> tu(-r, r);
      for (int k = 0; k < 1000; ++k) {
        std::vector<double> x(c.size());
        double t2 = 0.0;
        do {
          for (std::size_t i = 0; i < c.size(); ++i) {
            x[i] = c[i] + eta * tu(rng);
          }
          t2 = (x[1] - c[1]) / eta;
        } while (std::fabs(t2) < 1e-3 || std::fabs(t2) > r - 2e-6);
        auto mirror = x;
        mirror[1] = 2.0 * c[1] - x[1];
        const double g = fd(x);
        const double gm = fd(mirror);
        if (inner) {
          smallest_inner = std::min(smallest_inner, std::fabs(g));
          ok = ok && std::fabs(g) > 1e-12 && std::fabs(gm) > 1e-12 && (g > 0) != (gm > 0) && (g > 0) == (t2 < 0);
        } else {
          // Near the boundary phi_1 underflows; whenever the analytic partial
          // is resolvable the difference quotient must agree in sign.
          ++full_checked;
          const double a = f.partial(0, 1, x);
          if (std::fabs(a) <= 1e-12) {
            ++full_small;
            continue;
          }
          ok = ok && (g > 0) == (a > 0) && (g > 0) == (t2 < 0);
        }
      }
    }
  }
  return {ok, "5 forms x 1000 points in |t| <= 0.9: min |d phi_1 / dx^2| " + fmt(smallest_inner) +
                  "; whole cube: " + std::to_string(full_small) + "/" + std::to_string(full_checked) +
                  " points below 1e-12, rest sign-consistent"};
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"chen-associativity", chen_suite},
      {"shuffle-identity", shuffle_suite},
      {"tree-like-cancellation", tree_like_suite},
      {"polynomial-functional", polynomial_suite},
      {"factorization-vanishing", factorization_suite},
      {"word-recovery", recovery_suite},
      {"approximation-bound", convergence_suite},
      {"frechet-variant", frechet_suite},
      {"gaussian-samplers", sampler_suite},
      {"bump-nondegeneracy", bump_suite}};
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %-24s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
    ++index;
  }
  return failures == 0 ? 0 : 1;
}
