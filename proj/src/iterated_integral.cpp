#include "sigrecover/iterated_integral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sigrecover {

namespace {

int clamp_shift(std::int64_t s) {
  return static_cast<int>(std::clamp<std::int64_t>(s, -4000, 4000));
}

// 2^k as a normal double, or 0 when k is out of that range. Multiplying by it
// rounds exactly like ldexp but is far cheaper in inner loops.
double pow2_factor(int k) { return k >= -1022 && k <= 1023 ? std::ldexp(1.0, k) : 0.0; }

// Composite Simpson on all 2k+1 nodes against the coarser rule on every
// other node (Simpson for even k, trapezoid otherwise), per unit width.
struct SimpsonCheck {
  double difference;
  double mass; ///< Simpson integral of |g|
};

SimpsonCheck simpson_check(const std::vector<double>& g) {
  const std::size_t k = (g.size() - 1) / 2;
  double fine = 0.0;
  double mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    fine += g[2 * i] + 4.0 * g[2 * i + 1] + g[2 * i + 2];
    mass += std::fabs(g[2 * i]) + 4.0 * std::fabs(g[2 * i + 1]) + std::fabs(g[2 * i + 2]);
  }
  fine /= 6.0 * static_cast<double>(k);
  mass /= 6.0 * static_cast<double>(k);
  double coarse = 0.0;
  if (k % 2 == 0) {
    for (std::size_t i = 0; i < k / 2; ++i) {
      coarse += g[4 * i] + 4.0 * g[4 * i + 2] + g[4 * i + 4];
    }
    coarse /= 3.0 * static_cast<double>(k);
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      coarse += g[2 * i] + g[2 * i + 2];
    }
    coarse /= 2.0 * static_cast<double>(k);
  }
  return {std::fabs(fine - coarse), mass};
}

} // namespace

std::optional<LineInterval> line_box_interval(std::span<const double> p,
                                              std::span<const double> dir,
                                              std::span<const double> lower,
                                              std::span<const double> upper, bool open) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (dir[i] == 0.0) {
      const bool inside = open ? (p[i] > lower[i] && p[i] < upper[i])
                               : (p[i] >= lower[i] && p[i] <= upper[i]);
      if (!inside) {
        return std::nullopt;
      }
      continue;
    }
    double a = (lower[i] - p[i]) / dir[i];
    double b = (upper[i] - p[i]) / dir[i];
    if (a > b) {
      std::swap(a, b);
    }
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  if (open ? !(lo < hi) : !(lo <= hi)) {
    return std::nullopt;
  }
  return LineInterval{lo, hi};
}

IteratedIntegrator::IteratedIntegrator(const PiecewiseLinearPath& path,
                                       std::vector<OneFormPtr> forms, double s, double t,
                                       QuadratureOptions options)
    : substeps_(options.substeps), forms_(std::move(forms)) {
  if (substeps_ < 1) {
    throw std::invalid_argument("integrator: substeps must be >= 1");
  }
  if (options.max_bisections < 0) {
    throw std::invalid_argument("integrator: max_bisections must be >= 0");
  }
  if (!(s >= 0.0 && s < t && t <= 1.0)) {
    throw std::invalid_argument("integrator: need 0 <= s < t <= 1");
  }
  const int d = path.dim();
  std::vector<std::optional<Box>> supports;
  supports.reserve(forms_.size());
  for (const auto& f : forms_) {
    if (!f) {
      throw std::invalid_argument("integrator: null one-form");
    }
    if (f->dim() != d) {
      throw std::invalid_argument("integrator: form dimension " + std::to_string(f->dim()) +
                                  " != path dimension " + std::to_string(d));
    }
    supports.push_back(f->support());
  }
  tracks_.resize(forms_.size());

  std::vector<double> cuts;
  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<ExtReal> vals;

  for (std::size_t seg = 0; seg < path.segments(); ++seg) {
    const double t0 = path.time(seg);
    const double t1 = path.time(seg + 1);
    const double a = std::max(t0, s);
    const double b = std::min(t1, t);
    if (!(a < b)) {
      continue;
    }
    const auto p0 = path.point(seg);
    const Point delta = path.increment(seg);
    std::vector<double> velocity(delta.size());
    for (std::size_t k = 0; k < delta.size(); ++k) {
      velocity[k] = delta[k] / (t1 - t0);
    }
    auto point_at = [&](double u, std::span<double> out) {
      const double lam = (u - t0) / (t1 - t0);
      for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = p0[k] + lam * delta[k];
      }
    };

    // Which forms can be nonzero here, and where the segment crosses their
    // support boundaries.
    cuts.assign({a, b});
    std::vector<std::size_t> candidates;
    std::vector<std::pair<double, double>> crossing(forms_.size(), {-1.0, -1.0});
    for (std::size_t f = 0; f < forms_.size(); ++f) {
      if (!supports[f]) {
        candidates.push_back(f);
        continue;
      }
      auto iv = line_box_interval(p0, delta, supports[f]->lower, supports[f]->upper, false);
      if (!iv) {
        continue;
      }
      const double ua = t0 + iv->lo * (t1 - t0);
      const double ub = t0 + iv->hi * (t1 - t0);
      if (ub <= a || ua >= b) {
        continue;
      }
      candidates.push_back(f);
      crossing[f] = {ua, ub};
      if (ua > a) {
        cuts.push_back(ua);
      }
      if (ub < b) {
        cuts.push_back(ub);
      }
    }
    if (candidates.empty()) {
      continue;
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Scaled integrand of form f at the 2k+1 nodes of [u0, u1].
    auto sample_piece = [&](std::size_t f, double u0, double u1, int k, FormPiece& fp) {
      const std::size_t nodes = 2 * static_cast<std::size_t>(k) + 1;
      vals.resize(nodes);
      const double h = (u1 - u0) / (2.0 * k);
      for (std::size_t n = 0; n < nodes; ++n) {
        const double u = (n + 1 == nodes) ? u1 : u0 + h * static_cast<double>(n);
        point_at(u, x);
        vals[n] = forms_[f]->pair(x, velocity);
      }
      if (forms_[f]->vanishes_on_boundary()) {
        if (u0 == crossing[f].first) {
          vals.front() = ExtReal();
        }
        if (u1 == crossing[f].second) {
          vals.back() = ExtReal();
        }
      }
      std::int64_t emax = std::numeric_limits<std::int64_t>::min();
      for (const auto& v : vals) {
        if (!v.is_zero()) {
          emax = std::max(emax, v.exponent());
        }
      }
      if (emax == std::numeric_limits<std::int64_t>::min()) {
        return false;
      }
      fp.scale = emax;
      fp.integrand.resize(nodes);
      for (std::size_t n = 0; n < nodes; ++n) {
        fp.integrand[n] =
            vals[n].is_zero() ? 0.0
                              : std::ldexp(vals[n].mantissa(), clamp_shift(vals[n].exponent() - emax));
      }
      return true;
    };

    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double u0 = cuts[c];
      const double u1 = cuts[c + 1];
      if (!(u1 > u0)) {
        continue;
      }
      point_at(0.5 * (u0 + u1), x);
      std::vector<std::size_t> covering;
      for (std::size_t f : candidates) {
        if (!supports[f] || supports[f]->contains(x)) {
          covering.push_back(f);
        }
      }
      if (covering.empty()) {
        continue;
      }
      // Bisect until on every leaf and for every covering form the Simpson
      // sum is stable under halving the step count, relative to the form's
      // mass on the whole stretch. Resolution then concentrates where a
      // grazed bump is sharply peaked.
      std::vector<ExtReal> ref_mass(covering.size());
      struct Span {
        double u0;
        double u1;
        int depth;
      };
      std::vector<Span> stack{{u0, u1, 0}};
      std::vector<std::pair<std::size_t, FormPiece>> sampled;
      bool top = true;
      while (!stack.empty()) {
        const Span sp = stack.back();
        stack.pop_back();
        sampled.clear();
        bool stable = true;
        for (std::size_t ci = 0; ci < covering.size(); ++ci) {
          const std::size_t f = covering[ci];
          FormPiece fp;
          if (!sample_piece(f, sp.u0, sp.u1, substeps_, fp)) {
            continue;
          }
          if (options.adaptive_tolerance > 0.0) {
            const SimpsonCheck chk = simpson_check(fp.integrand);
            const double w = sp.u1 - sp.u0;
            if (top) {
              ref_mass[ci] = ExtReal::from_parts(chk.mass * w, fp.scale);
            }
            const ExtReal err = ExtReal::from_parts(chk.difference * w, fp.scale);
            if (abs_less(ExtReal(options.adaptive_tolerance) * ref_mass[ci], err)) {
              stable = false;
            }
          }
          sampled.emplace_back(f, std::move(fp));
        }
        top = false;
        const double mid = 0.5 * (sp.u0 + sp.u1);
        if (!stable && sp.depth < options.max_bisections && mid > sp.u0 && mid < sp.u1) {
          stack.push_back({mid, sp.u1, sp.depth + 1});
          stack.push_back({sp.u0, mid, sp.depth + 1});
          continue;
        }
        if (sampled.empty()) {
          continue;
        }
        const std::size_t piece = pieces_.size();
        pieces_.push_back({sp.u0, sp.u1, substeps_});
        for (auto& [f, fp] : sampled) {
          fp.piece = piece;
          tracks_[f].push_back(std::move(fp));
        }
      }
    }
  }
}

IteratedIntegrator::Level IteratedIntegrator::unit() const {
  Level l;
  l.initial = ExtReal(1.0);
  l.final = l.initial;
  return l;
}

namespace {

// A level restricted to one piece: either its node values or a constant.
struct PieceView {
  const double* values = nullptr;
  double constant = 0.0;
  std::int64_t scale = 0;

  double operator[](std::size_t n) const { return values ? values[n] : constant; }
  bool is_zero() const { return !values && constant == 0.0; }
};

PieceView constant_view(const ExtReal& v) {
  return {nullptr, v.mantissa(), v.is_zero() ? 0 : v.exponent()};
}

// Visits pieces in increasing order.
class ForwardCursor {
public:
  explicit ForwardCursor(const IteratedIntegrator::Level& l) : l_(l), gap_(l.initial) {}

  PieceView at(std::size_t piece) {
    while (pos_ < l_.active.size() && l_.active[pos_].piece < piece) {
      const auto& ap = l_.active[pos_];
      gap_ = ExtReal::from_parts(ap.values.back(), ap.scale);
      ++pos_;
    }
    if (pos_ < l_.active.size() && l_.active[pos_].piece == piece) {
      const auto& ap = l_.active[pos_];
      return {ap.values.data(), 0.0, ap.scale};
    }
    return constant_view(gap_);
  }

private:
  const IteratedIntegrator::Level& l_;
  std::size_t pos_ = 0;
  ExtReal gap_;
};

// Visits pieces in decreasing order.
class BackwardCursor {
public:
  explicit BackwardCursor(const IteratedIntegrator::Level& l)
      : l_(l), pos_(l.active.size()), gap_(l.final) {}

  PieceView at(std::size_t piece) {
    while (pos_ > 0 && l_.active[pos_ - 1].piece > piece) {
      const auto& ap = l_.active[pos_ - 1];
      gap_ = ExtReal::from_parts(ap.values.front(), ap.scale);
      --pos_;
    }
    if (pos_ > 0 && l_.active[pos_ - 1].piece == piece) {
      const auto& ap = l_.active[pos_ - 1];
      return {ap.values.data(), 0.0, ap.scale};
    }
    return constant_view(gap_);
  }

private:
  const IteratedIntegrator::Level& l_;
  std::size_t pos_;
  ExtReal gap_;
};

// values = carry + cum * 2^gscale, stored with a common binary scale.
IteratedIntegrator::ActivePiece make_active(std::size_t piece, const ExtReal& carry,
                                            const std::vector<double>& cum, double cmax,
                                            std::int64_t gscale) {
  int ce = 0;
  std::frexp(cmax, &ce);
  std::int64_t scale = gscale + ce;
  if (!carry.is_zero()) {
    scale = std::max(scale, carry.exponent());
  }
  IteratedIntegrator::ActivePiece ap{piece, scale, std::vector<double>(cum.size())};
  const double cm =
      carry.is_zero() ? 0.0 : std::ldexp(carry.mantissa(), clamp_shift(carry.exponent() - scale));
  const int shift = clamp_shift(gscale - scale);
  const double f = pow2_factor(shift);
  double vmax = 0.0;
  for (std::size_t n = 0; n < cum.size(); ++n) {
    ap.values[n] = cm + (f != 0.0 ? cum[n] * f : std::ldexp(cum[n], shift));
    vmax = std::max(vmax, std::fabs(ap.values[n]));
  }
  if (vmax > 0.0) {
    int ve = 0;
    std::frexp(vmax, &ve);
    const double g = pow2_factor(-ve);
    for (double& v : ap.values) {
      v = g != 0.0 ? v * g : std::ldexp(v, -ve);
    }
    ap.scale += ve;
  }
  return ap;
}

} // namespace

IteratedIntegrator::Level IteratedIntegrator::extend(const Level& prev,
                                                     std::size_t form) const {
  if (form >= forms_.size()) {
    throw std::out_of_range("integrator: form index out of range");
  }
  Level out;
  if (prev.is_zero()) {
    return out;
  }
  std::vector<double> cum;
  ExtReal carry;
  ForwardCursor cursor(prev);

  for (const FormPiece& fp : tracks_[form]) {
    const PieceView pv = cursor.at(fp.piece);
    if (pv.is_zero()) {
      continue;
    }
    const std::int64_t gscale = pv.scale + fp.scale;
    const Piece& pc = pieces_[fp.piece];
    const double h = (pc.u1 - pc.u0) / static_cast<double>(pc.substeps);
    const double* f = fp.integrand.data();
    cum.resize(fp.integrand.size());
    cum[0] = 0.0;
    double cmax = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(pc.substeps); ++k) {
      const std::size_t ia = 2 * k;
      const double ga = pv[ia] * f[ia];
      const double gm = pv[ia + 1] * f[ia + 1];
      const double gb = pv[ia + 2] * f[ia + 2];
      // Simpson over [a, b]; the midpoint value integrates the quadratic
      // interpolant over the first half.
      cum[ia + 1] = cum[ia] + h / 24.0 * (5.0 * ga + 8.0 * gm - gb);
      cum[ia + 2] = cum[ia] + h / 6.0 * (ga + 4.0 * gm + gb);
      cmax = std::max({cmax, std::fabs(cum[ia + 1]), std::fabs(cum[ia + 2])});
    }
    if (cmax == 0.0) {
      continue;
    }
    out.active.push_back(make_active(fp.piece, carry, cum, cmax, gscale));
    const auto& ap = out.active.back();
    carry = ExtReal::from_parts(ap.values.back(), ap.scale);
  }
  out.final = carry;
  return out;
}

IteratedIntegrator::Level IteratedIntegrator::extend_backward(const Level& next,
                                                              std::size_t form) const {
  if (form >= forms_.size()) {
    throw std::out_of_range("integrator: form index out of range");
  }
  Level out;
  if (next.is_zero()) {
    return out;
  }
  std::vector<double> cum;
  ExtReal carry;
  BackwardCursor cursor(next);
  const auto& track = tracks_[form];

  for (auto it = track.rbegin(); it != track.rend(); ++it) {
    const FormPiece& fp = *it;
    const PieceView pv = cursor.at(fp.piece);
    if (pv.is_zero()) {
      continue;
    }
    const std::int64_t gscale = pv.scale + fp.scale;
    const Piece& pc = pieces_[fp.piece];
    const double h = (pc.u1 - pc.u0) / static_cast<double>(pc.substeps);
    const double* f = fp.integrand.data();
    cum.resize(fp.integrand.size());
    cum.back() = 0.0;
    double cmax = 0.0;
    for (std::size_t k = static_cast<std::size_t>(pc.substeps); k-- > 0;) {
      const std::size_t ia = 2 * k;
      const double ga = pv[ia] * f[ia];
      const double gm = pv[ia + 1] * f[ia + 1];
      const double gb = pv[ia + 2] * f[ia + 2];
      cum[ia + 1] = cum[ia + 2] + h / 24.0 * (5.0 * gb + 8.0 * gm - ga);
      cum[ia] = cum[ia + 2] + h / 6.0 * (ga + 4.0 * gm + gb);
      cmax = std::max({cmax, std::fabs(cum[ia + 1]), std::fabs(cum[ia])});
    }
    if (cmax == 0.0) {
      continue;
    }
    out.active.push_back(make_active(fp.piece, carry, cum, cmax, gscale));
    const auto& ap = out.active.back();
    carry = ExtReal::from_parts(ap.values.front(), ap.scale);
  }
  std::reverse(out.active.begin(), out.active.end());
  out.initial = carry;
  return out;
}

ExtReal IteratedIntegrator::combine(const Level& prefix, std::size_t form,
                                    const Level& suffix) const {
  if (form >= forms_.size()) {
    throw std::out_of_range("integrator: form index out of range");
  }
  if (prefix.is_zero() || suffix.is_zero()) {
    return {};
  }
  ForwardCursor pc(prefix);
  ForwardCursor sc(suffix);
  ExtReal total;
  for (const FormPiece& fp : tracks_[form]) {
    const PieceView a = pc.at(fp.piece);
    const PieceView b = sc.at(fp.piece);
    if (a.is_zero() || b.is_zero()) {
      continue;
    }
    const Piece& piece = pieces_[fp.piece];
    const double h = (piece.u1 - piece.u0) / static_cast<double>(piece.substeps);
    const double* f = fp.integrand.data();
    double sum = 0.0;
    const std::size_t nodes = fp.integrand.size();
    for (std::size_t n = 0; n < nodes; ++n) {
      const double w = (n == 0 || n + 1 == nodes) ? 1.0 : (n % 2 == 1 ? 4.0 : 2.0);
      sum += w * a[n] * b[n] * f[n];
    }
    if (sum != 0.0) {
      total = total + ExtReal::from_parts(sum * h / 6.0, a.scale + b.scale + fp.scale);
    }
  }
  return total;
}

ExtReal IteratedIntegrator::evaluate(std::span<const std::size_t> sequence) const {
  Level l = unit();
  for (std::size_t f : sequence) {
    l = extend(l, f);
    if (l.is_zero()) {
      return {};
    }
  }
  return l.final;
}

namespace {

ExtReal integrate_once(const PiecewiseLinearPath& path, std::span<const OneFormPtr> forms,
                       double s, double t, QuadratureOptions options) {
  std::vector<OneFormPtr> unique;
  std::vector<std::size_t> seq;
  std::map<const OneForm*, std::size_t> index;
  for (const auto& f : forms) {
    auto [it, inserted] = index.emplace(f.get(), unique.size());
    if (inserted) {
      unique.push_back(f);
    }
    seq.push_back(it->second);
  }
  IteratedIntegrator integ(path, std::move(unique), s, t, options);
  return integ.evaluate(seq);
}

} // namespace

IteratedIntegral extended_signature(const PiecewiseLinearPath& path,
                                    std::span<const OneFormPtr> forms, double s, double t,
                                    QuadratureOptions options) {
  if (forms.empty()) {
    throw std::invalid_argument("extended_signature: empty form list");
  }
  IteratedIntegral r;
  r.substeps = options.substeps;
  if (s == t) {
    return r;
  }
  r.value = integrate_once(path, forms, s, t, options);
  if (options.estimate_error) {
    QuadratureOptions coarse = options;
    coarse.substeps = std::max(1, options.substeps / 2);
    const ExtReal v2 = integrate_once(path, forms, s, t, coarse);
    r.error_estimate = std::fabs((r.value - v2).to_double());
  }
  return r;
}

} // namespace sigrecover
