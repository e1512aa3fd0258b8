#include "sigrecover/paths.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sigrecover {

PiecewiseLinearPath::PiecewiseLinearPath(std::vector<double> times,
                                         std::vector<Point> points)
    : dim_(0), times_(std::move(times)) {
  if (times_.size() != points.size()) {
    throw std::invalid_argument("path: " + std::to_string(times_.size()) + " times but " +
                                std::to_string(points.size()) + " points");
  }
  if (times_.size() < 2) {
    throw std::invalid_argument("path: need at least two knots");
  }
  if (times_.front() != 0.0 || times_.back() != 1.0) {
    throw std::invalid_argument("path: times must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("path: times not strictly increasing at knot " +
                                  std::to_string(i));
    }
  }
  dim_ = static_cast<int>(points.front().size());
  if (dim_ < 1) {
    throw std::invalid_argument("path: dimension must be >= 1");
  }
  coords_.reserve(points.size() * static_cast<std::size_t>(dim_));
  for (const auto& p : points) {
    if (static_cast<int>(p.size()) != dim_) {
      throw std::invalid_argument("path: inconsistent point dimension");
    }
    for (double v : p) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument("path: non-finite coordinate");
      }
      coords_.push_back(v);
    }
  }
}

PiecewiseLinearPath PiecewiseLinearPath::uniform(std::vector<Point> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    throw std::invalid_argument("path: need at least two knots");
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  t.back() = 1.0;
  return PiecewiseLinearPath(std::move(t), std::move(points));
}

PiecewiseLinearPath PiecewiseLinearPath::line(const Point& end) {
  return uniform({Point(end.size(), 0.0), end});
}

PiecewiseLinearPath
PiecewiseLinearPath::polyline(const std::vector<Point>& vertices_after_origin) {
  if (vertices_after_origin.empty()) {
    throw std::invalid_argument("polyline: need at least one vertex");
  }
  std::vector<Point> pts;
  pts.reserve(vertices_after_origin.size() + 1);
  pts.emplace_back(vertices_after_origin.front().size(), 0.0);
  pts.insert(pts.end(), vertices_after_origin.begin(), vertices_after_origin.end());
  return uniform(std::move(pts));
}

std::vector<Point> PiecewiseLinearPath::points() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    auto p = point(i);
    out.emplace_back(p.begin(), p.end());
  }
  return out;
}

std::size_t PiecewiseLinearPath::segment_of(double t) const {
  if (t <= 0.0) {
    return 0;
  }
  if (t >= 1.0) {
    return segments() - 1;
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

void PiecewiseLinearPath::at(double t, std::span<double> out) const {
  if (t < 0.0 || t > 1.0) {
    throw std::out_of_range("path: time " + std::to_string(t) + " outside [0,1]");
  }
  const std::size_t i = segment_of(t);
  const double t0 = times_[i];
  const double t1 = times_[i + 1];
  const double lam = (t - t0) / (t1 - t0);
  auto a = point(i);
  auto b = point(i + 1);
  for (int k = 0; k < dim_; ++k) {
    out[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] +
        lam * (b[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k)]);
  }
  if (lam == 1.0) {
    std::copy(b.begin(), b.end(), out.begin());
  }
}

Point PiecewiseLinearPath::at(double t) const {
  Point p(static_cast<std::size_t>(dim_));
  at(t, p);
  return p;
}

Point PiecewiseLinearPath::increment(std::size_t segment) const {
  auto a = point(segment);
  auto b = point(segment + 1);
  Point d(static_cast<std::size_t>(dim_));
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = b[k] - a[k];
  }
  return d;
}

Point PiecewiseLinearPath::total_increment() const {
  auto a = point(0);
  auto b = point(size() - 1);
  Point d(static_cast<std::size_t>(dim_));
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k] = b[k] - a[k];
  }
  return d;
}

double PiecewiseLinearPath::polygonal_length() const {
  double len = 0.0;
  for (std::size_t i = 0; i < segments(); ++i) {
    double s = 0.0;
    for (double v : increment(i)) {
      s += v * v;
    }
    len += std::sqrt(s);
  }
  return len;
}

bool PiecewiseLinearPath::starts_at_origin() const {
  auto p = point(0);
  return std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0; });
}

PiecewiseLinearPath PiecewiseLinearPath::translated(std::span<const double> c) const {
  if (static_cast<int>(c.size()) != dim_) {
    throw std::invalid_argument("translated: dimension mismatch");
  }
  auto pts = points();
  for (auto& p : pts) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      p[k] += c[k];
    }
  }
  return PiecewiseLinearPath(times_, std::move(pts));
}

PiecewiseLinearPath PiecewiseLinearPath::restricted(double s, double t) const {
  if (!(s >= 0.0 && s < t && t <= 1.0)) {
    throw std::invalid_argument("restricted: need 0 <= s < t <= 1");
  }
  std::vector<double> ts{0.0};
  std::vector<Point> ps{at(s)};
  for (std::size_t i = 0; i < size(); ++i) {
    if (times_[i] > s && times_[i] < t) {
      ts.push_back((times_[i] - s) / (t - s));
      auto p = point(i);
      ps.emplace_back(p.begin(), p.end());
    }
  }
  ts.push_back(1.0);
  ps.push_back(at(t));
  return PiecewiseLinearPath(std::move(ts), std::move(ps));
}

Reparametrization::Reparametrization(std::vector<double> knots_in,
                                     std::vector<double> knots_out)
    : in_(std::move(knots_in)), out_(std::move(knots_out)) {
  auto check = [](const std::vector<double>& k, const char* what) {
    if (k.size() < 2 || k.front() != 0.0 || k.back() != 1.0) {
      throw std::invalid_argument(std::string("reparametrization: ") + what +
                                  " knots must run from 0 to 1");
    }
    for (std::size_t i = 1; i < k.size(); ++i) {
      if (!(k[i] > k[i - 1])) {
        throw std::invalid_argument(std::string("reparametrization: ") + what +
                                    " knots not strictly increasing");
      }
    }
  };
  if (in_.size() != out_.size()) {
    throw std::invalid_argument("reparametrization: knot count mismatch");
  }
  check(in_, "input");
  check(out_, "output");
}

Reparametrization Reparametrization::identity() { return {{0.0, 1.0}, {0.0, 1.0}}; }

Reparametrization Reparametrization::power(double p, std::size_t n) {
  if (!(p > 0.0) || n < 1) {
    throw std::invalid_argument("reparametrization: power needs p > 0 and n >= 1");
  }
  std::vector<double> in(n + 1);
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    in[i] = static_cast<double>(i) / static_cast<double>(n);
    out[i] = std::pow(in[i], p);
  }
  in.back() = 1.0;
  out.back() = 1.0;
  return {std::move(in), std::move(out)};
}

namespace {
double interp_monotone(const std::vector<double>& xs, const std::vector<double>& ys,
                       double x) {
  if (x <= 0.0) {
    return 0.0;
  }
  if (x >= 1.0) {
    return 1.0;
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double lam = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + lam * (ys[i + 1] - ys[i]);
}
} // namespace

double Reparametrization::operator()(double t) const { return interp_monotone(in_, out_, t); }

double Reparametrization::inverse(double s) const { return interp_monotone(out_, in_, s); }

TensorSeries path_signature(const PiecewiseLinearPath& path, int level) {
  TensorSeries sig = unit_series(path.dim(), level);
  for (std::size_t i = 0; i < path.segments(); ++i) {
    const Point inc = path.increment(i);
    sig = concat(sig, segment_signature(inc, level));
  }
  return sig;
}

TensorSeries path_signature(const PiecewiseLinearPath& path, int level, double s,
                            double t) {
  if (!(s >= 0.0 && s <= t && t <= 1.0)) {
    throw std::invalid_argument("path_signature: need 0 <= s <= t <= 1");
  }
  if (s == t) {
    return unit_series(path.dim(), level);
  }
  return path_signature(path.restricted(s, t), level);
}

PiecewiseLinearPath reparametrize(const PiecewiseLinearPath& path,
                                  const Reparametrization& sigma, std::size_t n_out) {
  if (n_out < 2) {
    throw std::invalid_argument("reparametrize: n_out must be >= 2");
  }
  std::vector<double> ts;
  ts.reserve(n_out + path.size() + sigma.knots_in().size());
  for (std::size_t i = 0; i < n_out; ++i) {
    ts.push_back(static_cast<double>(i) / static_cast<double>(n_out - 1));
  }
  for (double tk : path.times()) {
    ts.push_back(sigma.inverse(tk));
  }
  std::sort(ts.begin(), ts.end());
  std::vector<double> uniq;
  uniq.reserve(ts.size());
  for (double t : ts) {
    if (uniq.empty() || t > uniq.back() + 1e-15) {
      uniq.push_back(t);
    }
  }
  uniq.front() = 0.0;
  if (uniq.back() < 1.0 - 1e-15) {
    uniq.push_back(1.0);
  }
  uniq.back() = 1.0;
  std::vector<Point> pts;
  pts.reserve(uniq.size());
  for (double t : uniq) {
    pts.push_back(path.at(sigma(t)));
  }
  return PiecewiseLinearPath(std::move(uniq), std::move(pts));
}

PiecewiseLinearPath concat_paths(const PiecewiseLinearPath& a,
                                 const PiecewiseLinearPath& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("concat_paths: dimension mismatch");
  }
  std::vector<double> ts;
  std::vector<Point> ps;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ts.push_back(0.5 * a.time(i));
    auto p = a.point(i);
    ps.emplace_back(p.begin(), p.end());
  }
  const Point end = ps.back();
  auto b0 = b.point(0);
  for (std::size_t i = 1; i < b.size(); ++i) {
    ts.push_back(0.5 + 0.5 * b.time(i));
    auto p = b.point(i);
    Point q(p.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      q[k] = end[k] + (p[k] - b0[k]);
    }
    ps.push_back(std::move(q));
  }
  ts.back() = 1.0;
  return PiecewiseLinearPath(std::move(ts), std::move(ps));
}

PiecewiseLinearPath reverse_path(const PiecewiseLinearPath& p) {
  const std::size_t n = p.size();
  std::vector<double> ts(n);
  std::vector<Point> ps(n);
  auto last = p.point(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    ts[i] = 1.0 - p.time(j);
    auto q = p.point(j);
    ps[i].resize(q.size());
    for (std::size_t k = 0; k < q.size(); ++k) {
      ps[i][k] = q[k] - last[k];
    }
  }
  ts.front() = 0.0;
  ts.back() = 1.0;
  return PiecewiseLinearPath(std::move(ts), std::move(ps));
}

double dyadic_pvariation_lower_bound(const PiecewiseLinearPath& x,
                                     const PiecewiseLinearPath& y, double p,
                                     int max_depth) {
  if (x.dim() != y.dim()) {
    throw std::invalid_argument("dyadic_pvariation_lower_bound: dimension mismatch");
  }
  if (!(p >= 1.0)) {
    throw std::invalid_argument("dyadic_pvariation_lower_bound: p must be >= 1");
  }
  const int top = static_cast<int>(std::floor(p));
  std::vector<double> best(static_cast<std::size_t>(top) + 1, 0.0);
  for (int depth = 0; depth <= max_depth; ++depth) {
    const std::size_t pieces = std::size_t{1} << depth;
    std::vector<double> sums(static_cast<std::size_t>(top) + 1, 0.0);
    for (std::size_t j = 0; j < pieces; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(pieces);
      const double t = static_cast<double>(j + 1) / static_cast<double>(pieces);
      const TensorSeries sx = path_signature(x, top, s, t);
      const TensorSeries sy = path_signature(y, top, s, t);
      for (int k = 1; k <= top; ++k) {
        auto a = sx.level_coeffs(k);
        auto b = sy.level_coeffs(k);
        double n2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
          n2 += (a[i] - b[i]) * (a[i] - b[i]);
        }
        sums[static_cast<std::size_t>(k)] += std::pow(std::sqrt(n2), p / k);
      }
    }
    for (int k = 1; k <= top; ++k) {
      best[static_cast<std::size_t>(k)] =
          std::max(best[static_cast<std::size_t>(k)],
                   std::pow(sums[static_cast<std::size_t>(k)], k / p));
    }
  }
  double total = 0.0;
  for (int k = 1; k <= top; ++k) {
    total += best[static_cast<std::size_t>(k)];
  }
  return total;
}

} // namespace sigrecover
