#include "sigrecover/lattice.hpp"

#include "sigrecover/iterated_integral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sigrecover {

std::string to_string(const LatticePoint& z) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) {
      os << ',';
    }
    os << z[i];
  }
  os << ')';
  return os.str();
}

CubeLattice::CubeLattice(double epsilon, double delta) : epsilon_(epsilon), delta_(delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("lattice: epsilon must be > 0");
  }
  if (!(delta > 0.0 && delta < epsilon)) {
    throw std::invalid_argument("lattice: need 0 < delta < epsilon");
  }
}

std::vector<double> CubeLattice::center(const LatticePoint& z) const {
  std::vector<double> c(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    c[i] = epsilon_ * static_cast<double>(z[i]);
  }
  return c;
}

Box CubeLattice::closed_cube(const LatticePoint& z) const {
  return Box::cube(center(z), half_width());
}

bool CubeLattice::in_open_cube(std::span<const double> x, const LatticePoint& z) const {
  const double r = half_width();
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(std::fabs(x[i] - epsilon_ * static_cast<double>(z[i])) < r)) {
      return false;
    }
  }
  return true;
}

OneFormPtr CubeLattice::bump_form(const LatticePoint& z) const {
  return bump_one_form(center(z), half_width());
}

LatticeWord::LatticeWord(int dim) : dim_(dim) {
  if (dim < 1) {
    throw std::invalid_argument("lattice word: dimension must be >= 1");
  }
  letters_.emplace_back(static_cast<std::size_t>(dim), 0L);
}

LatticeWord::LatticeWord(std::vector<LatticePoint> letters) : dim_(0) {
  if (letters.empty()) {
    throw std::invalid_argument("lattice word: must contain z_0 = 0");
  }
  dim_ = static_cast<int>(letters.front().size());
  if (dim_ < 1 || std::any_of(letters.front().begin(), letters.front().end(),
                              [](long v) { return v != 0; })) {
    throw std::invalid_argument("lattice word: first letter must be the origin");
  }
  letters_.push_back(letters.front());
  for (std::size_t i = 1; i < letters.size(); ++i) {
    push_back(std::move(letters[i]));
  }
}

void LatticeWord::push_back(LatticePoint z) {
  if (static_cast<int>(z.size()) != dim_) {
    throw std::invalid_argument("lattice word: letter dimension mismatch");
  }
  if (z == letters_.back()) {
    throw std::invalid_argument("lattice word: repeated adjacent letter " +
                                sigrecover::to_string(z));
  }
  letters_.push_back(std::move(z));
}

LatticeWord LatticeWord::with_letter(std::size_t i, LatticePoint z) const {
  if (i == 0 || i >= letters_.size()) {
    throw std::out_of_range("lattice word: substitution index out of range");
  }
  std::vector<LatticePoint> l = letters_;
  l[i] = std::move(z);
  return LatticeWord(std::move(l));
}

std::string LatticeWord::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) {
      s += ' ';
    }
    s += sigrecover::to_string(letters_[i]);
  }
  return s + "]";
}

std::optional<LatticePoint> locate(std::span<const double> x, const CubeLattice& lattice) {
  LatticePoint z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    z[i] = std::lround(x[i] / lattice.epsilon());
  }
  if (lattice.in_open_cube(x, z)) {
    return z;
  }
  return std::nullopt;
}

namespace {

// Cubes whose closure can meet the segment's bounding box.
void for_each_nearby_cube(std::span<const double> a, std::span<const double> b,
                          const CubeLattice& lat,
                          const std::function<void(const LatticePoint&)>& fn) {
  const std::size_t d = a.size();
  const double r = lat.half_width();
  const double eps = lat.epsilon();
  LatticePoint lo(d);
  LatticePoint hi(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double mn = std::min(a[i], b[i]);
    const double mx = std::max(a[i], b[i]);
    lo[i] = static_cast<long>(std::ceil((mn - r) / eps)) - 1;
    hi[i] = static_cast<long>(std::floor((mx + r) / eps)) + 1;
  }
  LatticePoint z = lo;
  while (true) {
    fn(z);
    std::size_t i = 0;
    while (i < d) {
      if (++z[i] <= hi[i]) {
        break;
      }
      z[i] = lo[i];
      ++i;
    }
    if (i == d) {
      return;
    }
  }
}

} // namespace

VisitRecord visit_sequence(const PiecewiseLinearPath& path, const CubeLattice& lattice) {
  if (!path.starts_at_origin()) {
    throw std::invalid_argument("visit_sequence: path must start at the origin");
  }
  const int d = path.dim();
  VisitRecord rec{LatticeWord(d), {}};
  const double r = lattice.half_width();

  struct Entry {
    double lam;
    LatticePoint z;
    double hi;
  };
  std::vector<Entry> entries;
  std::vector<double> lower(static_cast<std::size_t>(d));
  std::vector<double> upper(static_cast<std::size_t>(d));

  for (std::size_t seg = 0; seg < path.segments(); ++seg) {
    const auto a = path.point(seg);
    const auto b = path.point(seg + 1);
    const Point dir = path.increment(seg);
    entries.clear();
    for_each_nearby_cube(a, b, lattice, [&](const LatticePoint& z) {
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double c = lattice.epsilon() * static_cast<double>(z[i]);
        lower[i] = c - r;
        upper[i] = c + r;
      }
      auto iv = line_box_interval(a, dir, lower, upper, true);
      if (!iv) {
        return;
      }
      const double lo = std::max(iv->lo, 0.0);
      const double hi = std::min(iv->hi, 1.0);
      if (!(lo < hi)) {
        return;
      }
      entries.push_back({lo, z, hi});
    });
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
      return std::tie(x.lam, x.z) < std::tie(y.lam, y.z);
    });
    const double t0 = path.time(seg);
    const double t1 = path.time(seg + 1);
    for (const auto& e : entries) {
      if (e.z == rec.word.back()) {
        continue;
      }
      const double tau = t0 + e.lam * (t1 - t0);
      if (!(tau < 1.0)) {
        continue;
      }
      if (!rec.times.empty() && !(tau > rec.times.back())) {
        // Entered two cubes at one parameter; keep the first by the tie rule.
        continue;
      }
      rec.word.push_back(e.z);
      rec.times.push_back(tau);
    }
  }
  return rec;
}

std::vector<LatticePoint> touched_cubes(const PiecewiseLinearPath& path,
                                        const CubeLattice& lattice) {
  const std::size_t d = static_cast<std::size_t>(path.dim());
  const double r = lattice.half_width();
  std::vector<LatticePoint> out;
  std::vector<double> lower(d);
  std::vector<double> upper(d);
  for (std::size_t seg = 0; seg < path.segments(); ++seg) {
    const auto a = path.point(seg);
    const Point dir = path.increment(seg);
    for_each_nearby_cube(a, path.point(seg + 1), lattice, [&](const LatticePoint& z) {
      for (std::size_t i = 0; i < d; ++i) {
        const double c = lattice.epsilon() * static_cast<double>(z[i]);
        lower[i] = c - r;
        upper[i] = c + r;
      }
      auto iv = line_box_interval(a, dir, lower, upper, false);
      if (iv && iv->hi >= 0.0 && iv->lo <= 1.0) {
        out.push_back(z);
      }
    });
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::ostream& operator<<(std::ostream& os, const LatticeWord& w) { return os << w.to_string(); }

nlohmann::json to_json(const LatticeWord& w) { return w.letters(); }

LatticeWord lattice_word_from_json(const nlohmann::json& doc) {
  try {
    return LatticeWord(doc.get<std::vector<LatticePoint>>());
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("lattice word json: ") + e.what());
  }
}

nlohmann::json to_json(const VisitRecord& r) {
  return {{"word", to_json(r.word)}, {"times", r.times}, {"count", r.count()}};
}

VisitRecord visit_record_from_json(const nlohmann::json& doc) {
  try {
    VisitRecord r{lattice_word_from_json(doc.at("word")),
                  doc.at("times").get<std::vector<double>>()};
    if (r.times.size() != r.word.moves()) {
      throw std::invalid_argument("visit record json: times/word length mismatch");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("visit record json: ") + e.what());
  }
}

} // namespace sigrecover
