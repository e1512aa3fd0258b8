#include "sigrecover/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sigrecover {

ExtReal ZeroThreshold::operator()(std::size_t letters, double sup_norm,
                                  double path_length) const {
  const double n = static_cast<double>(letters);
  const double ln = std::log(10.0) * (log10_base + n * log10_per_letter) +
                    n * (std::log(sup_norm) + std::log1p(path_length));
  return ExtReal::from_log(ln);
}

std::vector<ExtReal> WordOracle::substitutions(const std::vector<std::size_t>& word,
                                               std::size_t pos,
                                               const std::vector<std::size_t>& replacements) const {
  std::vector<ExtReal> out;
  out.reserve(replacements.size());
  std::vector<std::size_t> w = word;
  for (std::size_t c : replacements) {
    w[pos] = c;
    out.push_back(value_of(w));
  }
  return out;
}

ExtReal WordOracle::value_of(const std::vector<std::size_t>& word) const {
  StatePtr s = root();
  for (std::size_t c : word) {
    s = extend(s, c);
  }
  return value(s);
}

bool WordOracle::is_zero(const ExtReal& v, std::size_t letters) const {
  return abs_less(v, threshold(letters));
}

namespace {

struct PathState final : WordOracle::State {
  IteratedIntegrator::Level level;
};

const IteratedIntegrator::Level& level_of(const WordOracle::StatePtr& s) {
  const auto* ps = dynamic_cast<const PathState*>(s.get());
  if (!ps) {
    throw std::invalid_argument("path oracle: foreign state");
  }
  return ps->level;
}

bool is_origin(const LatticePoint& z) {
  return std::all_of(z.begin(), z.end(), [](long v) { return v == 0; });
}

} // namespace

PathWordOracle::PathWordOracle(const PiecewiseLinearPath& path,
                               const ReconstructionConfig& config)
    : dim_(path.dim()), zero_(config.zero), path_length_(path.polygonal_length()) {
  if (!path.starts_at_origin()) {
    throw std::invalid_argument("path oracle: path must start at the origin");
  }
  if (!(config.candidate_radius >= 0.0) || !std::isfinite(config.candidate_radius)) {
    throw std::invalid_argument("path oracle: candidate radius must be finite and >= 0");
  }
  const CubeLattice& lat = config.lattice;
  const double reach = config.candidate_radius + lat.half_width();
  const long zmax = static_cast<long>(std::floor(reach / lat.epsilon()));

  letters_.emplace_back(static_cast<std::size_t>(dim_), 0L);
  for (auto& z : touched_cubes(path, lat)) {
    const bool in_box =
        std::all_of(z.begin(), z.end(), [&](long v) { return v >= -zmax && v <= zmax; });
    if (in_box && !is_origin(z)) {
      letters_.push_back(std::move(z));
    }
  }
  std::vector<OneFormPtr> forms;
  forms.reserve(letters_.size());
  for (const auto& z : letters_) {
    forms.push_back(lat.bump_form(z));
  }
  sup_norm_ = forms.front()->sup_norm();
  integrator_ =
      std::make_unique<IteratedIntegrator>(path, std::move(forms), 0.0, 1.0, config.quadrature);
}

WordOracle::StatePtr PathWordOracle::root() const {
  auto s = std::make_shared<PathState>();
  s->level = integrator_->unit();
  return s;
}

WordOracle::StatePtr PathWordOracle::extend(const StatePtr& prefix, std::size_t letter) const {
  auto s = std::make_shared<PathState>();
  s->level = integrator_->extend(level_of(prefix), letter);
  return s;
}

ExtReal PathWordOracle::value(const StatePtr& word) const { return level_of(word).final; }

ExtReal PathWordOracle::threshold(std::size_t letters) const {
  return zero_(letters, sup_norm_, path_length_);
}

std::vector<ExtReal> PathWordOracle::substitutions(
    const std::vector<std::size_t>& word, std::size_t pos,
    const std::vector<std::size_t>& replacements) const {
  if (pos >= word.size()) {
    throw std::out_of_range("path oracle: substitution position out of range");
  }
  if (word != sweep_word_) {
    const std::size_t n = word.size();
    forward_.assign(n, {});
    backward_.assign(n, {});
    IteratedIntegrator::Level l = integrator_->unit();
    for (std::size_t k = 0; k < n; ++k) {
      l = integrator_->extend(l, word[k]);
      forward_[k] = l;
    }
    l = integrator_->unit();
    for (std::size_t k = n; k-- > 0;) {
      l = integrator_->extend_backward(l, word[k]);
      backward_[k] = l;
    }
    sweep_word_ = word;
  }
  const IteratedIntegrator::Level unit = integrator_->unit();
  const auto& before = pos == 0 ? unit : forward_[pos - 1];
  const auto& after = pos + 1 == word.size() ? unit : backward_[pos + 1];
  std::vector<ExtReal> out;
  out.reserve(replacements.size());
  for (std::size_t c : replacements) {
    out.push_back(integrator_->combine(before, c, after));
  }
  return out;
}

namespace {

struct WordState final : WordOracle::State {
  std::vector<std::size_t> word;
};

} // namespace

FunctionWordOracle::FunctionWordOracle(std::vector<LatticePoint> letters, Evaluator evaluate,
                                       ExtReal threshold)
    : letters_(std::move(letters)), evaluate_(std::move(evaluate)), threshold_(threshold) {
  if (letters_.empty() || !is_origin(letters_.front())) {
    throw std::invalid_argument("function oracle: first letter must be the origin");
  }
}

int FunctionWordOracle::dim() const { return static_cast<int>(letters_.front().size()); }

WordOracle::StatePtr FunctionWordOracle::root() const { return std::make_shared<WordState>(); }

WordOracle::StatePtr FunctionWordOracle::extend(const StatePtr& prefix,
                                                std::size_t letter) const {
  const auto* ws = dynamic_cast<const WordState*>(prefix.get());
  if (!ws) {
    throw std::invalid_argument("function oracle: foreign state");
  }
  auto s = std::make_shared<WordState>(*ws);
  s->word.push_back(letter);
  return s;
}

ExtReal FunctionWordOracle::value(const StatePtr& word) const {
  const auto* ws = dynamic_cast<const WordState*>(word.get());
  if (!ws) {
    throw std::invalid_argument("function oracle: foreign state");
  }
  if (ws->word.empty()) {
    return ExtReal(1.0);
  }
  std::vector<LatticePoint> pts;
  pts.reserve(ws->word.size());
  for (std::size_t i : ws->word) {
    pts.push_back(letters_.at(i));
  }
  return evaluate_(LatticeWord(std::move(pts)));
}

AmbiguousRecovery::AmbiguousRecovery(const std::string& what,
                                     std::vector<LatticeWord> candidates)
    : std::runtime_error(what), candidates_(std::move(candidates)) {}

namespace {

LatticeWord to_lattice_word(const WordOracle& oracle, const std::vector<std::size_t>& w) {
  std::vector<LatticePoint> pts;
  pts.reserve(w.size());
  for (std::size_t i : w) {
    pts.push_back(oracle.letters()[i]);
  }
  return LatticeWord(std::move(pts));
}

} // namespace

WordRecovery recover_word(const WordOracle& oracle, const ReconstructionConfig& config) {
  using StatePtr = WordOracle::StatePtr;
  const auto& letters = oracle.letters();
  if (letters.empty() || !is_origin(letters.front())) {
    throw std::invalid_argument("recover_word: oracle letter 0 must be the origin");
  }
  const std::size_t alphabet = letters.size();
  std::size_t evals = 0;
  auto charge = [&](std::size_t k) {
    evals += k;
    if (evals > config.search_budget) {
      throw SearchBudgetExceeded("recover_word: search budget of " +
                                 std::to_string(config.search_budget) +
                                 " evaluations exceeded");
    }
  };
  auto ext = [&](const StatePtr& s, std::size_t c) {
    charge(1);
    return oracle.extend(s, c);
  };
  auto zero = [&](const StatePtr& s, std::size_t len) {
    return oracle.is_zero(oracle.value(s), len);
  };

  std::vector<std::size_t> word{0};
  StatePtr state = ext(oracle.root(), 0);
  if (zero(state, 1)) {
    throw AmbiguousRecovery("recover_word: the one-letter word (0) evaluates to zero", {});
  }

  // Does the chain prefix + x + y + x + ... outlive prefix + y + x + y + ...?
  auto outlives = [&](std::size_t x, StatePtr sx, std::size_t y, StatePtr sy, std::size_t len) {
    for (std::size_t step = 0;; ++step) {
      const bool even = step % 2 == 0;
      sx = ext(sx, even ? y : x);
      sy = ext(sy, even ? x : y);
      ++len;
      const bool zx = zero(sx, len);
      const bool zy = zero(sy, len);
      if (zx || zy) {
        return zy && !zx;
      }
    }
  };

  while (true) {
    std::vector<std::pair<std::size_t, StatePtr>> options;
    for (std::size_t c = 0; c < alphabet; ++c) {
      if (c == word.back()) {
        continue;
      }
      StatePtr next = ext(state, c);
      if (!zero(next, word.size() + 1)) {
        options.emplace_back(c, std::move(next));
      }
    }
    if (options.empty()) {
      break;
    }
    if (word.size() - 1 >= config.max_word_length) {
      throw SearchBudgetExceeded("recover_word: nonzero words longer than max_word_length = " +
                                 std::to_string(config.max_word_length));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < options.size(); ++i) {
      if (outlives(options[i].first, options[i].second, options[best].first,
                   options[best].second, word.size() + 1)) {
        best = i;
      }
    }
    word.push_back(options[best].first);
    state = options[best].second;
  }

  // Verification: no single-letter substitution may survive. One-letter
  // extensions were all zero when the loop ended.
  std::vector<LatticeWord> competitors;
  std::vector<std::size_t> repl;
  for (std::size_t pos = 1; pos < word.size(); ++pos) {
    repl.clear();
    for (std::size_t c = 0; c < alphabet; ++c) {
      if (c != word[pos] && c != word[pos - 1] && (pos + 1 == word.size() || c != word[pos + 1])) {
        repl.push_back(c);
      }
    }
    charge(repl.size());
    const auto vals = oracle.substitutions(word, pos, repl);
    for (std::size_t i = 0; i < repl.size(); ++i) {
      if (!oracle.is_zero(vals[i], word.size())) {
        auto w = word;
        w[pos] = repl[i];
        competitors.push_back(to_lattice_word(oracle, w));
      }
    }
  }
  LatticeWord result = to_lattice_word(oracle, word);
  if (!competitors.empty()) {
    competitors.insert(competitors.begin(), result);
    throw AmbiguousRecovery("recover_word: " + std::to_string(competitors.size() - 1) +
                                " substituted words are also nonzero",
                            std::move(competitors));
  }
  return {std::move(result), oracle.value(state), evals};
}

ExtReal word_extended_signature(const PiecewiseLinearPath& path, const LatticeWord& word,
                                const CubeLattice& lattice, QuadratureOptions options) {
  if (word.dim() != path.dim()) {
    throw std::invalid_argument("word_extended_signature: word/path dimension mismatch");
  }
  std::map<LatticePoint, std::size_t> index;
  std::vector<OneFormPtr> forms;
  std::vector<std::size_t> seq;
  for (const auto& z : word.letters()) {
    auto [it, inserted] = index.emplace(z, forms.size());
    if (inserted) {
      forms.push_back(lattice.bump_form(z));
    }
    seq.push_back(it->second);
  }
  IteratedIntegrator integ(path, std::move(forms), 0.0, 1.0, options);
  return integ.evaluate(seq);
}

PiecewiseLinearPath polygonal_path(const LatticeWord& word, const std::vector<double>& times,
                                   const CubeLattice& lattice) {
  if (times.size() != word.moves()) {
    throw std::invalid_argument("polygonal_path: " + std::to_string(times.size()) +
                                " times for a word with " + std::to_string(word.moves()) +
                                " moves");
  }
  std::vector<double> t{0.0};
  std::vector<Point> pts{lattice.center(word[0])};
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > t.back() && times[k] < 1.0)) {
      throw std::invalid_argument("polygonal_path: times must increase strictly inside (0, 1)");
    }
    t.push_back(times[k]);
    pts.push_back(lattice.center(word[k + 1]));
  }
  t.push_back(1.0);
  pts.push_back(pts.back());
  return PiecewiseLinearPath(std::move(t), std::move(pts));
}

double sup_distance(const PiecewiseLinearPath& a, const PiecewiseLinearPath& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("sup_distance: dimension mismatch");
  }
  std::vector<double> grid;
  grid.reserve(a.size() + b.size());
  std::merge(a.times().begin(), a.times().end(), b.times().begin(), b.times().end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double best = 0.0;
  for (double t : grid) {
    const Point pa = a.at(t);
    const Point pb = b.at(t);
    double s = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      s += (pa[i] - pb[i]) * (pa[i] - pb[i]);
    }
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

ReconstructionResult reconstruct(const PiecewiseLinearPath& path,
                                 const ReconstructionConfig& config) {
  VisitRecord geometric = visit_sequence(path, config.lattice);
  PathWordOracle oracle(path, config);
  WordRecovery rec = recover_word(oracle, config);
  const bool agrees = rec.word == geometric.word;
  std::vector<double> times = geometric.times;
  if (!agrees) {
    // Times belong to another word; spread the recovered moves evenly.
    times.clear();
    const std::size_t m = rec.word.moves();
    for (std::size_t k = 1; k <= m; ++k) {
      times.push_back(static_cast<double>(k) / static_cast<double>(m + 1));
    }
  }
  PiecewiseLinearPath polygon = polygonal_path(rec.word, times, config.lattice);
  const double err = sup_distance(polygon, path);
  return {std::move(rec.word), rec.value, std::move(polygon), std::move(geometric),
          agrees, err, rec.evaluations};
}

nlohmann::json to_json(const ReconstructionConfig& c) {
  return {{"epsilon", c.lattice.epsilon()},
          {"delta", c.lattice.delta()},
          {"max_word_length", c.max_word_length},
          {"zero_log10_base", c.zero.log10_base},
          {"zero_log10_per_letter", c.zero.log10_per_letter},
          {"candidate_radius", c.candidate_radius},
          {"search_budget", c.search_budget},
          {"substeps", c.quadrature.substeps},
          {"adaptive_tolerance", c.quadrature.adaptive_tolerance},
          {"max_bisections", c.quadrature.max_bisections}};
}

} // namespace sigrecover
