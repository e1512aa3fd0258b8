#include "sigrecover/tensor_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sigrecover {

Word Word::concat(const Word& other) const {
  std::vector<int> out = letters_;
  out.insert(out.end(), other.letters_.begin(), other.letters_.end());
  return Word(std::move(out));
}

Word Word::append(int letter) const {
  std::vector<int> out = letters_;
  out.push_back(letter);
  return Word(std::move(out));
}

bool Word::valid_for(int dim) const {
  return std::all_of(letters_.begin(), letters_.end(),
                     [dim](int l) { return l >= 1 && l <= dim; });
}

std::string Word::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < letters_.size(); ++i) {
    if (i) {
      os << ',';
    }
    os << letters_[i];
  }
  os << ')';
  return os.str();
}

Word Word::parse(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw std::invalid_argument("Word::parse: expected '(...)', got '" + text + "'");
  }
  std::vector<int> letters;
  std::string body = text.substr(open + 1, close - open - 1);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    letters.push_back(std::stoi(item));
  }
  return Word(std::move(letters));
}

std::size_t word_index(const Word& w, int dim) {
  std::size_t idx = 0;
  for (int l : w) {
    idx = idx * static_cast<std::size_t>(dim) + static_cast<std::size_t>(l - 1);
  }
  return idx;
}

Word word_from_index(std::size_t index, std::size_t length, int dim) {
  std::vector<int> letters(length);
  for (std::size_t i = length; i-- > 0;) {
    letters[i] = static_cast<int>(index % static_cast<std::size_t>(dim)) + 1;
    index /= static_cast<std::size_t>(dim);
  }
  return Word(std::move(letters));
}

TensorSeries::TensorSeries(int dim, int level) : dim_(dim), level_(level) {
  if (dim < 1) {
    throw std::invalid_argument("TensorSeries: dimension must be >= 1");
  }
  if (level < 0) {
    throw std::invalid_argument("TensorSeries: level must be >= 0");
  }
  levels_.resize(static_cast<std::size_t>(level) + 1);
  std::size_t n = 1;
  for (auto& lv : levels_) {
    lv.assign(n, 0.0);
    n *= static_cast<std::size_t>(dim);
  }
}

void TensorSeries::check_word(const Word& w) const {
  if (w.size() > static_cast<std::size_t>(level_)) {
    throw ShapeMismatch("word " + w.to_string() + " longer than truncation level " +
                        std::to_string(level_));
  }
  if (!w.valid_for(dim_)) {
    throw ShapeMismatch("word " + w.to_string() + " has letters outside [1, " +
                        std::to_string(dim_) + "]");
  }
}

double TensorSeries::operator[](const Word& w) const {
  check_word(w);
  return levels_[w.size()][word_index(w, dim_)];
}

double& TensorSeries::at(const Word& w) {
  check_word(w);
  return levels_[w.size()][word_index(w, dim_)];
}

std::span<const double> TensorSeries::level_coeffs(int k) const {
  return levels_.at(static_cast<std::size_t>(k));
}

std::span<double> TensorSeries::level_coeffs(int k) {
  return levels_.at(static_cast<std::size_t>(k));
}

std::size_t TensorSeries::total_size() const {
  std::size_t n = 0;
  for (const auto& lv : levels_) {
    n += lv.size();
  }
  return n;
}

double TensorSeries::max_abs_diff(const TensorSeries& other) const {
  if (dim_ != other.dim_ || level_ != other.level_) {
    throw ShapeMismatch("max_abs_diff: dimension/level mismatch");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    for (std::size_t i = 0; i < levels_[k].size(); ++i) {
      m = std::max(m, std::fabs(levels_[k][i] - other.levels_[k][i]));
    }
  }
  return m;
}

double TensorSeries::max_abs_above_level0() const {
  double m = 0.0;
  for (std::size_t k = 1; k < levels_.size(); ++k) {
    for (double c : levels_[k]) {
      m = std::max(m, std::fabs(c));
    }
  }
  return m;
}

TensorSeries& TensorSeries::operator+=(const TensorSeries& other) {
  if (dim_ != other.dim_ || level_ != other.level_) {
    throw ShapeMismatch("operator+=: dimension/level mismatch");
  }
  for (std::size_t k = 0; k < levels_.size(); ++k) {
    for (std::size_t i = 0; i < levels_[k].size(); ++i) {
      levels_[k][i] += other.levels_[k][i];
    }
  }
  return *this;
}

TensorSeries& TensorSeries::operator*=(double s) {
  for (auto& lv : levels_) {
    for (double& c : lv) {
      c *= s;
    }
  }
  return *this;
}

TensorSeries unit_series(int dim, int level) {
  TensorSeries s(dim, level);
  s.level_coeffs(0)[0] = 1.0;
  return s;
}

TensorSeries concat(const TensorSeries& a, const TensorSeries& b) {
  if (a.dim() != b.dim() || a.level() != b.level()) {
    throw ShapeMismatch("concat: operands have dim/level (" + std::to_string(a.dim()) +
                        "," + std::to_string(a.level()) + ") and (" +
                        std::to_string(b.dim()) + "," + std::to_string(b.level()) +
                        ")");
  }
  TensorSeries out(a.dim(), a.level());
  for (int n = 0; n <= a.level(); ++n) {
    auto dst = out.level_coeffs(n);
    for (int k = 0; k <= n; ++k) {
      auto lhs = a.level_coeffs(k);
      auto rhs = b.level_coeffs(n - k);
      const std::size_t stride = rhs.size();
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double ai = lhs[i];
        if (ai == 0.0) {
          continue;
        }
        double* row = dst.data() + i * stride;
        for (std::size_t j = 0; j < stride; ++j) {
          row[j] += ai * rhs[j];
        }
      }
    }
  }
  return out;
}

TensorSeries segment_signature(std::span<const double> increment, int level) {
  const int dim = static_cast<int>(increment.size());
  TensorSeries out = unit_series(dim, level);
  for (int k = 1; k <= level; ++k) {
    auto prev = out.level_coeffs(k - 1);
    auto cur = out.level_coeffs(k);
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t i = 0; i < prev.size(); ++i) {
      for (int j = 0; j < dim; ++j) {
        cur[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(j)] =
            prev[i] * increment[static_cast<std::size_t>(j)] * inv_k;
      }
    }
  }
  return out;
}

namespace {
void shuffle_into(const Word& u, std::size_t i, const Word& w, std::size_t j,
                  std::vector<int>& prefix, std::vector<Word>& out) {
  if (i == u.size() && j == w.size()) {
    out.emplace_back(prefix);
    return;
  }
  if (i < u.size()) {
    prefix.push_back(u[i]);
    shuffle_into(u, i + 1, w, j, prefix, out);
    prefix.pop_back();
  }
  if (j < w.size()) {
    prefix.push_back(w[j]);
    shuffle_into(u, i, w, j + 1, prefix, out);
    prefix.pop_back();
  }
}
} // namespace

std::vector<Word> shuffle(const Word& u, const Word& w) {
  std::vector<Word> out;
  out.reserve(binomial(u.size() + w.size(), u.size()));
  std::vector<int> prefix;
  prefix.reserve(u.size() + w.size());
  shuffle_into(u, 0, w, 0, prefix, out);
  return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) {
    return 0;
  }
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

} // namespace sigrecover
