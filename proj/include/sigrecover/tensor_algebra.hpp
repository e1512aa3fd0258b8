#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigrecover {

/// Thrown when two series (or a series and a word) disagree on dimension or
/// truncation level.
class ShapeMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A word over the alphabet {1, ..., d}. Letters are stored 1-based, matching
/// the usual dx^i indexing of signature coordinates.
class Word {
public:
  Word() = default;
  Word(std::initializer_list<int> letters) : letters_(letters) {}
  explicit Word(std::vector<int> letters) : letters_(std::move(letters)) {}

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<int>& letters() const { return letters_; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  void push_back(int letter) { letters_.push_back(letter); }
  /// this followed by other.
  Word concat(const Word& other) const;
  Word append(int letter) const;

  /// All letters lie in [1, dim].
  bool valid_for(int dim) const;

  /// "(1,2)" style text; "()" for the empty word.
  std::string to_string() const;
  /// Inverse of to_string.
  static Word parse(const std::string& text);

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word&, const Word&) = default;

private:
  std::vector<int> letters_;
};

/// Base-d position of a word among the d^|w| words of its length.
std::size_t word_index(const Word& w, int dim);
/// Inverse of word_index.
Word word_from_index(std::size_t index, std::size_t length, int dim);

/// Element of the truncated tensor algebra T^L(R^d), stored densely: level k
/// holds d^k coefficients in base-d word order.
class TensorSeries {
public:
  /// The zero series.
  TensorSeries(int dim, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }

  double operator[](const Word& w) const;
  double& at(const Word& w);

  std::span<const double> level_coeffs(int k) const;
  std::span<double> level_coeffs(int k);

  /// Number of stored coefficients, sum_k d^k.
  std::size_t total_size() const;

  /// Largest absolute coefficient difference; throws ShapeMismatch.
  double max_abs_diff(const TensorSeries& other) const;
  /// Largest |coefficient| over levels 1..L.
  double max_abs_above_level0() const;

  TensorSeries& operator+=(const TensorSeries& other);
  TensorSeries& operator*=(double s);

private:
  void check_word(const Word& w) const;

  int dim_;
  int level_;
  std::vector<std::vector<double>> levels_;
};

/// Coefficient of the empty word is 1, all others 0.
TensorSeries unit_series(int dim, int level);

/// Truncated tensor product: (a (x) b)(w) = sum over w = u v of a(u) b(v).
TensorSeries concat(const TensorSeries& a, const TensorSeries& b);
inline TensorSeries operator*(const TensorSeries& a, const TensorSeries& b) {
  return concat(a, b);
}

/// Signature of the linear path with the given increment: the truncated
/// tensor exponential, coefficient prod_j v^{i_j} / k! at level k.
TensorSeries segment_signature(std::span<const double> increment, int level);

/// All order-preserving interleavings of u and w, with multiplicity.
std::vector<Word> shuffle(const Word& u, const Word& w);

/// Exact binomial coefficient C(n, k) for small arguments.
std::size_t binomial(std::size_t n, std::size_t k);

} // namespace sigrecover
