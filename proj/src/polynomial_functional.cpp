#include "sigrecover/one_forms.hpp"

#include <utility>

namespace sigrecover {

namespace {

using WordPoly = std::map<Word, double>;

class ShuffleCache {
public:
  const std::vector<Word>& get(const Word& u, const Word& w) {
    auto key = std::make_pair(u, w);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(std::move(key), shuffle(u, w)).first;
    }
    return it->second;
  }

private:
  std::map<std::pair<Word, Word>, std::vector<Word>> cache_;
};

WordPoly shuffle_poly(const WordPoly& a, const WordPoly& b, ShuffleCache& cache) {
  WordPoly out;
  for (const auto& [u, cu] : a) {
    for (const auto& [w, cw] : b) {
      for (const auto& v : cache.get(u, w)) {
        out[v] += cu * cw;
      }
    }
  }
  return out;
}

// x_u^alpha as a shuffle polynomial in the level-1 coordinates of S(x)_{0,u}.
WordPoly monomial_poly(const std::vector<int>& alpha, ShuffleCache& cache) {
  WordPoly acc{{Word{}, 1.0}};
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const WordPoly letter{{Word{static_cast<int>(i) + 1}, 1.0}};
    for (int p = 0; p < alpha[i]; ++p) {
      acc = shuffle_poly(acc, letter, cache);
    }
  }
  return acc;
}

} // namespace

int required_level(std::span<const PolynomialOneForm> forms) {
  int need = 0;
  for (const auto& f : forms) {
    need += 1 + f.degree();
  }
  return need;
}

LinearFunctional polynomial_functional(std::span<const PolynomialOneForm> forms,
                                       int level_budget) {
  if (forms.empty()) {
    throw std::invalid_argument("polynomial_functional: empty form list");
  }
  const int dim = forms.front().dim();
  for (const auto& f : forms) {
    if (f.dim() != dim) {
      throw std::invalid_argument("polynomial_functional: forms disagree on dimension");
    }
  }
  const int need = required_level(forms);
  if (level_budget < need) {
    throw LevelBudgetError(need, level_budget);
  }

  ShuffleCache cache;
  // Running inner integral J_k(u) as a linear combination of S(x)_{0,u}(w).
  WordPoly inner{{Word{}, 1.0}};
  for (const auto& form : forms) {
    WordPoly next;
    for (const auto& term : form.terms()) {
      const WordPoly integrand = shuffle_poly(inner, monomial_poly(term.alpha, cache), cache);
      for (const auto& [w, c] : integrand) {
        next[w.append(term.j)] += term.coeff * c;
      }
    }
    inner = std::move(next);
  }

  LinearFunctional f(dim, level_budget);
  for (const auto& [w, c] : inner) {
    f.add(w, c);
  }
  return f;
}

} // namespace sigrecover
