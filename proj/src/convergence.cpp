#include "sigrecover/convergence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

namespace sigrecover {

void ConvergenceConfig::validate() const {
  model.validate();
  if (n_list.empty()) {
    throw std::invalid_argument("convergence: n_list is empty");
  }
  for (int n : n_list) {
    if (n < 1) {
      throw std::invalid_argument("convergence: every n must be >= 1");
    }
  }
  if (!(delta_ratio > 0.0 && delta_ratio < 1.0)) {
    throw std::invalid_argument("convergence: delta_ratio must lie in (0, 1)");
  }
  if (trials == 0) {
    throw std::invalid_argument("convergence: trials must be >= 1");
  }
}

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

ConvergenceResult convergence_study(const ConvergenceConfig& config) {
  config.validate();
  const GaussianSampler sampler(config.model);
  const double root_d = std::sqrt(static_cast<double>(config.model.dim));
  const std::size_t levels = config.n_list.size();

  ConvergenceResult out;
  out.config = config;
  out.rows.resize(levels * config.trials);

  auto run_trial = [&](std::size_t trial) {
    const PiecewiseLinearPath path = sampler.sample(trial_seed(config.model.seed, trial));
    for (std::size_t li = 0; li < levels; ++li) {
      const int n = config.n_list[li];
      const double eps = 1.0 / static_cast<double>(n);
      const CubeLattice lattice(eps, config.delta_ratio * eps);
      const VisitRecord rec = visit_sequence(path, lattice);
      const PiecewiseLinearPath poly = polygonal_path(rec.word, rec.times, lattice);

      ConvergenceRow& row = out.rows[li * config.trials + trial];
      row.n = n;
      row.epsilon = eps;
      row.delta = lattice.delta();
      row.trial = trial;
      row.sup_error = sup_distance(poly, path);
      row.bound = 11.0 * root_d * eps;
      row.violated = row.sup_error > row.bound;
      row.word_len = rec.word.moves();
      if (config.recover) {
        ReconstructionConfig rc = config.recovery;
        rc.lattice = lattice;
        try {
          const PathWordOracle oracle(path, rc);
          row.recovered_ok = recover_word(oracle, rc).word == rec.word;
        } catch (const AmbiguousRecovery&) {
          row.recovered_ok = false;
        } catch (const SearchBudgetExceeded&) {
          row.recovered_ok = false;
        }
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, config.trials));
  if (threads == 1) {
    for (std::size_t t = 0; t < config.trials; ++t) {
      run_trial(t);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < config.trials; t = next++) {
          try {
            run_trial(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
              failure = std::current_exception();
            }
          }
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
    if (failure) {
      std::rethrow_exception(failure);
    }
  }

  for (std::size_t li = 0; li < levels; ++li) {
    std::vector<double> errs;
    std::size_t violated = 0;
    std::size_t recovered = 0;
    std::size_t attempted = 0;
    for (std::size_t t = 0; t < config.trials; ++t) {
      const auto& row = out.rows[li * config.trials + t];
      errs.push_back(row.sup_error);
      violated += row.violated ? 1 : 0;
      if (row.recovered_ok) {
        ++attempted;
        recovered += *row.recovered_ok ? 1 : 0;
      }
    }
    ConvergenceLevel lv;
    lv.n = config.n_list[li];
    lv.epsilon = 1.0 / static_cast<double>(lv.n);
    lv.median = quantile(errs, 0.5);
    lv.q25 = quantile(errs, 0.25);
    lv.q75 = quantile(errs, 0.75);
    lv.max = *std::max_element(errs.begin(), errs.end());
    lv.violation_fraction = static_cast<double>(violated) / static_cast<double>(config.trials);
    lv.median_ratio = lv.median / lv.epsilon;
    if (attempted > 0) {
      lv.recovery_rate = static_cast<double>(recovered) / static_cast<double>(attempted);
    }
    out.levels.push_back(lv);
  }
  return out;
}

bool ConvergenceResult::median_strictly_decreasing() const {
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i].median < levels[i - 1].median)) {
      return false;
    }
  }
  return true;
}

void write_convergence_csv(std::ostream& os, const ConvergenceResult& r) {
  os << "n,epsilon,delta,trial,sup_error,bound,violated,word_len,recovered_ok\n";
  os << std::setprecision(17);
  for (const auto& row : r.rows) {
    os << row.n << ',' << row.epsilon << ',' << row.delta << ',' << row.trial << ','
       << row.sup_error << ',' << row.bound << ',' << (row.violated ? 1 : 0) << ','
       << row.word_len << ',';
    if (row.recovered_ok) {
      os << (*row.recovered_ok ? 1 : 0);
    } else {
      os << "na";
    }
    os << '\n';
  }
}

nlohmann::json convergence_summary(const ConvergenceResult& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& lv : r.levels) {
    nlohmann::json j = {{"n", lv.n},
                        {"epsilon", lv.epsilon},
                        {"median_sup_error", lv.median},
                        {"q25", lv.q25},
                        {"q75", lv.q75},
                        {"max", lv.max},
                        {"violation_fraction", lv.violation_fraction},
                        {"median_error_over_epsilon", lv.median_ratio}};
    if (lv.recovery_rate) {
      j["recovery_rate"] = *lv.recovery_rate;
    }
    levels.push_back(std::move(j));
  }
  return {{"model", to_json(r.config.model)},
          {"n_list", r.config.n_list},
          {"delta_ratio", r.config.delta_ratio},
          {"trials", r.config.trials},
          {"threads", r.config.threads},
          {"bound_constant", "11*sqrt(d)"},
          {"levels", std::move(levels)},
          {"median_strictly_decreasing", r.median_strictly_decreasing()}};
}

} // namespace sigrecover
