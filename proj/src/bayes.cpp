#include "bmit/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bmit {

double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

namespace {

void check_hyper(std::span<const double> hyper) {
  for (double h : hyper) {
    if (!(h > 0) || !std::isfinite(h)) {
      throw std::invalid_argument("Dirichlet hyperparameters must be finite and positive");
    }
  }
}

}  // namespace

DirichletPrior DirichletPrior::uniform(std::size_t rows, std::size_t cols, double value) {
  return DirichletPrior(std::vector<double>(rows * cols, value), std::vector<double>(rows, value),
                        std::vector<double>(cols, value));
}

DirichletPrior::DirichletPrior(std::vector<double> joint, std::vector<double> row,
                               std::vector<double> col)
    : joint_(std::move(joint)), row_(std::move(row)), col_(std::move(col)) {
  if (row_.empty() || col_.empty() || joint_.size() != row_.size() * col_.size()) {
    throw std::invalid_argument("prior dimensions are inconsistent");
  }
  check_hyper(joint_);
  check_hyper(row_);
  check_hyper(col_);
}

double log_upsilon(std::span<const std::int64_t> counts, std::span<const double> hyper) {
  if (counts.empty() || counts.size() != hyper.size()) {
    throw std::invalid_argument("log_upsilon: counts and hyperparameters differ in length");
  }
  check_hyper(hyper);
  double h_sum = 0;
  double n = 0;
  double acc = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] < 0) throw std::invalid_argument("log_upsilon: negative count");
    h_sum += hyper[k];
    n += static_cast<double>(counts[k]);
    if (counts[k] != 0) {
      acc += log_gamma(hyper[k] + static_cast<double>(counts[k])) - log_gamma(hyper[k]);
    }
  }
  return log_gamma(h_sum) - log_gamma(h_sum + n) + acc;
}

double polya_urn_loglik(std::span<const std::size_t> cell_sequence, std::span<const double> hyper) {
  check_hyper(hyper);
  double h_sum = 0;
  for (double h : hyper) h_sum += h;
  std::vector<double> seen(hyper.size(), 0.0);
  double acc = 0;
  for (std::size_t t = 0; t < cell_sequence.size(); ++t) {
    const auto k = cell_sequence[t];
    if (k >= hyper.size()) throw std::out_of_range("polya_urn_loglik: cell index out of range");
    acc += std::log((hyper[k] + seen[k]) / (h_sum + static_cast<double>(t)));
    seen[k] += 1;
  }
  return acc;
}

double log_dependence_ratio(const ContingencyTable::Slice& slice, const DirichletPrior& prior) {
  if (prior.rows() != slice.rows || prior.cols() != slice.cols) {
    throw std::invalid_argument("prior dimensions do not match the table");
  }
  return log_upsilon(slice.cells, prior.joint()) - log_upsilon(slice.row_totals, prior.row()) -
         log_upsilon(slice.col_totals, prior.col());
}

double posterior_from_log_ratio(double log_ratio, double prior_independence) {
  if (!(prior_independence > 0 && prior_independence < 1)) {
    throw std::invalid_argument("prior of independence must lie in (0,1)");
  }
  return posterior_from_log_odds(log_ratio, prior_log_odds(prior_independence));
}

double prior_log_odds(double prior_independence) {
  return std::log1p(-prior_independence) - std::log(prior_independence);
}

double posterior_from_log_odds(double log_ratio, double prior_log_odds) {
  return 1.0 / (1.0 + std::exp(std::clamp(log_ratio, -700.0, 700.0) + prior_log_odds));
}

double posterior_independence_fixed(const ContingencyTable::Slice& slice,
                                    const DirichletPrior& prior, double prior_independence) {
  return posterior_from_log_ratio(log_dependence_ratio(slice, prior), prior_independence);
}

double posterior_independence_fixed(const ContingencyTable& table, const DirichletPrior& prior,
                                    double prior_independence) {
  if (table.n_slices() != 1) {
    throw std::invalid_argument("posterior_independence_fixed expects a single-slice table");
  }
  return posterior_independence_fixed(table.slice(0), prior, prior_independence);
}

double posterior_conditional_fixed(const ContingencyTable& table, const DirichletPrior& prior,
                                   double prior_independence) {
  double p = 1.0;
  for (std::size_t s = 0; s < table.n_slices(); ++s) {
    p *= posterior_independence_fixed(table.slice(s), prior, prior_independence);
  }
  return p;
}

}  // namespace bmit
