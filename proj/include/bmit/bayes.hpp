#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bmit/discretize.hpp"

namespace bmit {

/// ln Γ(x) for x > 0. Reentrant (does not touch the global signgam).
double log_gamma(double x);

/// Dirichlet hyperparameters for the joint cells (γ), the X marginal (α) and
/// the Y marginal (β) of one I×J slice. The multinomial parameters they
/// govern are integrated out analytically and never stored; sums are always
/// recomputed from the vectors.
class DirichletPrior {
 public:
  /// The same value replicated over every cell and marginal bin.
  static DirichletPrior uniform(std::size_t rows, std::size_t cols, double value = 1.0);
  DirichletPrior(std::vector<double> joint, std::vector<double> row, std::vector<double> col);

  std::size_t rows() const { return row_.size(); }
  std::size_t cols() const { return col_.size(); }
  std::span<const double> joint() const { return joint_; }
  std::span<const double> row() const { return row_; }
  std::span<const double> col() const { return col_; }

 private:
  std::vector<double> joint_;
  std::vector<double> row_;
  std::vector<double> col_;
};

/// log Υ(c, h): the Dirichlet-multinomial probability of an ordered sample
/// with cell counts `counts` under hyperparameters `hyper`,
///   Γ(h)/Γ(h+N) · Π_k Γ(h_k+c_k)/Γ(h_k),   h = Σ h_k, N = Σ c_k.
double log_upsilon(std::span<const std::int64_t> counts, std::span<const double> hyper);

/// Same quantity evaluated as a sequential urn: each draw of cell k adds
/// log((h_k + draws of k so far) / (h + draws so far)).
double polya_urn_loglik(std::span<const std::size_t> cell_sequence, std::span<const double> hyper);

/// ln of the Bayes factor Pr(D | dependent) / Pr(D | independent) for one
/// slice: log Υ(joint) - log Υ(rows) - log Υ(cols).
double log_dependence_ratio(const ContingencyTable::Slice& slice, const DirichletPrior& prior);

/// Logistic combination of a log dependence ratio with the prior of
/// independence. The ratio is clamped to ±700 before exponentiation.
double posterior_from_log_ratio(double log_ratio, double prior_independence);

/// ln((1-℘)/℘).
double prior_log_odds(double prior_independence);
/// posterior_from_log_ratio with the prior term already evaluated.
double posterior_from_log_odds(double log_ratio, double prior_log_odds);

/// Posterior probability of independence of X and Y on a single I×J slice.
double posterior_independence_fixed(const ContingencyTable::Slice& slice,
                                    const DirichletPrior& prior, double prior_independence);
double posterior_independence_fixed(const ContingencyTable& table, const DirichletPrior& prior,
                                    double prior_independence);

/// Conditional test on a fixed grid: product over all conditioning slices of
/// the single-slice posterior, multiplied in slice order.
double posterior_conditional_fixed(const ContingencyTable& table, const DirichletPrior& prior,
                                   double prior_independence);

}  // namespace bmit
