#pragma once

// Model assessment: log-likelihood, information criteria and Monte-Carlo
// Kullback-Leibler divergence.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cherryvine/junction_copula.hpp"
#include "cherryvine/learn.hpp"
#include "cherryvine/matrix.hpp"
#include "cherryvine/vine.hpp"

namespace cherryvine {

/// Sum of log densities over the rows. Throws NumericalError naming the
/// first row whose contribution is not finite, InputError on a dimension
/// mismatch.
double log_likelihood(const VineModel& model, const PseudoObservations& po);
double log_likelihood(const std::function<double(std::span<const double>)>& log_density,
                      const PointMatrix& points);

struct InformationCriteria {
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  int n_params = 0;
};

/// aic = -2 loglik + 2 p, bic = -2 loglik + p log n, where p counts the
/// parameters of the non-Independence pair copulas.
InformationCriteria information_criteria(const VineModel& model, const PseudoObservations& po);

struct DivergenceEstimate {
  double value = 0.0;
  /// Sample standard deviation of the log-ratio terms over sqrt(n_samples).
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

using LogDensityFn = std::function<double(std::span<const double>)>;
using SamplerFn = std::function<PointMatrix(std::size_t n, std::uint64_t seed)>;

/// Mean of log p - log q over n draws from p. Throws DomainError when q has
/// zero density (log q = -inf or its evaluation fails numerically) at a
/// sampled point, and InputError for n < 100.
DivergenceEstimate kl_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                    const SamplerFn& sample_p, std::size_t n, std::uint64_t seed);

/// Same estimator over given draws from p.
DivergenceEstimate kl_divergence_on(const PointMatrix& draws_from_p, const LogDensityFn& log_p,
                                    const LogDensityFn& log_q);

DivergenceEstimate kl_divergence_mc(const VineModel& p, const VineModel& q, std::size_t n,
                                    std::uint64_t seed);

struct ComparisonRow {
  std::string model_id;
  InformationCriteria criteria;
  double kl_vs_reference = 0.0;
  double kl_stderr = 0.0;
};

/// A model entering a comparison: its log density and parameter count.
struct ComparisonCandidate {
  std::string model_id;
  LogDensityFn log_density;
  int n_params = 0;
};

/// Candidate that keeps its own copy of `model`.
ComparisonCandidate make_candidate(std::string id, VineModel model);
ComparisonCandidate make_candidate(std::string id, JunctionTreeCopulaModel model, int n_params);

/// Scores each candidate against n draws from `reference` (seeded by
/// `seed`): information criteria on `data` when given, otherwise on the
/// draws, and KL(reference; candidate) on the draws. Throws InputError when
/// dimensions differ.
std::vector<ComparisonRow> compare_models(const VineModel& reference,
                                          std::span<const ComparisonCandidate> candidates,
                                          std::size_t n, std::uint64_t seed,
                                          const PseudoObservations* data = nullptr);

/// CSV with header model_id,loglik,aic,bic,n_params,kl_vs_reference,kl_stderr
/// and 17 significant digits.
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace cherryvine
