#include "cherryvine/evaluate.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

#include "cherryvine/error.hpp"

namespace cherryvine {

namespace {

std::span<const double> row_of(const PointMatrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

}  // namespace

double log_likelihood(const LogDensityFn& log_density, const PointMatrix& points) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    double term = 0.0;
    try {
      term = log_density(row_of(points, r));
    } catch (const NumericalError&) {
      term = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(term)) {
      throw NumericalError("log density is not finite at row " + std::to_string(r + 1));
    }
    total += term;
  }
  return total;
}

double log_likelihood(const VineModel& model, const PseudoObservations& po) {
  if (po.d() != static_cast<std::size_t>(model.dimension())) {
    throw InputError("data has " + std::to_string(po.d()) + " columns, model has " +
                     std::to_string(model.dimension()));
  }
  return log_likelihood([&model](std::span<const double> u) { return model.log_density(u); },
                        po.values);
}

namespace {

InformationCriteria criteria_of(double loglik, int n_params, std::size_t n) {
  InformationCriteria ic;
  ic.loglik = loglik;
  ic.n_params = n_params;
  const double p = n_params;
  ic.aic = -2.0 * loglik + 2.0 * p;
  ic.bic = -2.0 * loglik + p * std::log(static_cast<double>(n));
  return ic;
}

}  // namespace

InformationCriteria information_criteria(const VineModel& model, const PseudoObservations& po) {
  return criteria_of(log_likelihood(model, po), model.parameter_count(), po.n());
}

DivergenceEstimate kl_divergence_on(const PointMatrix& draws, const LogDensityFn& log_p,
                                    const LogDensityFn& log_q) {
  const auto n = static_cast<std::size_t>(draws.rows());
  if (n < 2) throw InputError("divergence estimate needs at least two draws");
  std::vector<double> terms(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto point = row_of(draws, static_cast<Eigen::Index>(r));
    const double lp = log_p(point);
    double lq = -std::numeric_limits<double>::infinity();
    try {
      lq = log_q(point);
    } catch (const NumericalError&) {
    }
    if (!std::isfinite(lq)) {
      throw DomainError("q has zero density at sampled point " + std::to_string(r + 1));
    }
    if (!std::isfinite(lp)) {
      throw NumericalError("log p is not finite at sampled point " + std::to_string(r + 1));
    }
    terms[r] = lp - lq;
  }
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double t : terms) ss += (t - mean) * (t - mean);
  DivergenceEstimate est;
  est.value = mean;
  est.std_error = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  est.n_samples = n;
  return est;
}

DivergenceEstimate kl_divergence_mc(const LogDensityFn& log_p, const LogDensityFn& log_q,
                                    const SamplerFn& sample_p, std::size_t n, std::uint64_t seed) {
  if (n < 100) throw InputError("divergence estimate needs at least 100 draws");
  DivergenceEstimate est = kl_divergence_on(sample_p(n, seed), log_p, log_q);
  est.seed = seed;
  return est;
}

DivergenceEstimate kl_divergence_mc(const VineModel& p, const VineModel& q, std::size_t n,
                                    std::uint64_t seed) {
  if (p.dimension() != q.dimension()) throw InputError("models differ in dimension");
  return kl_divergence_mc([&p](std::span<const double> u) { return p.log_density(u); },
                          [&q](std::span<const double> u) { return q.log_density(u); },
                          [&p](std::size_t m, std::uint64_t s) { return p.sample(m, s); }, n, seed);
}

ComparisonCandidate make_candidate(std::string id, VineModel model) {
  const int p = model.parameter_count();
  auto shared = std::make_shared<const VineModel>(std::move(model));
  return {std::move(id), [shared](std::span<const double> u) { return shared->log_density(u); },
          p};
}

ComparisonCandidate make_candidate(std::string id, JunctionTreeCopulaModel model, int n_params) {
  auto shared = std::make_shared<const JunctionTreeCopulaModel>(std::move(model));
  return {std::move(id), [shared](std::span<const double> u) { return shared->log_density(u); },
          n_params};
}

std::vector<ComparisonRow> compare_models(const VineModel& reference,
                                          std::span<const ComparisonCandidate> candidates,
                                          std::size_t n, std::uint64_t seed,
                                          const PseudoObservations* data) {
  if (n < 100) throw InputError("comparison needs at least 100 draws");
  if (data && data->d() != static_cast<std::size_t>(reference.dimension())) {
    throw InputError("data dimension differs from the reference model");
  }
  const PointMatrix draws = reference.sample(n, seed);
  const PointMatrix& scored = data ? data->values : draws;
  const LogDensityFn log_ref = [&reference](std::span<const double> u) {
    return reference.log_density(u);
  };
  std::vector<ComparisonRow> rows;
  for (const auto& c : candidates) {
    ComparisonRow row;
    row.model_id = c.model_id;
    row.criteria = criteria_of(log_likelihood(c.log_density, scored), c.n_params,
                               static_cast<std::size_t>(scored.rows()));
    const DivergenceEstimate kl = kl_divergence_on(draws, log_ref, c.log_density);
    row.kl_vs_reference = kl.value;
    row.kl_stderr = kl.std_error;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "model_id,loglik,aic,bic,n_params,kl_vs_reference,kl_stderr\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.model_id << ',' << r.criteria.loglik << ',' << r.criteria.aic << ','
        << r.criteria.bic << ',' << r.criteria.n_params << ',' << r.kl_vs_reference << ','
        << r.kl_stderr << '\n';
  }
}

}  // namespace cherryvine
