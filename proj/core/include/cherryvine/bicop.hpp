#pragma once

// Parametric bivariate copulas: the building blocks of pair-copula
// constructions.
//
// All five families are exchangeable, so h(u | v) = dC(u, v)/dv serves as the
// conditional distribution in either direction. Arguments are clamped to
// [kUnitClamp, 1 - kUnitClamp] before evaluation.

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cherryvine {

inline constexpr double kUnitClamp = 1e-10;

/// Clamps a probability into the open unit interval used for evaluation.
double clamp_unit(double u) noexcept;

enum class Family { Independence, Gaussian, Clayton, Gumbel, Frank };

/// Lowercase name used in model files ("gaussian", ...).
std::string_view family_name(Family family) noexcept;

/// Throws InputError for an unknown name.
Family parse_family(std::string_view name);

/// Number of free parameters (0 for Independence, 1 otherwise).
int parameter_count(Family family) noexcept;

struct UnitPair {
  double u = 0.5;
  double v = 0.5;
};

class BivariateCopula {
 public:
  /// The independence copula C(u, v) = uv.
  BivariateCopula() = default;

  /// Throws DomainError when `parameter` is outside the family's domain:
  /// Gaussian rho in (-1, 1), Clayton theta > 0, Gumbel theta >= 1,
  /// Frank theta != 0. The parameter is ignored for Independence.
  BivariateCopula(Family family, double parameter);

  static BivariateCopula independence() { return {}; }

  Family family() const noexcept { return family_; }
  double parameter() const noexcept { return parameter_; }
  bool is_independence() const noexcept { return family_ == Family::Independence; }

  double density(double u, double v) const;
  double log_density(double u, double v) const;
  double cdf(double u, double v) const;

  /// Conditional distribution dC(u, v)/dv of the first argument given the
  /// second.
  double h(double u, double given_v) const;

  /// Solves h(u | given_v) = w for u. Closed form except for Gumbel, which
  /// uses a bracketed root search and throws NumericalError on
  /// non-convergence.
  double h_inverse(double w, double given_v) const;

  /// Kendall's tau implied by the parameter.
  double tau() const;

  std::string to_string() const;

  bool operator==(const BivariateCopula&) const = default;

 private:
  Family family_ = Family::Independence;
  double parameter_ = 0.0;
};

/// Largest |tau| this implementation inverts for a family; beyond it the
/// parameter leaves the range where evaluation stays accurate.
double max_abs_tau(Family family) noexcept;

/// Inverts Kendall's tau. Throws DomainError when tau is not attainable by the
/// family (Clayton needs tau > 0, Gumbel tau >= 0, Frank tau != 0, and
/// |tau| <= max_abs_tau(family) for all of them). Frank is inverted by root
/// search to within 1e-10 on the tau scale.
BivariateCopula tau_to_param(Family family, double tau);

/// Kendall's tau-a: (concordant - discordant) / (n choose 2), in
/// O(n log n). Throws InputError on length mismatch or fewer than two points.
double kendall_tau(std::span<const double> x, std::span<const double> y);

enum class FitMethod { TauInversion, MaximumLikelihood };

/// Sum of log densities over the pairs.
double pair_log_likelihood(const BivariateCopula& copula, std::span<const UnitPair> pairs);

/// Fits a copula of the given family to at least 10 interior pairs. The
/// default inverts the empirical Kendall tau (clamped to the invertible
/// range); MaximumLikelihood refines that start by golden-section search on
/// the tau scale. Throws InputError for too few pairs or a constant
/// coordinate, DomainError when the empirical tau is unattainable.
BivariateCopula fit_bicop(std::span<const UnitPair> pairs, Family family,
                          FitMethod method = FitMethod::TauInversion);

}  // namespace cherryvine
