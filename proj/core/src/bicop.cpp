#include "cherryvine/bicop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "bivariate_normal.hpp"
#include "cherryvine/error.hpp"

namespace cherryvine {

namespace {

using detail::normal_cdf;
using detail::normal_quantile;

constexpr double kClaytonMax = 100.0;
constexpr double kGumbelMax = 100.0;
constexpr double kFrankMax = 200.0;
constexpr double kGaussianMaxTau = 0.999;
constexpr std::uintmax_t kRootIterations = 200;

// log(exp(a) + exp(b) - 1) for a, b >= 0.
double log_sum_exp_minus_one(double a, double b) {
  const double m = std::max(a, b);
  if (m < 1.0) return std::log1p(std::expm1(a) + std::expm1(b));
  return m + std::log(std::exp(a - m) + std::exp(b - m) - std::exp(-m));
}

// --- Gaussian --------------------------------------------------------------

double gaussian_log_density(double rho, double u, double v) {
  const double x = normal_quantile(u);
  const double y = normal_quantile(v);
  const double one_minus = 1.0 - rho * rho;
  return -0.5 * std::log(one_minus) -
         (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * one_minus);
}

double gaussian_h(double rho, double u, double v) {
  const double x = normal_quantile(u);
  const double y = normal_quantile(v);
  return normal_cdf((x - rho * y) / std::sqrt(1.0 - rho * rho));
}

double gaussian_h_inverse(double rho, double w, double v) {
  const double z = normal_quantile(w);
  const double y = normal_quantile(v);
  return normal_cdf(z * std::sqrt(1.0 - rho * rho) + rho * y);
}

// --- Clayton ---------------------------------------------------------------

double clayton_log_a(double theta, double u, double v) {
  return log_sum_exp_minus_one(-theta * std::log(u), -theta * std::log(v));
}

double clayton_log_density(double theta, double u, double v) {
  return std::log1p(theta) - (theta + 1.0) * (std::log(u) + std::log(v)) -
         (1.0 / theta + 2.0) * clayton_log_a(theta, u, v);
}

double clayton_cdf(double theta, double u, double v) {
  return std::exp(-clayton_log_a(theta, u, v) / theta);
}

double clayton_h(double theta, double u, double v) {
  return std::exp(-(theta + 1.0) * std::log(v) -
                  (1.0 / theta + 1.0) * clayton_log_a(theta, u, v));
}

double clayton_h_inverse(double theta, double w, double v) {
  // u^-theta = (w v^(theta+1))^(-theta/(theta+1)) + 1 - v^-theta
  const double log_t = -theta / (theta + 1.0) * (std::log(w) + (theta + 1.0) * std::log(v));
  const double t = std::exp(log_t);
  const double base = t - std::expm1(-theta * std::log(v));
  return std::exp(-std::log(base) / theta);
}

// --- Gumbel ----------------------------------------------------------------

struct GumbelTerms {
  double x, y, a, log_c;
};

GumbelTerms gumbel_terms(double theta, double u, double v) {
  const double x = -std::log(u);
  const double y = -std::log(v);
  const double lx = std::log(x);
  const double ly = std::log(y);
  const double m = std::max(lx, ly);
  const double log_a =
      m + std::log(std::exp(theta * (lx - m)) + std::exp(theta * (ly - m))) / theta;
  const double a = std::exp(log_a);
  return {x, y, a, -a};
}

double gumbel_log_density(double theta, double u, double v) {
  const GumbelTerms t = gumbel_terms(theta, u, v);
  return t.log_c - std::log(u) - std::log(v) + (theta - 1.0) * (std::log(t.x) + std::log(t.y)) +
         (1.0 - 2.0 * theta) * std::log(t.a) + std::log(t.a + theta - 1.0);
}

double gumbel_cdf(double theta, double u, double v) {
  return std::exp(gumbel_terms(theta, u, v).log_c);
}

double gumbel_h(double theta, double u, double v) {
  const GumbelTerms t = gumbel_terms(theta, u, v);
  return std::exp(t.log_c + (1.0 - theta) * std::log(t.a) + (theta - 1.0) * std::log(t.y) -
                  std::log(v));
}

// --- Frank (theta > 0; negative parameters use the reflection
// C_{-theta}(u, v) = u - C_theta(u, 1 - v)) ---------------------------------

double frank_log_density(double theta, double u, double v) {
  const double e = std::expm1(-theta);
  const double a = std::expm1(-theta * u);
  const double b = std::expm1(-theta * v);
  const double denom = e + a * b;
  return std::log(theta) + std::log(-e) - theta * (u + v) - 2.0 * std::log(std::abs(denom));
}

double frank_cdf(double theta, double u, double v) {
  const double e = std::expm1(-theta);
  const double a = std::expm1(-theta * u);
  const double b = std::expm1(-theta * v);
  return -std::log1p(a * b / e) / theta;
}

double frank_h(double theta, double u, double v) {
  const double e = std::expm1(-theta);
  const double a = std::expm1(-theta * u);
  const double b = std::expm1(-theta * v);
  return std::exp(-theta * v) * a / (e + a * b);
}

double frank_h_inverse(double theta, double w, double v) {
  const double e = std::expm1(-theta);
  const double b = std::expm1(-theta * v);
  const double a = w * e / (std::exp(-theta * v) - w * b);
  return -std::log1p(a) / theta;
}

// Debye function of order one, (1/x) * integral_0^x t / (e^t - 1) dt, x > 0.
double debye1(double x) {
  auto integrand = [](double t) { return t == 0.0 ? 1.0 : t / std::expm1(t); };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, x, 10, 1e-14);
  return integral / x;
}

double frank_tau(double theta) {
  const double t = std::abs(theta);
  const double tau = 1.0 - 4.0 / t * (1.0 - debye1(t));
  return theta < 0.0 ? -tau : tau;
}

void check_interior(double p) {
  if (!std::isfinite(p)) throw DomainError("copula argument is not finite");
}

template <class F>
double bracketed_root(F f, double lo, double hi, const char* what) {
  std::uintmax_t iterations = kRootIterations;
  const auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iterations);
  if (iterations >= kRootIterations) {
    throw NumericalError(std::string(what) + ": root search did not converge");
  }
  return 0.5 * (a + b);
}

}  // namespace

double clamp_unit(double u) noexcept { return std::clamp(u, kUnitClamp, 1.0 - kUnitClamp); }

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::Independence: return "independence";
    case Family::Gaussian: return "gaussian";
    case Family::Clayton: return "clayton";
    case Family::Gumbel: return "gumbel";
    case Family::Frank: return "frank";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Independence, Family::Gaussian, Family::Clayton, Family::Gumbel,
                   Family::Frank}) {
    if (family_name(f) == name) return f;
  }
  throw InputError("unknown copula family '" + std::string(name) + "'");
}

int parameter_count(Family family) noexcept { return family == Family::Independence ? 0 : 1; }

BivariateCopula::BivariateCopula(Family family, double parameter)
    : family_(family), parameter_(family == Family::Independence ? 0.0 : parameter) {
  const double p = parameter_;
  bool ok = std::isfinite(p);
  switch (family_) {
    case Family::Independence: break;
    case Family::Gaussian: ok = ok && p > -1.0 && p < 1.0; break;
    case Family::Clayton: ok = ok && p > 0.0; break;
    case Family::Gumbel: ok = ok && p >= 1.0; break;
    case Family::Frank: ok = ok && p != 0.0; break;
  }
  if (!ok) {
    std::ostringstream os;
    os << "parameter " << p << " is outside the domain of the " << family_name(family_)
       << " copula";
    throw DomainError(os.str());
  }
}

double BivariateCopula::log_density(double u, double v) const {
  check_interior(u);
  check_interior(v);
  u = clamp_unit(u);
  v = clamp_unit(v);
  const double p = parameter_;
  switch (family_) {
    case Family::Independence: return 0.0;
    case Family::Gaussian: return gaussian_log_density(p, u, v);
    case Family::Clayton: return clayton_log_density(p, u, v);
    case Family::Gumbel: return gumbel_log_density(p, u, v);
    case Family::Frank:
      return p > 0.0 ? frank_log_density(p, u, v) : frank_log_density(-p, u, 1.0 - v);
  }
  return 0.0;
}

double BivariateCopula::density(double u, double v) const { return std::exp(log_density(u, v)); }

double BivariateCopula::cdf(double u, double v) const {
  check_interior(u);
  check_interior(v);
  u = clamp_unit(u);
  v = clamp_unit(v);
  const double p = parameter_;
  switch (family_) {
    case Family::Independence: return u * v;
    case Family::Gaussian:
      return detail::bivariate_normal_cdf(normal_quantile(u), normal_quantile(v), p);
    case Family::Clayton: return clayton_cdf(p, u, v);
    case Family::Gumbel: return gumbel_cdf(p, u, v);
    case Family::Frank: return p > 0.0 ? frank_cdf(p, u, v) : u - frank_cdf(-p, u, 1.0 - v);
  }
  return u * v;
}

double BivariateCopula::h(double u, double given_v) const {
  check_interior(u);
  check_interior(given_v);
  u = clamp_unit(u);
  const double v = clamp_unit(given_v);
  const double p = parameter_;
  double out = u;
  switch (family_) {
    case Family::Independence: return u;
    case Family::Gaussian: out = gaussian_h(p, u, v); break;
    case Family::Clayton: out = clayton_h(p, u, v); break;
    case Family::Gumbel: out = gumbel_h(p, u, v); break;
    case Family::Frank: out = p > 0.0 ? frank_h(p, u, v) : frank_h(-p, u, 1.0 - v); break;
  }
  return clamp_unit(out);
}

double BivariateCopula::h_inverse(double w, double given_v) const {
  check_interior(w);
  check_interior(given_v);
  w = clamp_unit(w);
  const double v = clamp_unit(given_v);
  const double p = parameter_;
  double out = w;
  switch (family_) {
    case Family::Independence: return w;
    case Family::Gaussian: out = gaussian_h_inverse(p, w, v); break;
    case Family::Clayton: out = clayton_h_inverse(p, w, v); break;
    case Family::Frank:
      out = p > 0.0 ? frank_h_inverse(p, w, v) : frank_h_inverse(-p, w, 1.0 - v);
      break;
    case Family::Gumbel: {
      auto f = [&](double u) { return gumbel_h(p, u, v) - w; };
      const double lo = kUnitClamp;
      const double hi = 1.0 - kUnitClamp;
      if (f(lo) >= 0.0) return lo;
      if (f(hi) <= 0.0) return hi;
      out = bracketed_root(f, lo, hi, "gumbel h-inverse");
      break;
    }
  }
  if (!std::isfinite(out)) throw NumericalError("h-inverse produced a non-finite value");
  return clamp_unit(out);
}

double BivariateCopula::tau() const {
  const double p = parameter_;
  switch (family_) {
    case Family::Independence: return 0.0;
    case Family::Gaussian: return 2.0 / std::numbers::pi * std::asin(p);
    case Family::Clayton: return p / (p + 2.0);
    case Family::Gumbel: return 1.0 - 1.0 / p;
    case Family::Frank: return frank_tau(p);
  }
  return 0.0;
}

std::string BivariateCopula::to_string() const {
  std::ostringstream os;
  os << family_name(family_);
  if (family_ != Family::Independence) os << '(' << parameter_ << ')';
  return os.str();
}

double max_abs_tau(Family family) noexcept {
  switch (family) {
    case Family::Independence: return 0.0;
    case Family::Gaussian: return kGaussianMaxTau;
    case Family::Clayton: return kClaytonMax / (kClaytonMax + 2.0);
    case Family::Gumbel: return 1.0 - 1.0 / kGumbelMax;
    case Family::Frank: return frank_tau(kFrankMax);
  }
  return 0.0;
}

BivariateCopula tau_to_param(Family family, double tau) {
  if (!std::isfinite(tau) || std::abs(tau) >= 1.0) {
    throw DomainError("Kendall tau must lie in (-1, 1)");
  }
  auto unattainable = [&] {
    std::ostringstream os;
    os << "Kendall tau " << tau << " is not attainable by the " << family_name(family)
       << " copula";
    return DomainError(os.str());
  };
  if (family != Family::Independence && std::abs(tau) > max_abs_tau(family)) {
    throw unattainable();
  }
  switch (family) {
    case Family::Independence: return BivariateCopula::independence();
    case Family::Gaussian: return {family, std::sin(std::numbers::pi * tau / 2.0)};
    case Family::Clayton:
      if (tau <= 0.0) throw unattainable();
      return {family, 2.0 * tau / (1.0 - tau)};
    case Family::Gumbel:
      if (tau < 0.0) throw unattainable();
      return {family, 1.0 / (1.0 - tau)};
    case Family::Frank: {
      if (tau == 0.0) throw unattainable();
      const double target = std::abs(tau);
      auto f = [&](double theta) { return frank_tau(theta) - target; };
      // tau ~ theta / 9 near zero.
      const double lo = std::min(1e-12, 9.0 * target * 0.5);
      const double theta = bracketed_root(f, lo, kFrankMax, "frank tau inversion");
      return {family, tau < 0.0 ? -theta : theta};
    }
  }
  throw unattainable();
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (y.size() != n) throw InputError("kendall_tau: length mismatch");
  if (n < 2) throw InputError("kendall_tau: needs at least two observations");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  auto pairs_in_runs = [&](auto same) {
    std::int64_t total = 0;
    std::int64_t run = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (same(i)) {
        ++run;
      } else {
        total += run * (run - 1) / 2;
        run = 1;
      }
    }
    return total + run * (run - 1) / 2;
  };
  const std::int64_t x_ties =
      pairs_in_runs([&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
  const std::int64_t joint_ties = pairs_in_runs([&](std::size_t i) {
    return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]];
  });

  // Merge sort on y counting strict inversions.
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buffer(n);
  std::int64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
          inversions += static_cast<std::int64_t>(mid - i);
          buffer[k++] = ys[j++];
        } else {
          buffer[k++] = ys[i++];
        }
      }
      while (i < mid) buffer[k++] = ys[i++];
      while (j < hi) buffer[k++] = ys[j++];
    }
    std::swap(ys, buffer);
  }
  std::int64_t y_ties = 0;
  {
    std::int64_t run = 1;
    for (std::size_t i = 1; i < n; ++i) {
      if (ys[i] == ys[i - 1]) {
        ++run;
      } else {
        y_ties += run * (run - 1) / 2;
        run = 1;
      }
    }
    y_ties += run * (run - 1) / 2;
  }

  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t score = total - x_ties - y_ties + joint_ties - 2 * inversions;
  return static_cast<double>(score) / static_cast<double>(total);
}

double pair_log_likelihood(const BivariateCopula& copula, std::span<const UnitPair> pairs) {
  if (copula.is_independence()) return 0.0;
  double total = 0.0;
  for (const auto& p : pairs) total += copula.log_density(p.u, p.v);
  return total;
}

BivariateCopula fit_bicop(std::span<const UnitPair> pairs, Family family, FitMethod method) {
  if (pairs.size() < 10) throw InputError("fit_bicop needs at least 10 pairs");
  std::vector<double> us(pairs.size());
  std::vector<double> vs(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    us[i] = pairs[i].u;
    vs[i] = pairs[i].v;
    if (!(us[i] > 0.0 && us[i] < 1.0 && vs[i] > 0.0 && vs[i] < 1.0)) {
      throw InputError("fit_bicop: pair outside the open unit square");
    }
  }
  auto constant = [](const std::vector<double>& c) {
    return std::all_of(c.begin(), c.end(), [&](double x) { return x == c.front(); });
  };
  if (constant(us) || constant(vs)) {
    throw InputError("fit_bicop: constant coordinate, Kendall tau is undefined");
  }
  if (family == Family::Independence) return BivariateCopula::independence();

  const double limit = max_abs_tau(family);
  const double tau = std::clamp(kendall_tau(us, vs), -limit, limit);
  BivariateCopula start = tau_to_param(family, tau);
  if (method == FitMethod::TauInversion) return start;

  // Golden-section search for the maximum likelihood on the tau scale.
  double lo = tau - 0.2;
  double hi = tau + 0.2;
  switch (family) {
    case Family::Clayton: lo = std::max(lo, 1e-6); break;
    case Family::Gumbel: lo = std::max(lo, 0.0); break;
    case Family::Frank:
      if (tau > 0.0) lo = std::max(lo, 1e-6);
      else hi = std::min(hi, -1e-6);
      break;
    default: break;
  }
  lo = std::max(lo, -limit);
  hi = std::min(hi, limit);
  auto negative_loglik = [&](double t) {
    return -pair_log_likelihood(tau_to_param(family, t), pairs);
  };
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - ratio * (hi - lo);
  double d = lo + ratio * (hi - lo);
  double fc = negative_loglik(c);
  double fd = negative_loglik(d);
  while (hi - lo > 1e-7) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = negative_loglik(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = negative_loglik(d);
    }
  }
  BivariateCopula refined = tau_to_param(family, 0.5 * (lo + hi));
  return pair_log_likelihood(refined, pairs) >= pair_log_likelihood(start, pairs) ? refined
                                                                                   : start;
}

}  // namespace cherryvine
