#include "parcontest/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "binomial.hpp"
#include "quadrature.hpp"

namespace parcontest {

namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("q outside [0,1]");
}

double supply_at(std::span<const AllocationCurve> curves, double x) {
  double total = 0.0;
  for (const auto& curve : curves) total += curve.invert(x);
  return total;
}

// max{x in [0, x_max] : Q(x) >= q} by Illinois regula falsi; terminates on
// |Q(lo) - q| <= 1e-12 or an ulp-tight bracket (supply jumps).
double invert_supply_impl(std::span<const AllocationCurve> curves, double q,
                          double x_max, double tol) {
  if (q <= 0.0) return x_max;
  double hi = x_max;
  double fhi = supply_at(curves, hi) - q;
  if (fhi >= 0.0) return hi;
  double lo = 0.0;
  double flo = static_cast<double>(curves.size()) - q;  // Q(0) = m
  if (flo < 0.0) return 0.0;
  int side = 0;
  for (int it = 0; it < 400; ++it) {
    if (flo <= tol) break;
    if (hi - lo <= 1e-16 * hi + 1e-300) break;
    double x = (lo * fhi - hi * flo) / (fhi - flo);
    if (!(x > lo && x < hi) || (it % 8) == 7) x = 0.5 * (lo + hi);
    const double fx = supply_at(curves, x) - q;
    if (fx >= 0.0) {
      lo = x;
      flo = fx;
      if (side == 1) fhi *= 0.5;
      side = 1;
    } else {
      hi = x;
      fhi = fx;
      if (side == -1) flo *= 0.5;
      side = -1;
    }
  }
  return lo;
}

// x_j(Phi_j(t)) without inverting: clamp of the market-clearing level.
double allocation_level(const ChoiceProfile& profile, std::size_t j,
                        double t) {
  const auto& curve = profile.curves()[j];
  if (curve.is_constant()) return curve.top();
  return std::clamp(profile.invert_supply(t), curve.bottom(), curve.top());
}

}  // namespace

ChoiceProfile::ChoiceProfile(std::vector<AllocationCurve> curves,
                             SolverOptions options)
    : curves_(std::move(curves)), options_(options) {
  if (curves_.empty())
    throw std::invalid_argument("market needs at least one contest");
  const int n = curves_.front().field_size();
  for (const auto& curve : curves_)
    if (curve.field_size() != n)
      throw std::domain_error("contests disagree on field size");

  x_max_ = 0.0;
  for (std::size_t j = 0; j < curves_.size(); ++j) {
    x_max_ = std::max(x_max_, curves_[j].top());
    (curves_[j].is_constant() ? m1_ : m2_).push_back(j);
  }

  q_star_ = 1.0;
  if (!m1_.empty()) {
    double best = -1.0;
    for (std::size_t j : m1_) best = std::max(best, curves_[j].top());
    x_star_ = best;
    for (std::size_t j : m1_)
      if (curves_[j].top() == best) m1_star_.push_back(j);
    double supply = 0.0;
    for (std::size_t j : m2_) supply += curves_[j].invert(best);
    q_star_ = std::min(1.0, supply);
  }

  kinks_.push_back(0.0);
  for (const auto& curve : curves_) {
    kinks_.push_back(curve.top());
    kinks_.push_back(curve.bottom());
  }
  std::sort(kinks_.begin(), kinks_.end());
  kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());
}

double ChoiceProfile::aggregate_supply(double x) const {
  return supply_at(curves_, x);
}

double ChoiceProfile::invert_supply(double q) const {
  check_q(q);
  return invert_supply_impl(curves_, q, x_max_, options_.bisect_tol);
}

std::vector<double> ChoiceProfile::choices(double q) const {
  check_q(q);
  std::vector<double> phi(curves_.size(), 0.0);
  if (!m2_.empty()) {
    const double level = invert_supply(q);
    for (std::size_t j : m2_) phi[j] = curves_[j].invert(level);
  }
  if (!m1_star_.empty() && q > q_star_) {
    const double share = (q - q_star_) / static_cast<double>(m1_star_.size());
    for (std::size_t j : m1_star_) phi[j] = share;
  }
  return phi;
}

double ChoiceProfile::choice(std::size_t j, double q) const {
  check_q(q);
  if (j >= curves_.size()) throw std::out_of_range("contest index");
  if (curves_[j].is_constant()) {
    const bool top = std::find(m1_star_.begin(), m1_star_.end(), j) !=
                     m1_star_.end();
    if (!top || q <= q_star_) return 0.0;
    return (q - q_star_) / static_cast<double>(m1_star_.size());
  }
  return curves_[j].invert(invert_supply(q));
}

double aggregate_supply(std::span<const AllocationCurve> curves, double x) {
  return supply_at(curves, x);
}

double invert_supply(std::span<const AllocationCurve> curves, double q) {
  check_q(q);
  double x_max = 0.0;
  for (const auto& curve : curves) x_max = std::max(x_max, curve.top());
  return invert_supply_impl(curves, q, x_max, SolverOptions{}.bisect_tol);
}

double effort(const ChoiceProfile& profile, const SkillDistribution& dist,
              std::size_t j, double q) {
  check_q(q);
  const auto& curve = profile.curves()[j];
  if (curve.is_constant()) return 0.0;
  const double lo =
      std::clamp(profile.invert_supply(1.0), curve.bottom(), curve.top());
  const double hi =
      std::clamp(profile.invert_supply(q), curve.bottom(), curve.top());
  if (hi <= lo) return 0.0;
  auto integrand = [&](double x) {
    return dist.quantile_skill(profile.aggregate_supply(x));
  };
  // v's own kinks land where Q(x) crosses a knot quantile
  std::vector<double> cuts = profile.supply_kinks();
  for (double kq : dist.quantile_breakpoints())
    cuts.push_back(profile.invert_supply(kq));
  return detail::integrate(integrand, lo, hi, cuts,
                           profile.options().quad_tol);
}

double interim_utility(const ChoiceProfile& profile,
                       const SkillDistribution& dist, std::size_t j,
                       double q) {
  check_q(q);
  return dist.quantile_skill(q) * allocation_level(profile, j, q) -
         effort(profile, dist, j, q);
}

double interim_utility_integrated(const ChoiceProfile& profile,
                                  const SkillDistribution& dist,
                                  std::size_t j, double q) {
  check_q(q);
  const double base =
      dist.quantile_skill(1.0) * allocation_level(profile, j, 1.0);
  if (q >= 1.0) return base;
  // The tail -int_q^1 x_j(Phi_j(t)) dv(t) evaluated in skill space,
  // int_{v(1)}^{v(q)} x_j(Phi_j(1 - F(s))) ds, which sidesteps the endpoint
  // singularity of v' (power family) instead of chasing it adaptively.
  const double s_lo = dist.quantile_skill(1.0);
  const double s_hi = dist.quantile_skill(q);
  if (!std::isfinite(s_hi)) return s_hi;  // unbounded skill at q = 0
  // Kinks sit where 1 - F(s) crosses a supply-kink quantile or a v knot.
  std::vector<double> cuts;
  for (double x : profile.supply_kinks()) {
    const double t = profile.aggregate_supply(x);
    if (t > q && t < 1.0) cuts.push_back(dist.quantile_skill(t));
  }
  for (double kq : dist.quantile_breakpoints())
    if (kq > q) cuts.push_back(dist.quantile_skill(kq));
  auto integrand = [&](double s) {
    return allocation_level(profile, j, 1.0 - dist.cdf(s));
  };
  return base + detail::integrate(integrand, s_lo, s_hi, cuts,
                                  profile.options().quad_tol);
}

double verify_choice_strategy(
    std::span<const AllocationCurve> curves,
    const std::function<double(std::size_t, double)>& phi, int grid_size,
    const SolverOptions& options) {
  if (grid_size < 2) throw std::invalid_argument("grid too small");
  const std::size_t m = curves.size();
  double worst = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double q = static_cast<double>(i) / (grid_size - 1);
    const double base = std::min(q, 1.0 - options.activity_step);
    double best = 0.0;
    double active_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double level = curves[j].value(std::clamp(phi(j, q), 0.0, 1.0));
      best = std::max(best, level);
      const double slope =
          (phi(j, base + options.activity_step) - phi(j, base)) /
          options.activity_step;
      if (slope > options.activity_eps)
        active_min = std::min(active_min, level);
    }
    if (std::isfinite(active_min)) worst = std::max(worst, best - active_min);
  }
  return worst;
}

double verify_equilibrium(const ChoiceProfile& profile, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("grid too small");
  const auto& options = profile.options();
  const std::size_t m = profile.contest_count();
  double worst = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double q = static_cast<double>(i) / (grid_size - 1);
    const double base = std::min(q, 1.0 - options.activity_step);
    const auto at_q = profile.choices(q);
    const auto at_base = profile.choices(base);
    const auto at_next = profile.choices(base + options.activity_step);
    double best = 0.0;
    double active_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double level = profile.curves()[j].value(at_q[j]);
      best = std::max(best, level);
      const double slope = (at_next[j] - at_base[j]) / options.activity_step;
      if (slope > options.activity_eps)
        active_min = std::min(active_min, level);
    }
    if (std::isfinite(active_min)) worst = std::max(worst, best - active_min);
  }
  return worst;
}

double disclosed_effort(const ChoiceProfile& profile,
                        const SkillDistribution& dist, std::size_t j, int k,
                        double q) {
  check_q(q);
  const auto& curve = profile.curves()[j];
  const int n = curve.field_size();
  if (k < 1 || k > n) throw std::domain_error("disclosed_effort: k");
  const double p = profile.choice(j, 1.0);
  if (p <= 0.0)
    throw std::domain_error("disclosed_effort: contest attracts no entrants");
  if (k == 1 || curve.is_constant()) return 0.0;
  const double phi_q = profile.choice(j, q);
  if (phi_q >= p) return 0.0;
  std::vector<double> cuts;
  for (double x : profile.supply_kinks()) {
    const double phi = curve.invert(x);
    if (phi > phi_q && phi < p) cuts.push_back(phi);
  }
  auto integrand = [&](double phi) {
    const double t = profile.aggregate_supply(curve.value(phi));
    return dist.quantile_skill(t) *
           (-conditional_allocation_derivative(curve.prizes(), k, phi / p)) /
           p;
  };
  return detail::integrate(integrand, phi_q, p, cuts,
                           profile.options().quad_tol);
}

double expected_prize_identity_residual(const PrizeStructure& w, double p,
                                        double phi_level) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("participation probability outside (0,1]");
  if (!(phi_level >= 0.0 && phi_level <= p))
    throw std::domain_error("cumulative level outside [0,p]");
  const int n = w.field_size();
  const double psi = std::min(phi_level / p, 1.0);
  const auto pmf = detail::binomial_pmf(n - 1, p);  // k-1 entrants beside me
  double lhs = 0.0;
  for (int k = 1; k <= n; ++k)
    lhs += pmf[k - 1] * conditional_allocation(w, k, psi);
  const double rhs = binomial_mixture(w.weights, phi_level);
  return std::abs(lhs - rhs);
}

}  // namespace parcontest
