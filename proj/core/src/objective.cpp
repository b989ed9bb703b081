#include "parcontest/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "parcontest/market_config.hpp"

#include "binomial.hpp"
#include "quadrature.hpp"

namespace parcontest {

namespace {

void check_phi(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::domain_error("phi outside [0,1]");
}

void check_alpha(std::span<const double> alpha) {
  if (alpha.empty()) throw std::invalid_argument("alpha must be non-empty");
  for (double a : alpha)
    if (!std::isfinite(a)) throw std::invalid_argument("alpha not finite");
}

// sum_k alpha_k g_k(phi), the instantaneous rank weight.
double weight_density(std::span<const double> alpha, double phi) {
  const int n = static_cast<int>(alpha.size());
  const auto pmf = detail::binomial_pmf(n - 1, phi);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) acc += alpha[k] * pmf[k];
  return acc;
}

// T * max_k xi_k(phi) with xi_k(phi) = Pr[Bin(n-1,phi) <= k-1] / k.
double envelope(double budget, int n, double phi) {
  const auto pmf = detail::binomial_pmf(n - 1, phi);
  double best = 0.0;
  double cum = 0.0;
  for (int k = 1; k <= n; ++k) {
    cum += pmf[k - 1];
    best = std::max(best, cum / k);
  }
  return budget * best;
}

// max{phi in [0,1] : envelope(phi) >= x}, bisection on the non-increasing
// upper envelope.
double envelope_inverse(double budget, int n, double x) {
  if (budget <= 0.0) return x <= 0.0 ? 1.0 : 0.0;
  if (x <= budget / n) return 1.0;
  if (x >= budget) return 0.0;
  double lo = 0.0, hi = 1.0;  // envelope(lo) >= x > envelope(hi)
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (envelope(budget, n, mid) >= x)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16) break;
  }
  return lo;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double rank_density(int k, int n, double phi) {
  if (k < 1 || k > n) throw std::domain_error("rank_density: k out of [1,n]");
  check_phi(phi);
  return detail::binomial_pmf(n - 1, phi)[k - 1];
}

double rank_weight(std::span<const double> alpha, double phi) {
  check_alpha(alpha);
  check_phi(phi);
  const int n = static_cast<int>(alpha.size());
  // n sum_k alpha_k int_0^phi g_k = sum_i Pr[Bin(n,phi)=i] (alpha_1+..+alpha_i)
  const auto pmf = detail::binomial_pmf(n, phi);
  double acc = 0.0;
  double prefix = 0.0;
  for (int i = 1; i <= n; ++i) {
    prefix += alpha[i - 1];
    acc += pmf[i] * prefix;
  }
  return acc;
}

bool is_weight_monotone(std::span<const double> alpha, int grid, double tol) {
  check_alpha(alpha);
  bool sorted_nonneg = alpha.back() >= 0.0;
  for (std::size_t k = 0; sorted_nonneg && k + 1 < alpha.size(); ++k)
    sorted_nonneg = alpha[k] >= alpha[k + 1] && alpha[k] >= 0.0;
  if (sorted_nonneg) return true;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double phi = static_cast<double>(i) / (grid - 1);
    const double h = weight_density(alpha, phi);
    if (h < -tol || h > prev + tol) return false;
    prev = h;
  }
  return true;
}

double effort_utility(std::size_t j, std::span<const AllocationCurve> curves,
                      const SkillDistribution& dist,
                      std::span<const double> alpha,
                      const SolverOptions& options) {
  if (j >= curves.size()) throw std::out_of_range("designer index");
  check_alpha(alpha);
  const auto& own = curves[j];
  if (static_cast<int>(alpha.size()) != own.field_size())
    throw std::invalid_argument("alpha length must equal field size");
  if (own.is_constant())
    throw UnsupportedCaseError(
        "effort_utility needs a strictly decreasing own curve; use the "
        "simulation oracle for constant prize structures");
  std::vector<double> cuts;
  for (const auto& curve : curves) {
    cuts.push_back(curve.top());
    cuts.push_back(curve.bottom());
  }
  for (double kq : dist.quantile_breakpoints())
    cuts.push_back(invert_supply(curves, kq));
  auto integrand = [&](double x) {
    double supply = 0.0;
    for (const auto& curve : curves) supply += curve.invert(x);
    return dist.quantile_skill(supply) * rank_weight(alpha, own.invert(x));
  };
  return detail::integrate(integrand, 0.0, own.top(), cuts, options.quad_tol);
}

double participation_utility(std::size_t j,
                             std::span<const AllocationCurve> curves,
                             double theta, const SolverOptions& options) {
  if (j >= curves.size()) throw std::out_of_range("designer index");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("theta outside [0,1]");
  ChoiceProfile profile({curves.begin(), curves.end()}, options);
  return profile.field_size() * profile.choice(j, theta);
}

BestResponse best_response_participation(
    std::span<const AllocationCurve> opponents, double theta, double budget,
    int n, const SolverOptions& options) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("theta outside [0,1]");
  if (!(budget >= 0.0)) throw std::domain_error("budget must be nonnegative");
  std::vector<double> shares(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::vector<AllocationCurve> curves;
    curves.emplace_back(PrizeStructure::simple(k, budget, n));
    curves.insert(curves.end(), opponents.begin(), opponents.end());
    ChoiceProfile profile(std::move(curves), options);
    shares[k - 1] = profile.choice(0, theta);
  }
  const double top = *std::max_element(shares.begin(), shares.end());
  constexpr double kShareTie = 1e-9;
  BestResponse best;
  for (int k = 1; k <= n; ++k) {
    if (shares[k - 1] >= top - kShareTie) {  // smallest k on ties
      best.k = k;
      break;
    }
  }
  best.share = shares[best.k - 1];
  best.utility = n * best.share;
  // Consistency with the argmax-of-xi characterization: some share-optimal
  // rank count must sit in argmax_k xi_k(share). Degenerate markets (e.g.
  // the designer outprices everyone at theta) tie all k on share, and the
  // smallest-k selection need not be the xi maximizer itself.
  double xi_best = 0.0;
  for (int k = 1; k <= n; ++k)
    xi_best = std::max(xi_best, xi(k, n, best.share));
  best.k_in_xi_argmax = false;
  for (int k = 1; k <= n; ++k)
    if (shares[k - 1] >= top - kShareTie &&
        xi(k, n, best.share) >= xi_best - 1e-9)
      best.k_in_xi_argmax = true;
  return best;
}

PrizeStructure random_feasible_structure(std::uint64_t seed, int n,
                                         double budget) {
  auto u = sample_quantiles(seed, static_cast<std::size_t>(n) + 1);
  const double fraction = u.back();
  u.pop_back();
  std::sort(u.begin(), u.end(), std::greater<>());
  const double total = std::accumulate(u.begin(), u.end(), 0.0);
  if (total > 0.0)
    for (double& w : u) w *= fraction * budget / total;
  return {std::move(u), budget};
}

bool wta_dominance_check(std::span<const double> alpha, double budget, int n,
                         std::span<const AllocationCurve> opponents,
                         const SkillDistribution& dist, int trials,
                         std::uint64_t seed, const SolverOptions& options) {
  if (!is_weight_monotone(alpha))
    throw std::invalid_argument("wta_dominance_check: alpha not weight-monotone");
  const AllocationCurve wta{PrizeStructure::simple(1, budget, n)};
  auto utility_of = [&](const AllocationCurve& own) {
    std::vector<AllocationCurve> curves{own};
    curves.insert(curves.end(), opponents.begin(), opponents.end());
    return effort_utility(0, curves, dist, alpha, options);
  };
  const double u_wta = budget > 0.0 ? utility_of(wta) : 0.0;
  for (int t = 0; t < trials; ++t) {
    PrizeStructure w = random_feasible_structure(mix_seed(seed, t), n, budget);
    const AllocationCurve rival{w};
    double u_rival = 0.0;
    if (!rival.is_constant()) {
      u_rival = utility_of(rival);
    } else if (rival.top() > 0.0) {
      // epsilon-perturbed strictly decreasing proxy for the constant case
      auto proxy = w.weights;
      proxy.front() *= 1.0 + 1e-6;
      proxy.back() *= 1.0 - 1e-6;
      u_rival = utility_of(AllocationCurve{{std::move(proxy), w.budget}});
    }
    if (u_wta < u_rival - 1e-7) return false;
    if (!single_crossing_dominates(wta, rival)) return false;
  }
  return true;
}

SpeSolution solve_common_theta_spe(std::span<const double> budgets,
                                   double theta, int n,
                                   const SolverOptions& options) {
  if (budgets.empty()) throw std::invalid_argument("spe: no designers");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::domain_error("theta outside [0,1]");
  if (n < 1) throw std::domain_error("spe: field size");
  for (double t : budgets)
    if (!(t >= 0.0 && std::isfinite(t)))
      throw std::domain_error("spe: budgets must be nonnegative reals");
  const std::size_t m = budgets.size();
  const double t_max = *std::max_element(budgets.begin(), budgets.end());

  auto supply = [&](double x) {
    double total = 0.0;
    for (double t : budgets) total += envelope_inverse(t, n, x);
    return total;
  };
  // X* = max{x : Qbar(x) >= theta}, bisection keeping the left bracket.
  double x_star = 0.0;
  if (t_max > 0.0) {
    double lo = 0.0, hi = t_max;
    if (supply(hi) >= theta) {
      lo = hi;
    } else {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (supply(mid) >= theta)
          lo = mid;
        else
          hi = mid;
        if (hi - lo < 1e-16 * t_max) break;
      }
    }
    x_star = lo;
  }

  SpeSolution out;
  out.clearing_level = x_star;
  const double w_plus = t_max / n;
  const double above = w_plus * (1.0 + 1e-9) + 1e-300;
  double limit_sum = 0.0;
  for (double t : budgets) limit_sum += envelope_inverse(t, n, above);
  out.unique_max_budget_case = limit_sum < theta;

  std::vector<AllocationCurve> curves;
  for (double t : budgets) {
    const double phi = envelope_inverse(t, n, x_star);
    double xi_best = 0.0;
    int k_star = 1;
    for (int k = 1; k <= n; ++k) {
      const double value = xi(k, n, phi);
      if (value > xi_best + 1e-12) {
        xi_best = value;
        k_star = k;
      }
    }
    out.k_star.push_back(k_star);
    out.structures.push_back(PrizeStructure::simple(k_star, t, n));
    curves.emplace_back(out.structures.back());
  }

  // Realized shares come from the induced contestant equilibrium; in the
  // unique-max-budget case this is where the top designer's share drops to
  // theta minus everyone else's.
  ChoiceProfile profile(curves, options);
  out.shares = profile.choices(theta);
  for (double share : out.shares) out.utilities.push_back(n * share);

  out.max_deviation_gain = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (int k = 1; k <= n; ++k) {
      if (k == out.k_star[j]) continue;
      auto deviated = curves;
      deviated[j] = AllocationCurve{PrizeStructure::simple(k, budgets[j], n)};
      ChoiceProfile dev_profile(std::move(deviated), options);
      const double gain = n * dev_profile.choice(j, theta) - out.utilities[j];
      out.max_deviation_gain = std::max(out.max_deviation_gain, gain);
    }
  }
  return out;
}

}  // namespace parcontest
