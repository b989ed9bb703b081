#include "parcontest/prize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace parcontest {

namespace {

constexpr int kInverseTableSize = 1025;
constexpr double kPhiTol = 1e-15;

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

void check_phi(double phi) {
  if (!(phi >= 0.0 && phi <= 1.0))
    throw std::domain_error("phi outside [0,1]");
}

}  // namespace

PrizeStructure::PrizeStructure(std::vector<double> w, double budget_in)
    : weights(std::move(w)), budget(budget_in) {
  require(!weights.empty(), "prize structure must have at least one rank");
  require(std::isfinite(budget) && budget >= 0.0,
          "budget must be a nonnegative real");
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    require(std::isfinite(weights[k]) && weights[k] >= 0.0,
            "prizes must be nonnegative");
    require(k == 0 || weights[k] <= weights[k - 1],
            "prizes must be non-increasing");
    total += weights[k];
  }
  require(total <= budget * (1.0 + 1e-12) + 1e-12,
          "prizes exceed the budget");
}

PrizeStructure PrizeStructure::simple(int k, double budget, int n) {
  if (k < 1 || k > n) throw std::domain_error("simple contest: k out of [1,n]");
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  std::fill_n(w.begin(), k, budget / k);
  return {std::move(w), budget};
}

double PrizeStructure::total() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

bool PrizeStructure::is_simple() const {
  const double w1 = weights.front();
  if (w1 <= 0.0) return false;
  std::size_t k = 0;
  while (k < weights.size() && weights[k] == w1) ++k;
  return std::all_of(weights.begin() + k, weights.end(),
                     [](double w) { return w == 0.0; });
}

nlohmann::json PrizeStructure::to_json() const {
  return {{"prizes", weights}, {"budget", budget}};
}

double binomial_mixture(std::span<const double> coeff, double phi) {
  const int n = static_cast<int>(coeff.size());
  if (n == 1) return coeff[0];
  if (phi <= 0.0) return coeff[0];
  if (phi >= 1.0) return coeff[n - 1];
  double acc = 0.0;
  if (phi <= 0.5) {
    double term = std::pow(1.0 - phi, n - 1);
    const double ratio = phi / (1.0 - phi);
    for (int k = 1; k <= n; ++k) {
      acc += coeff[k - 1] * term;
      term *= ratio * static_cast<double>(n - k) / static_cast<double>(k);
    }
  } else {
    double term = std::pow(phi, n - 1);
    const double ratio = (1.0 - phi) / phi;
    for (int k = n; k >= 1; --k) {
      acc += coeff[k - 1] * term;
      term *= ratio * static_cast<double>(k - 1) /
              static_cast<double>(n - k + 1);
    }
  }
  return acc;
}

AllocationCurve::AllocationCurve(PrizeStructure prizes)
    : prizes_(std::move(prizes)) {
  const auto& w = prizes_.weights;
  const int n = prizes_.field_size();
  is_constant_ = w.front() == w.back();
  mean_ = prizes_.total() / n;
  derivative_coeff_.resize(n > 1 ? n - 1 : 0);
  for (int k = 0; k + 1 < n; ++k) derivative_coeff_[k] = w[k] - w[k + 1];
  if (!is_constant_) {
    table_.resize(kInverseTableSize);
    for (int i = 0; i < kInverseTableSize; ++i)
      table_[i] = value(static_cast<double>(i) / (kInverseTableSize - 1));
  }
}

double AllocationCurve::value(double phi) const {
  check_phi(phi);
  if (is_constant_) return prizes_.weights.front();
  return binomial_mixture(prizes_.weights, phi);
}

double AllocationCurve::derivative(double phi) const {
  check_phi(phi);
  const int n = prizes_.field_size();
  if (is_constant_ || n == 1) return 0.0;
  return -(n - 1) * binomial_mixture(derivative_coeff_, phi);
}

double AllocationCurve::invert(double x) const {
  if (x < 0.0) throw std::domain_error("invert: negative prize level");
  if (x <= bottom()) return 1.0;
  if (x >= top()) return 0.0;
  if (is_constant_) return 0.0;  // x > constant value at this point
  // Bracket via the precomputed table (strictly decreasing values).
  auto it = std::lower_bound(table_.begin(), table_.end(), x,
                             [](double v, double target) { return v > target; });
  // table_[it-1] > x >= table_[it]
  const double h = 1.0 / (kInverseTableSize - 1);
  std::size_t idx = static_cast<std::size_t>(it - table_.begin());
  double lo = (idx - 1) * h;  // value(lo) > x
  double hi = idx * h;        // value(hi) <= x
  // Newton from the cell midpoint, bisection fallback.
  double phi = 0.5 * (lo + hi);
  for (int step = 0; step < 4; ++step) {
    const double f = value(phi) - x;
    const double d = derivative(phi);
    if (d >= 0.0) break;
    const double next = phi - f / d;
    if (!(next > lo && next < hi)) break;
    if (std::abs(next - phi) < kPhiTol) return next;
    phi = next;
  }
  while (hi - lo > kPhiTol) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) >= x)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double xi(int k, int n, double phi) {
  if (k < 1 || k > n) throw std::domain_error("xi: k out of [1,n]");
  check_phi(phi);
  std::vector<double> coeff(static_cast<std::size_t>(n), 0.0);
  std::fill_n(coeff.begin(), k, 1.0 / k);
  return binomial_mixture(coeff, phi);
}

double conditional_allocation(const PrizeStructure& w, int k, double phi) {
  const int n = w.field_size();
  if (k < 1 || k > n) throw std::domain_error("conditional_allocation: k");
  check_phi(phi);
  return binomial_mixture(std::span(w.weights).first(k), phi);
}

double conditional_allocation_derivative(const PrizeStructure& w, int k,
                                         double phi) {
  const int n = w.field_size();
  if (k < 1 || k > n)
    throw std::domain_error("conditional_allocation_derivative: k");
  check_phi(phi);
  if (k == 1) return 0.0;
  std::vector<double> diff(static_cast<std::size_t>(k - 1));
  for (int l = 0; l + 1 < k; ++l) diff[l] = w.weights[l] - w.weights[l + 1];
  return -(k - 1) * binomial_mixture(diff, phi);
}

bool single_crossing(std::span<const double> f, std::span<const double> g,
                     double tol) {
  if (f.size() != g.size())
    throw std::invalid_argument("single_crossing: size mismatch");
  std::ptrdiff_t last_above = -1;
  std::ptrdiff_t first_below = static_cast<std::ptrdiff_t>(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    if (d > tol) last_above = static_cast<std::ptrdiff_t>(i);
    if (d < -tol && first_below == static_cast<std::ptrdiff_t>(f.size()))
      first_below = static_cast<std::ptrdiff_t>(i);
  }
  return last_above < first_below;
}

bool single_crossing_dominates(const AllocationCurve& a,
                               const AllocationCurve& b, int grid,
                               double tol) {
  if (a.field_size() != b.field_size())
    throw std::domain_error("single_crossing_dominates: field size mismatch");
  if (a.mean() < b.mean() - 1e-12) return false;
  std::vector<double> fa(grid), fb(grid), da(grid), db(grid);
  for (int i = 0; i < grid; ++i) {
    const double phi = static_cast<double>(i) / (grid - 1);
    fa[i] = a.value(phi);
    fb[i] = b.value(phi);
    da[i] = -a.derivative(phi);
    db[i] = -b.derivative(phi);
  }
  return single_crossing(fa, fb, tol) && single_crossing(da, db, tol);
}

}  // namespace parcontest
