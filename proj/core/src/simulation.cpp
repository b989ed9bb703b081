#include "parcontest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "quadrature.hpp"

namespace parcontest {

namespace {

constexpr int kGridNodes = 4097;

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + (index + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t next_u64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double next_unit(std::uint64_t& state) {
  return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

double interp(const std::vector<double>& tab, double q) {
  const double pos = std::clamp(q, 0.0, 1.0) * (tab.size() - 1);
  const std::size_t i =
      std::min(tab.size() - 2, static_cast<std::size_t>(pos));
  const double f = pos - static_cast<double>(i);
  return tab[i] * (1.0 - f) + tab[i + 1] * f;
}

Estimate summarize(const double* slab, std::size_t count,
                   std::size_t stride) {
  double sum = 0.0;
  for (std::size_t r = 0; r < count; ++r) sum += slab[r * stride];
  const double mean = sum / count;
  if (count < 2) return {mean, 0.0};
  double ss = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    const double d = slab[r * stride] - mean;
    ss += d * d;
  }
  const double var = ss / (count - 1);
  return {mean, 1.96 * std::sqrt(var / count)};
}

void run_blocks(std::size_t count, int threads,
                const std::function<void(std::size_t)>& body) {
  if (threads <= 1) {
    for (std::size_t r = 0; r < count; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      for (std::size_t r = lo; r < hi; ++r) body(r);
    });
  }
  for (auto& worker : pool) worker.join();
}

struct Entrant {
  double q = 0.0;
  double effort = 0.0;
  int index = 0;
};

// effort descending, then higher skill (lower q), then index.
bool outranks(const Entrant& a, const Entrant& b) {
  if (a.effort != b.effort) return a.effort > b.effort;
  if (a.q != b.q) return a.q < b.q;
  return a.index < b.index;
}

}  // namespace

Simulator::Simulator(GameConfig config, const ChoiceProfile& profile)
    : config_(std::move(config)),
      prizes_(config_.prizes),
      contests_(config_.prizes.size()) {
  if (config_.replications < 1)
    throw std::domain_error("simulator: replications must be >= 1");
  if (contests_ != profile.contest_count())
    throw std::domain_error("simulator: contest count mismatch");
  if (config_.n != profile.field_size())
    throw std::domain_error("simulator: field size mismatch");
  for (const auto& w : prizes_)
    if (w.field_size() != config_.n)
      throw std::domain_error("simulator: prize vector length mismatch");
  for (double q : config_.probe_quantiles)
    if (!(q >= 0.0 && q <= 1.0))
      throw std::domain_error("simulator: probe quantile outside [0,1]");

  const auto& options = profile.options();
  const double step = options.activity_step;
  grid_q_.resize(kGridNodes);
  std::vector<double> clearing(kGridNodes);
  std::vector<std::vector<double>> phi_node(
      contests_, std::vector<double>(kGridNodes));
  pi_tab_.assign(contests_, std::vector<double>(kGridNodes));
  for (int i = 0; i < kGridNodes; ++i) {
    const double q = static_cast<double>(i) / (kGridNodes - 1);
    grid_q_[i] = q;
    clearing[i] = profile.invert_supply(q);
    const auto phis = profile.choices(q);
    const double lo = std::max(0.0, q - step);
    const double hi = std::min(1.0, q + step);
    const auto at_lo = profile.choices(lo);
    const auto at_hi = profile.choices(hi);
    for (std::size_t j = 0; j < contests_; ++j) {
      phi_node[j][i] = phis[j];
      pi_tab_[j][i] = std::max(0.0, (at_hi[j] - at_lo[j]) / (hi - lo));
    }
  }
  phi_one_.resize(contests_);
  for (std::size_t j = 0; j < contests_; ++j)
    phi_one_[j] = phi_node[j][kGridNodes - 1];

  // Cumulative H(x) = int v(Q(u)) du over the grid of clearing levels and
  // curve endpoints; beta lookups land exactly on stored abscissas.
  std::vector<double> xs(clearing);
  for (const auto& curve : profile.curves()) {
    xs.push_back(curve.top());
    xs.push_back(curve.bottom());
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> cum(xs.size(), 0.0);
  auto skill_at = [&](double x) {
    return config_.dist.quantile_skill(profile.aggregate_supply(x));
  };
  for (std::size_t p = 0; p + 1 < xs.size(); ++p)
    cum[p + 1] = cum[p] + detail::integrate(skill_at, xs[p], xs[p + 1],
                                            {}, options.quad_tol);
  auto h_at = [&](double x) {
    const auto it = std::lower_bound(xs.begin(), xs.end(), x);
    return cum[static_cast<std::size_t>(it - xs.begin())];
  };
  beta_tab_.assign(contests_, std::vector<double>(kGridNodes, 0.0));
  beta_max_ = 0.0;
  const double x_final = clearing[kGridNodes - 1];  // Q^{-1}(1)
  for (std::size_t j = 0; j < contests_; ++j) {
    const auto& curve = profile.curves()[j];
    if (curve.is_constant()) continue;
    const double base =
        h_at(std::clamp(x_final, curve.bottom(), curve.top()));
    for (int i = 0; i < kGridNodes; ++i) {
      const double top =
          h_at(std::clamp(clearing[i], curve.bottom(), curve.top()));
      beta_tab_[j][i] = std::max(0.0, top - base);
      beta_max_ = std::max(beta_max_, beta_tab_[j][i]);
    }
  }

  // Disclosed efforts beta_{j,k} as cumulative phi-integrals down from
  // Phi_j(1), tabulated on the same quantile grid.
  const int n = config_.n;
  disclosed_tab_.assign(
      contests_, std::vector<std::vector<double>>(
                     n, std::vector<double>(kGridNodes, 0.0)));
  for (std::size_t j = 0; j < contests_; ++j) {
    const auto& curve = profile.curves()[j];
    const double p = phi_one_[j];
    if (curve.is_constant() || p <= 0.0) continue;
    for (int k = 2; k <= n; ++k) {
      auto integrand = [&](double phi) {
        const double t = profile.aggregate_supply(curve.value(phi));
        return config_.dist.quantile_skill(t) *
               (-conditional_allocation_derivative(curve.prizes(), k,
                                                   std::min(phi / p, 1.0))) /
               p;
      };
      auto& tab = disclosed_tab_[j][k - 1];
      for (int i = kGridNodes - 2; i >= 0; --i)
        tab[i] = tab[i + 1] + detail::integrate(integrand, phi_node[j][i],
                                                phi_node[j][i + 1], {},
                                                options.quad_tol);
    }
  }
}

Simulator::Draw Simulator::draw_contestant(double q,
                                           std::uint64_t& state) const {
  Draw draw;
  draw.q = q;
  std::vector<double> density(contests_);
  double total = 0.0;
  for (std::size_t j = 0; j < contests_; ++j) {
    density[j] = interp(pi_tab_[j], q);
    total += density[j];
  }
  const double u = next_unit(state);
  draw.contest = static_cast<int>(contests_) - 1;
  if (total <= 0.0) {
    draw.contest = std::min<int>(static_cast<int>(u * contests_),
                                 static_cast<int>(contests_) - 1);
  } else {
    double acc = 0.0;
    for (std::size_t j = 0; j < contests_; ++j) {
      acc += density[j];
      if (u * total <= acc) {
        draw.contest = static_cast<int>(j);
        break;
      }
    }
  }
  draw.effort = beta_at(draw.contest, q);
  return draw;
}

double Simulator::beta_at(std::size_t j, double q) const {
  return interp(beta_tab_[j], q);
}

double Simulator::disclosed_beta_at(std::size_t j, int k, double q) const {
  return interp(disclosed_tab_[j][k - 1], q);
}

SimulationReport Simulator::run_impl(bool disclosed) const {
  const std::size_t reps = config_.replications;
  const std::size_t m = contests_;
  const int n = config_.n;
  const auto& probes = config_.probe_quantiles;
  if (!config_.objectives.empty() && config_.objectives.size() != m)
    throw std::domain_error("simulator: one objective per contest expected");

  // Per-replication slots: designer utility, participation, rank efforts,
  // probe utilities. Filled independently, then reduced in index order so
  // results do not depend on the thread count.
  const std::size_t stride = m + m + m * static_cast<std::size_t>(n) +
                             probes.size();
  std::vector<double> slab(reps * stride, 0.0);

  auto body = [&](std::size_t r) {
    double* out = slab.data() + r * stride;
    std::uint64_t state = mix_seed(config_.seed, r);
    std::vector<double> qs(n);
    std::vector<int> contest(n);
    std::vector<double> effort(n);
    for (int i = 0; i < n; ++i) {
      qs[i] = next_unit(state);
      const Draw draw = draw_contestant(qs[i], state);
      contest[i] = draw.contest;
      effort[i] = draw.effort;
    }
    std::vector<int> count(m, 0);
    for (int i = 0; i < n; ++i) ++count[contest[i]];
    if (disclosed)
      for (int i = 0; i < n; ++i)
        effort[i] =
            disclosed_beta_at(contest[i], count[contest[i]], qs[i]);

    std::vector<Entrant> bucket;
    for (std::size_t j = 0; j < m; ++j) {
      bucket.clear();
      for (int i = 0; i < n; ++i)
        if (contest[i] == static_cast<int>(j))
          bucket.push_back({qs[i], effort[i], i});
      std::sort(bucket.begin(), bucket.end(), outranks);
      double designer = 0.0;
      if (!config_.objectives.empty()) {
        if (const auto* eff =
                std::get_if<EffortObjective>(&config_.objectives[j])) {
          for (std::size_t rank = 0; rank < bucket.size(); ++rank)
            designer += eff->alpha[rank] * bucket[rank].effort;
        } else {
          const double theta =
              std::get<ParticipationObjective>(config_.objectives[j]).theta;
          for (const auto& player : bucket)
            if (player.q <= theta) designer += 1.0;
        }
      }
      out[j] = designer;
      out[m + j] = static_cast<double>(bucket.size());
      for (std::size_t rank = 0; rank < bucket.size(); ++rank)
        out[2 * m + j * n + rank] = bucket[rank].effort;
    }

    // Probe contestant against the first n-1 players of this replication.
    for (std::size_t pi = 0; pi < probes.size(); ++pi) {
      const double q = probes[pi];
      const Draw draw = draw_contestant(q, state);
      const int c = draw.contest;
      double probe_effort = draw.effort;
      std::vector<int> pcount(m, 0);
      ++pcount[c];
      for (int i = 0; i + 1 < n; ++i) ++pcount[contest[i]];
      if (disclosed) probe_effort = disclosed_beta_at(c, pcount[c], q);
      int above = 0;
      for (int i = 0; i + 1 < n; ++i) {
        if (contest[i] != c) continue;
        double opp = effort[i];
        if (disclosed)
          opp = disclosed_beta_at(contest[i], pcount[contest[i]], qs[i]);
        if (opp > probe_effort || (opp == probe_effort && qs[i] < q)) ++above;
      }
      const double prize = prizes_[c].weights[above];
      out[2 * m + m * n + pi] =
          config_.dist.quantile_skill(q) * prize - probe_effort;
    }
  };
  run_blocks(reps, config_.threads, body);

  SimulationReport report;
  report.replications = reps;
  report.disclosed = disclosed;
  report.probe_quantiles = probes;
  for (std::size_t j = 0; j < m; ++j)
    report.designer_utility.push_back(summarize(slab.data() + j, reps, stride));
  for (std::size_t j = 0; j < m; ++j)
    report.participation.push_back(
        summarize(slab.data() + m + j, reps, stride));
  report.rank_effort.resize(m);
  for (std::size_t j = 0; j < m; ++j)
    for (int k = 0; k < n; ++k)
      report.rank_effort[j].push_back(
          summarize(slab.data() + 2 * m + j * n + k, reps, stride));
  for (std::size_t pi = 0; pi < probes.size(); ++pi)
    report.contestant_utility.push_back(
        summarize(slab.data() + 2 * m + m * n + pi, reps, stride));
  return report;
}

SimulationReport Simulator::run() const { return run_impl(false); }

SimulationReport Simulator::run_disclosed() const { return run_impl(true); }

double Simulator::best_response_gap() const {
  const std::size_t samples = config_.replications;
  const std::size_t m = contests_;
  const int n = config_.n;
  double worst = 0.0;
  for (std::size_t pi = 0; pi < config_.probe_quantiles.size(); ++pi) {
    const double q = config_.probe_quantiles[pi];
    const double skill = config_.dist.quantile_skill(q);

    std::vector<double> grid{0.0};
    const int points = std::max(2, config_.effort_grid);
    if (beta_max_ > 0.0)
      for (int g = 0; g < points; ++g)
        grid.push_back(beta_max_ *
                       std::pow(1e-4, 1.0 - static_cast<double>(g) /
                                                (points - 1)));
    // candidate efforts per contest: shared grid + equilibrium effort
    std::vector<std::vector<double>> cand(m, grid);
    std::vector<std::size_t> eq_slot(m);
    std::vector<double> pi_q(m);
    double pi_total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      eq_slot[j] = cand[j].size();
      cand[j].push_back(beta_at(j, q));
      pi_q[j] = interp(pi_tab_[j], q);
      pi_total += pi_q[j];
    }
    if (pi_total <= 0.0) {
      pi_q.assign(m, 1.0 / m);
      pi_total = 1.0;
    }

    std::vector<std::vector<double>> util(m);
    for (std::size_t j = 0; j < m; ++j) util[j].assign(cand[j].size(), 0.0);

    std::uint64_t state = mix_seed(config_.seed ^ 0x6a09e667f3bcc909ULL, pi);
    std::vector<std::vector<Entrant>> opponents(m);
    for (std::size_t s = 0; s < samples; ++s) {
      for (auto& bucket : opponents) bucket.clear();
      for (int i = 0; i + 1 < n; ++i) {
        const double qo = next_unit(state);
        const Draw draw = draw_contestant(qo, state);
        opponents[draw.contest].push_back({qo, draw.effort, i});
      }
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t c = 0; c < cand[j].size(); ++c) {
          const double e = cand[j][c];
          int above = 0;
          for (const auto& opp : opponents[j])
            if (opp.effort > e || (opp.effort == e && opp.q < q)) ++above;
          util[j][c] += skill * prizes_[j].weights[above] - e;
        }
      }
    }

    double best_dev = -std::numeric_limits<double>::infinity();
    double eq_utility = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t c = 0; c < cand[j].size(); ++c) {
        const double mean = util[j][c] / samples;
        best_dev = std::max(best_dev, mean);
        if (c == eq_slot[j]) eq_utility += pi_q[j] / pi_total * mean;
      }
    }
    worst = std::max(worst, best_dev - eq_utility);
  }
  return std::max(0.0, worst);
}

nlohmann::json SimulationReport::to_json() const {
  auto pack = [](const Estimate& e) {
    return nlohmann::json{{"mean", e.mean}, {"half_width", e.half_width}};
  };
  nlohmann::json designers = nlohmann::json::array();
  for (std::size_t j = 0; j < designer_utility.size(); ++j) {
    nlohmann::json ranks = nlohmann::json::array();
    for (const auto& e : rank_effort[j]) ranks.push_back(pack(e));
    designers.push_back({{"utility", pack(designer_utility[j])},
                         {"participation", pack(participation[j])},
                         {"rank_effort", ranks}});
  }
  nlohmann::json probes = nlohmann::json::array();
  for (std::size_t i = 0; i < probe_quantiles.size(); ++i)
    probes.push_back({{"q", probe_quantiles[i]},
                      {"utility", pack(contestant_utility[i])}});
  return {{"designers", designers},
          {"contestants", probes},
          {"replications", replications},
          {"disclosed", disclosed}};
}

}  // namespace parcontest
