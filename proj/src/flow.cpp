#include "relayopt/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "relayopt/errors.hpp"
#include "relayopt/tolerance.hpp"

namespace relayopt {

double FlowSolution::total_power() const {
  double p = 0.0;
  for (const PathAllocation& a : allocations) p += a.source_power + a.relay_power;
  return p;
}

FlowSolution max_flow_at(const Scenario& sc) {
  const RateModel& m = sc.model();
  std::vector<Path> paths = spanning_paths(sc);
  const Path direct = paths.back();
  const double lam_tau = direct.source_arc.lambda;
  const double g_mu = m.g(sc.mu());
  const double g_nu = m.g(sc.nu());

  FlowSolution best;
  best.total_flow = lam_tau * g_mu;
  best.allocations = {{direct, best.total_flow, sc.mu(), 0.0}};
  best.residual_mu = 0.0;
  best.residual_nu = sc.nu();

  // Concentrating power on a single two-hop path is optimal for an
  // increasing convex g, but the residual source power (when the relay arc
  // saturates first) still earns flow on the all-direct path.
  for (size_t k = 0; k + 1 < paths.size(); ++k) {
    const Path& p = paths[k];
    const double lam1 = p.source_arc.lambda;
    const double lam2 = p.relay_arc->lambda;
    const double src_rate = lam1 * g_mu;
    const double relay_rate = lam2 * g_nu;
    FlowSolution cand;
    if (src_rate <= relay_rate) {
      double y = std::min(m.g_inv(src_rate / lam2), sc.nu());
      cand.total_flow = src_rate;
      cand.allocations = {{p, src_rate, sc.mu(), y}};
      cand.residual_mu = 0.0;
      cand.residual_nu = sc.nu() - y;
    } else {
      double mu_prime = std::min(m.g_inv(relay_rate / lam1), sc.mu());
      double spare = sc.mu() - mu_prime;
      double extra = lam_tau * m.g(spare);
      cand.total_flow = relay_rate + extra;
      cand.allocations = {{p, relay_rate, mu_prime, sc.nu()}};
      if (extra > 0.0) cand.allocations.push_back({direct, extra, spare, 0.0});
      cand.residual_mu = 0.0;
      cand.residual_nu = 0.0;
    }
    if (cand.total_flow > best.total_flow) best = std::move(cand);
  }
  return best;
}

namespace {

double bisect_on(const std::function<double(double)>& f, double lo, double hi, double target,
                 bool increasing) {
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    bool below = f(mid) < target;
    if (below == increasing)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

FlowSolution min_cost_at(const Scenario& sc, double target_flow) {
  const RateModel& m = sc.model();
  const double mu = sc.mu();
  const double nu = sc.nu();

  if (target_flow <= 0.0) {
    FlowSolution zero;
    zero.residual_mu = mu;
    zero.residual_nu = nu;
    return zero;
  }

  FlowSolution at_cap = max_flow_at(sc);
  if (target_flow > at_cap.total_flow * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "target flow %.17g exceeds the maximum %.17g", target_flow,
                  at_cap.total_flow);
    throw Error(ErrorCode::target_infeasible, buf);
  }
  const double F = std::min(target_flow, at_cap.total_flow);

  std::vector<Path> paths = spanning_paths(sc);
  const Path direct = paths.back();
  const double lam_tau = direct.source_arc.lambda;
  auto mu_ok = [&](double p) { return p <= mu * (1.0 + 1e-12) + 1e-15; };
  auto nu_ok = [&](double p) { return p <= nu * (1.0 + 1e-12) + 1e-15; };

  std::optional<FlowSolution> best;
  double best_cost = std::numeric_limits<double>::infinity();
  auto consider = [&](FlowSolution sol) {
    double c = sol.total_power();
    if (c < best_cost) {
      best_cost = c;
      best = std::move(sol);
    }
  };

  {
    double ps = m.g_inv(F / lam_tau);
    if (mu_ok(ps)) {
      FlowSolution sol;
      sol.total_flow = F;
      sol.allocations = {{direct, F, ps, 0.0}};
      sol.residual_mu = mu - ps;
      sol.residual_nu = nu;
      consider(std::move(sol));
    }
  }

  // Splitting phi units through one two-hop path and the rest through the
  // all-direct path. The split cost is concave in phi, so the optimum sits at
  // an end of the feasible interval; the feasible set itself is the interval
  // minus a concave bump of the source-power curve, hence at most two pieces.
  for (size_t k = 0; k + 1 < paths.size(); ++k) {
    const Path& p = paths[k];
    const double lam1 = p.source_arc.lambda;
    const double lam2 = p.relay_arc->lambda;
    const double cap = std::min(F, lam2 * m.g(nu));
    if (cap <= 0.0) continue;

    auto src_power = [&](double phi) { return m.g_inv(phi / lam1); };
    auto rel_power = [&](double phi) { return m.g_inv(phi / lam2); };
    auto dir_power = [&](double phi) { return m.g_inv((F - phi) / lam_tau); };
    auto src_total = [&](double phi) { return src_power(phi) + dir_power(phi); };

    std::vector<double> candidates;
    candidates.push_back(cap);
    geom::ScalarOptResult peak = geom::maximize_on_segment(src_total, 0.0, cap, true);
    double limit = mu * (1.0 + 1e-12) + 1e-15;
    if (peak.value > limit) {
      if (src_total(0.0) <= limit && peak.x > 0.0)
        candidates.push_back(bisect_on(src_total, 0.0, peak.x, limit, true));
      if (src_total(cap) <= limit && peak.x < cap)
        candidates.push_back(bisect_on(src_total, peak.x, cap, limit, false));
    }
    for (int i = 0; i <= 32; ++i) candidates.push_back(cap * static_cast<double>(i) / 32.0);

    for (double phi : candidates) {
      if (phi <= 0.0) continue;
      double ps = src_power(phi);
      double pr = rel_power(phi);
      double pd = dir_power(phi);
      if (!mu_ok(ps + pd) || !nu_ok(pr)) continue;
      FlowSolution sol;
      sol.total_flow = F;
      sol.allocations = {{p, phi, ps, pr}};
      if (F - phi > 0.0) sol.allocations.push_back({direct, F - phi, pd, 0.0});
      sol.residual_mu = mu - ps - pd;
      sol.residual_nu = nu - pr;
      consider(std::move(sol));
    }
  }

  if (!best)
    throw Error(ErrorCode::internal_consistency,
                "no feasible power split found for a feasible flow target");
  return *best;
}

double oracle_max_flow(const Scenario& sc, int levels) {
  const RateModel& m = sc.model();
  std::vector<Path> paths = spanning_paths(sc);
  const size_t np = paths.size();
  if (levels <= 0) levels = np <= 3 ? 64 : 16;
  const int two_hop = static_cast<int>(np) - 1;

  // Quantized power tables keep the double simplex walk arithmetic-only.
  std::vector<double> g_mu(static_cast<size_t>(levels) + 1), g_nu(g_mu.size());
  for (int q = 0; q <= levels; ++q) {
    g_mu[static_cast<size_t>(q)] = m.g(sc.mu() * q / levels);
    g_nu[static_cast<size_t>(q)] = m.g(sc.nu() * q / levels);
  }

  // Source quanta go to every path; relay quanta only to the two-hop ones.
  std::vector<double> src_rate(np, 0.0);
  std::vector<int> src(np, 0), rel(static_cast<size_t>(std::max(two_hop, 1)), 0);
  double best = 0.0;

  std::function<void(size_t, int)> rec_rel = [&](size_t rbin, int rrem) {
    if (rbin + 1 == static_cast<size_t>(two_hop)) {
      rel[rbin] = rrem;
      double total = src_rate[np - 1];
      for (size_t j = 0; j + 1 < np; ++j) {
        double relay_rate = paths[j].relay_arc->lambda * g_nu[static_cast<size_t>(rel[j])];
        total += std::min(src_rate[j], relay_rate);
      }
      if (total > best) best = total;
      return;
    }
    for (int q = 0; q <= rrem; ++q) {
      rel[rbin] = q;
      rec_rel(rbin + 1, rrem - q);
    }
  };
  std::function<void(size_t, int)> rec_src = [&](size_t bin, int remaining) {
    if (bin + 1 == np) {
      src[bin] = remaining;
      for (size_t j = 0; j < np; ++j)
        src_rate[j] = paths[j].source_arc.lambda * g_mu[static_cast<size_t>(src[j])];
      if (two_hop == 0)
        best = std::max(best, src_rate[0]);
      else
        rec_rel(0, levels);
      return;
    }
    for (int q = 0; q <= remaining; ++q) {
      src[bin] = q;
      rec_src(bin + 1, remaining - q);
    }
  };
  rec_src(0, levels);
  return best;
}

void for_each_split(int levels, int bins, const std::function<void(std::span<const int>)>& fn) {
  if (bins <= 0) return;
  std::vector<int> cur(static_cast<size_t>(bins), 0);
  std::function<void(int, int)> rec = [&](int bin, int remaining) {
    if (bin == bins - 1) {
      cur[static_cast<size_t>(bin)] = remaining;
      fn(cur);
      return;
    }
    for (int q = 0; q <= remaining; ++q) {
      cur[static_cast<size_t>(bin)] = q;
      rec(bin + 1, remaining - q);
    }
  };
  rec(0, levels);
}

}  // namespace relayopt
