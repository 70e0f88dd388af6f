#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "farkas_balance/dichotomy.hpp"
#include "farkas_balance/errors.hpp"
#include "farkas_balance/simplex.hpp"
#include "farkas_balance/zp.hpp"

namespace farkas_balance {

struct PropertyResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  bool informational = false;  // reported but not part of the verdict
};

/** Outcome of re-deriving every certificate property from raw data. */
struct VerificationReport {
  bool verdict = false;
  std::vector<PropertyResult> properties;

  const PropertyResult* find(const std::string& name) const {
    for (const auto& p : properties)
      if (p.name == name) return &p;
    return nullptr;
  }
};

/**
 * Re-checks a certificate from scratch: sign patterns by direct scan, the
 * spectrum by a fresh transform, exception accounting by counting actual
 * violations. Solver diagnostics are never trusted. Spectral magnitudes are
 * compared against tol * p; pointwise checks against tol.
 */
inline VerificationReport verify_certificate(const Certificate& cert, const SupportSet& support,
                                             const PlaceSet& places, std::size_t budget,
                                             double tol = 1e-7) {
  detail::require_same_modulus(cert.h().modulus(), support.modulus(), "verify_certificate");
  detail::require_same_modulus(cert.h().modulus(), places.modulus(), "verify_certificate");
  const std::size_t p = support.modulus().size();
  const double spectral_tol = tol * static_cast<double>(p);
  const std::size_t k = places.k();
  const std::size_t t = places.t();

  VerificationReport report;
  auto add = [&](const std::string& name, double residual, double tolerance, bool informational = false) {
    report.properties.push_back(PropertyResult{name, residual <= tolerance, residual, tolerance, informational});
  };

  const ZpFunction& h = cert.h();
  if (cert.is_vanishing()) {
    double range = 0.0;
    double sign = 0.0;
    double total = 0.0;
    double l1 = 0.0;
    for (std::size_t n = 0; n < p; ++n) {
      range = std::max(range, std::abs(h[n]) - 1.0);
      sign = std::max(sign, support.contains(n) ? -h[n] : h[n]);
      total += h[n];
      l1 += std::abs(h[n]);
    }
    add("value_range", std::max(0.0, range), tol);
    add("sign_pattern", std::max(0.0, sign), tol);
    add("zero_sum", std::abs(total), tol);
    add("l1_bound", std::max(0.0, static_cast<double>(budget) - l1), tol / 10.0);

    const Spectrum fresh = dft(h);
    double worst_place = 0.0;
    for (std::size_t a : places.raw()) worst_place = std::max(worst_place, std::abs(fresh[a]));
    add("place_vanishing", worst_place, spectral_tol);
  } else {
    const SmallSpectralSupport& c = cert.spectral();

    std::vector<char> allowed(p, 0);
    allowed[0] = 1;
    for (std::size_t b : places.reduced()) {
      allowed[b] = 1;
      allowed[p - b] = 1;
    }
    const Spectrum fresh = dft(h);
    double off_support = 0.0;
    double claimed_gap = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      if (!allowed[a]) off_support = std::max(off_support, std::abs(fresh[a]));
      claimed_gap = std::max(claimed_gap, std::abs(fresh[a] - c.spectrum[a]));
    }
    add("spectral_support", off_support, spectral_tol);
    add("claimed_spectrum", claimed_gap, spectral_tol);

    std::vector<char> excused(p, 0);
    double malformed = 0.0;
    std::size_t prev = p;
    for (std::size_t e : c.exceptions) {
      if (e >= p || excused[e] || (prev != p && e <= prev)) malformed += 1.0;
      if (e < p) excused[e] = 1;
      prev = e;
    }
    add("exceptions_well_formed", malformed, 0.0);

    std::size_t violations = 0;
    for (std::size_t n = 0; n < p; ++n) {
      if (excused[n]) continue;
      const bool ok = support.contains(n) ? (h[n] > 0.0) : (h[n] < 0.0);
      if (!ok) ++violations;
    }
    add("sign_violations_contained", static_cast<double>(violations), 0.0);

    // Two exception budgets: the per-round guarantee (2t+2 deletions per hull
    // round actually executed) is binding; the coarser a-priori (2k+1)E count
    // is reported on its own flag since a round may consume up to 2t+2 > 2k+1
    // columns when t = k.
    const double count = static_cast<double>(c.exceptions.size());
    add("exception_bound", std::max(0.0, count - static_cast<double>((2 * t + 2) * c.rounds_before_separation)), 0.0);
    add("exception_bound_budget", std::max(0.0, count - static_cast<double>((2 * k + 1) * budget)), 0.0,
        /*informational=*/true);
  }

  report.verdict = true;
  for (const auto& prop : report.properties)
    if (!prop.informational && !prop.pass) report.verdict = false;
  return report;
}

struct OracleBranch1Result {
  double max_l1 = 0.0;
  ZpFunction witness;
  bool feasible_at_budget = false;
};

/**
 * Dense LP restatement of the first branch: maximize sum of u over
 * u in [0,1]^p subject to the 2t+1 balance equations (written on the
 * magnitudes u_n = |h(n)|, sign carried by support membership). The optimum
 * equals the largest achievable ||h||_1, so the branch is feasible at level
 * E exactly when max_l1 >= E. The LP is assembled independently of the
 * solver's matrix builder and enumerates its variables in reverse index
 * order, so the two paths do not share a basis trajectory.
 */
inline OracleBranch1Result oracle_branch1(const SupportSet& support, const PlaceSet& places,
                                          std::size_t budget) {
  detail::require_same_modulus(support.modulus(), places.modulus(), "oracle_branch1");
  const std::size_t p = support.modulus().size();
  if (p > 2000) throw TooLarge("oracle_branch1: dense LP guard admits p <= 2000, got " + std::to_string(p));
  const std::size_t t = places.t();
  const std::size_t m = 2 * t + 1;

  LinearProgram<double> lp;
  lp.rows = m + p;
  lp.cols = 2 * p;  // u (reversed order) then box slacks (reversed order)
  lp.constraints.assign(lp.rows * lp.cols, 0.0);
  lp.rhs.assign(lp.rows, 0.0);
  lp.objective.assign(lp.cols, 0.0);
  auto A = [&](std::size_t i, std::size_t j) -> double& { return lp.constraints[i * lp.cols + j]; };
  const auto u_col = [&](std::size_t n) { return p - 1 - n; };
  const auto s_col = [&](std::size_t n) { return p + (p - 1 - n); };

  const double step = 2.0 * std::numbers::pi / static_cast<double>(p);
  for (std::size_t n = 0; n < p; ++n) {
    const double sigma = support.contains(n) ? 1.0 : -1.0;
    A(0, u_col(n)) = sigma;
    for (std::size_t i = 0; i < t; ++i) {
      const double angle = step * static_cast<double>((n * places.reduced()[i]) % p);
      A(1 + 2 * i, u_col(n)) = sigma * std::cos(angle);
      A(2 + 2 * i, u_col(n)) = sigma * std::sin(angle);
    }
    A(m + n, u_col(n)) = 1.0;
    A(m + n, s_col(n)) = 1.0;
    lp.rhs[m + n] = 1.0;
    lp.objective[u_col(n)] = -1.0;  // maximize the l1 mass
  }
  lp.initial_basis_candidates.assign(lp.cols, 0);
  for (std::size_t n = 0; n < p; ++n) lp.initial_basis_candidates[s_col(n)] = 1;

  const auto res = solve_linear_program<double>(lp, 1e-9);
  if (res.status != SimplexStatus::optimal)
    throw Error("oracle_branch1: the branch-1 program must be feasible and bounded");

  std::vector<double> h(p);
  double mass = 0.0;
  for (std::size_t n = 0; n < p; ++n) {
    double u = res.x[u_col(n)];
    u = std::clamp(u, 0.0, 1.0);
    mass += u;
    h[n] = support.contains(n) ? u : -u;
  }
  OracleBranch1Result out{mass, ZpFunction(support.modulus(), std::move(h)), false};
  out.feasible_at_budget = out.max_l1 + 1e-9 >= static_cast<double>(budget);
  return out;
}

/** S+T by direct pair enumeration. */
inline SupportSet brute_force_sumset(const SupportSet& S, const SupportSet& T) {
  detail::require_same_modulus(S.modulus(), T.modulus(), "brute_force_sumset");
  const std::size_t p = S.modulus().size();
  std::vector<char> hit(p, 0);
  for (std::size_t a : S.members())
    for (std::size_t b : T.members()) hit[(a + b) % p] = 1;
  std::vector<std::size_t> members;
  for (std::size_t n = 0; n < p; ++n)
    if (hit[n]) members.push_back(n);
  return SupportSet(S.modulus(), std::move(members));
}

/**
 * {n : (f*S)(n) > tol} for a minorant f that is >= 0 on S and <= 0 off S;
 * every member is certified to lie in S+S.
 */
inline SupportSet demo_minorant(const SupportSet& S, const ZpFunction& f, double tol = 1e-10) {
  detail::require_same_modulus(S.modulus(), f.modulus(), "demo_minorant");
  const std::size_t p = S.modulus().size();
  const double sign_slack = 1e-12;
  for (std::size_t n = 0; n < p; ++n) {
    const bool ok = S.contains(n) ? f[n] >= -sign_slack : f[n] <= sign_slack;
    if (!ok)
      throw SignPatternViolation("demo_minorant: f(" + std::to_string(n) +
                                 ") violates the required sign pattern for S");
  }
  const ZpFunction conv = convolve(f, S.indicator());
  std::vector<std::size_t> members;
  for (std::size_t n = 0; n < p; ++n)
    if (conv[n] > tol) members.push_back(n);
  return SupportSet(S.modulus(), std::move(members));
}

}  // namespace farkas_balance
