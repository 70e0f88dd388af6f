#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "farkas_balance/errors.hpp"
#include "farkas_balance/geometry.hpp"
#include "farkas_balance/version.hpp"
#include "farkas_balance/zp.hpp"

namespace farkas_balance {

struct SolveConfig {
  std::size_t budget = 0;  // E: number of hull rounds before stopping
  double tol_hull = 1e-9;
  double tol_sep = 1e-9;
  double tol_dft = 1e-9;
  bool deterministic = true;  // echoed into certificates; no randomized choice exists
};

/** Bookkeeping of the column-deletion iteration. Supports of the collected
 *  coefficient vectors are pairwise disjoint and their union is `deleted`. */
struct IterationState {
  std::size_t round = 0;
  std::vector<std::size_t> deleted;  // sorted original column indices
  std::vector<SparseCoefficients> collected;
};

/** Balanced function in [-1,1] whose transform vanishes at every supplied
 *  place; l1 mass is one per completed hull round. */
struct VanishingBalanced {
  ZpFunction h;
  std::size_t rounds;
  double l1_norm;
};

/** Trig polynomial spectrally supported on {0, +-a_i} whose strict sign
 *  pattern can fail only inside the recorded exception set. */
struct SmallSpectralSupport {
  ZpFunction h;
  Spectrum spectrum;
  std::vector<std::size_t> exceptions;  // sorted; exactly the deleted columns
  std::size_t rounds_before_separation;
  double margin;
};

struct SolveDiagnostics {
  std::size_t rounds = 0;
  std::size_t deleted_count = 0;
  double margin = 0.0;
  double max_embed_residual = 0.0;  // worst ||M_1 v_r||_inf over collected rounds
  std::size_t pivots = 0;
  std::size_t narrow_matrix_rounds = 0;  // rounds entered with n_r <= m
  std::string solver_version = kSolverVersion;
  SolveConfig config;
};

class Certificate {
 public:
  Certificate(VanishingBalanced value, SolveDiagnostics diagnostics)
      : value_(std::move(value)), diagnostics_(std::move(diagnostics)) {}
  Certificate(SmallSpectralSupport value, SolveDiagnostics diagnostics)
      : value_(std::move(value)), diagnostics_(std::move(diagnostics)) {}

  bool is_vanishing() const { return std::holds_alternative<VanishingBalanced>(value_); }
  const VanishingBalanced& vanishing() const {
    if (!is_vanishing()) throw Error("certificate holds the spectral variant");
    return std::get<VanishingBalanced>(value_);
  }
  const SmallSpectralSupport& spectral() const {
    if (is_vanishing()) throw Error("certificate holds the vanishing variant");
    return std::get<SmallSpectralSupport>(value_);
  }
  const ZpFunction& h() const {
    return is_vanishing() ? std::get<VanishingBalanced>(value_).h : std::get<SmallSpectralSupport>(value_).h;
  }
  const SolveDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::variant<VanishingBalanced, SmallSpectralSupport> value_;
  SolveDiagnostics diagnostics_;
};

/**
 * The (2t+1) x n_r sign matrix over the surviving columns: column j carries
 * (1, cos(2 pi j b_1/p), sin(2 pi j b_1/p), ..., cos(2 pi j b_t/p),
 * sin(2 pi j b_t/p)), negated when j is outside the support.
 */
inline PointMatrix build_sign_matrix(const SupportSet& support, const PlaceSet& places,
                                     const std::vector<std::size_t>& deleted = {}) {
  detail::require_same_modulus(support.modulus(), places.modulus(), "build_sign_matrix");
  const std::size_t p = support.modulus().size();
  const std::size_t t = places.t();
  const std::size_t m = 2 * t + 1;

  std::vector<char> gone(p, 0);
  for (std::size_t j : deleted) {
    if (j >= p) throw InvalidArgument("build_sign_matrix: deleted index out of range");
    gone[j] = 1;
  }
  std::vector<std::size_t> labels;
  labels.reserve(p);
  for (std::size_t j = 0; j < p; ++j)
    if (!gone[j]) labels.push_back(j);
  if (labels.empty()) throw EmptyMatrix("build_sign_matrix: every column has been deleted");

  const double step = 2.0 * std::numbers::pi / static_cast<double>(p);
  std::vector<double> entries;
  entries.reserve(m * labels.size());
  for (std::size_t j : labels) {
    const double sigma = support.contains(j) ? 1.0 : -1.0;
    entries.push_back(sigma);
    for (std::size_t i = 0; i < t; ++i) {
      const double angle = step * static_cast<double>((j * places.reduced()[i]) % p);
      entries.push_back(sigma * std::cos(angle));
      entries.push_back(sigma * std::sin(angle));
    }
  }
  return PointMatrix(m, std::move(entries), std::move(labels));
}

/** h = +V on the support and -V off it, where V superposes the collected
 *  (disjointly supported) convex coefficient vectors at their labels. */
inline ZpFunction assemble_vanishing(const std::vector<SparseCoefficients>& collected,
                                     const SupportSet& support) {
  const std::size_t p = support.modulus().size();
  std::vector<double> v(p, 0.0);
  std::vector<char> seen(p, 0);
  for (const auto& coeffs : collected) {
    for (const auto& [label, weight] : coeffs.entries()) {
      if (label >= p) throw InvalidArgument("assemble_vanishing: label out of range");
      if (seen[label])
        throw DisjointnessViolation("assemble_vanishing: column " + std::to_string(label) +
                                    " is claimed by two rounds");
      seen[label] = 1;
      v[label] = weight;
    }
  }
  std::vector<double> h(p);
  for (std::size_t n = 0; n < p; ++n) h[n] = support.contains(n) ? v[n] : -v[n];
  return ZpFunction(support.modulus(), std::move(h));
}

/**
 * Realizes the separating normal as a real trig polynomial
 *   h(x) = w_0 + sum_i (w_{2i+1} cos(2 pi x b_i/p) + w_{2i+2} sin(2 pi x b_i/p))
 * and its spectrum under the forward convention used by dft():
 *   h^(0) = p w_0, h^(b_i) = p(w_{2i+1} + i w_{2i+2})/2, h^(-b_i) conjugate.
 */
inline std::pair<ZpFunction, Spectrum> assemble_spectral(const SeparatingNormal& normal,
                                                         const PlaceSet& places) {
  const std::size_t p = places.modulus().size();
  const std::size_t t = places.t();
  const std::vector<double>& w = normal.w();
  if (w.size() != 2 * t + 1)
    throw LengthMismatch("assemble_spectral: normal has " + std::to_string(w.size()) +
                         " entries, expected " + std::to_string(2 * t + 1));

  const double step = 2.0 * std::numbers::pi / static_cast<double>(p);
  std::vector<double> h(p);
  for (std::size_t x = 0; x < p; ++x) {
    double acc = w[0];
    for (std::size_t i = 0; i < t; ++i) {
      const double angle = step * static_cast<double>((x * places.reduced()[i]) % p);
      acc += w[2 * i + 1] * std::cos(angle) + w[2 * i + 2] * std::sin(angle);
    }
    h[x] = acc;
  }

  std::vector<std::complex<double>> coeffs(p, std::complex<double>(0.0, 0.0));
  const double pd = static_cast<double>(p);
  coeffs[0] = std::complex<double>(pd * w[0], 0.0);
  for (std::size_t i = 0; i < t; ++i) {
    const std::size_t b = places.reduced()[i];
    coeffs[b] = std::complex<double>(pd * w[2 * i + 1] / 2.0, pd * w[2 * i + 2] / 2.0);
    coeffs[p - b] = std::conj(coeffs[b]);
  }
  return {ZpFunction(places.modulus(), std::move(h)), Spectrum(places.modulus(), std::move(coeffs))};
}

struct DichotomyRun {
  Certificate certificate;
  IterationState state;
};

/**
 * The column-deletion iteration: build the sign matrix over surviving
 * columns, decide the hull dichotomy, and either collect the convex
 * coefficients and delete their columns (stopping after E hull rounds with a
 * vanishing balanced certificate) or stop at the first strict separation
 * with a small-spectral-support certificate whose exception set is exactly
 * the columns deleted so far.
 */
inline DichotomyRun solve_dichotomy(const SupportSet& support, const PlaceSet& places,
                                    const SolveConfig& cfg = {}) {
  detail::require_same_modulus(support.modulus(), places.modulus(), "solve_dichotomy");
  const std::size_t p = support.modulus().size();

  SolveDiagnostics diag;
  diag.config = cfg;
  IterationState state;

  if (cfg.budget == 0) {
    // The zero function already satisfies every demand at E = 0.
    VanishingBalanced cert{ZpFunction::zero(support.modulus()), 0, 0.0};
    return DichotomyRun{Certificate(std::move(cert), std::move(diag)), std::move(state)};
  }

  const GeometryConfig geo{cfg.tol_hull, cfg.tol_sep};
  const PointMatrix full = build_sign_matrix(support, places);

  for (std::size_t r = 1; r <= cfg.budget; ++r) {
    state.round = r;
    if (state.deleted.size() == p)
      throw EmptyMatrix("solve_dichotomy: all " + std::to_string(p) + " columns deleted after " +
                        std::to_string(r - 1) + " rounds, before the budget of " +
                        std::to_string(cfg.budget) + " was spent");
    const PointMatrix matrix = build_sign_matrix(support, places, state.deleted);
    if (!matrix.has_more_columns_than_rows()) ++diag.narrow_matrix_rounds;

    const HullOutcome outcome = origin_in_hull(matrix, geo);
    diag.pivots += outcome.diagnostics().pivots;

    if (outcome.origin_inside()) {
      const SparseCoefficients& v = outcome.coefficients();
      // Residual of the round's vector embedded at original labels against
      // the full first-round matrix.
      std::vector<double> embedded(p, 0.0);
      for (const auto& [label, weight] : v.entries()) embedded[label] = weight;
      diag.max_embed_residual = std::max(diag.max_embed_residual, full.residual_inf(embedded));

      state.collected.push_back(v);
      for (const auto& [label, weight] : v.entries()) state.deleted.push_back(label);
      std::sort(state.deleted.begin(), state.deleted.end());
      diag.rounds = r;
      diag.deleted_count = state.deleted.size();

      if (r == cfg.budget) {
        ZpFunction h = assemble_vanishing(state.collected, support);
        const double l1 = h.l1_norm();
        VanishingBalanced cert{std::move(h), r, l1};
        return DichotomyRun{Certificate(std::move(cert), std::move(diag)), std::move(state)};
      }
    } else {
      const SeparatingNormal& normal = outcome.normal();
      auto [h, spectrum] = assemble_spectral(normal, places);
      diag.rounds = r - 1;
      diag.deleted_count = state.deleted.size();
      diag.margin = normal.margin();
      SmallSpectralSupport cert{std::move(h), std::move(spectrum), state.deleted, r - 1,
                                normal.margin()};
      return DichotomyRun{Certificate(std::move(cert), std::move(diag)), std::move(state)};
    }
  }
  throw Error("solve_dichotomy: iteration escaped its budget");  // unreachable
}

inline Certificate run_dichotomy(const SupportSet& support, const PlaceSet& places,
                                 const SolveConfig& cfg = {}) {
  return solve_dichotomy(support, places, cfg).certificate;
}

inline Certificate run_dichotomy(const ZpFunction& g, const PlaceSet& places,
                                 const SolveConfig& cfg = {}) {
  return run_dichotomy(support_of(g), places, cfg);
}

}  // namespace farkas_balance
