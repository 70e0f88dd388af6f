#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

#include "farkas_balance/errors.hpp"

namespace farkas_balance {

/** Prime modulus p of the cyclic group Z_p; primality is checked by trial
 *  division at construction, so a held value is always prime. */
class PrimeModulus {
 public:
  explicit PrimeModulus(std::uint64_t p) : p_(p) {
    if (!is_prime(p)) throw InvalidArgument("modulus " + std::to_string(p) + " is not prime");
  }

  std::uint64_t value() const { return p_; }
  std::size_t size() const { return static_cast<std::size_t>(p_); }

  friend bool operator==(const PrimeModulus& a, const PrimeModulus& b) { return a.p_ == b.p_; }
  friend bool operator!=(const PrimeModulus& a, const PrimeModulus& b) { return a.p_ != b.p_; }

  static bool is_prime(std::uint64_t p) {
    if (p < 2) return false;
    if (p % 2 == 0) return p == 2;
    for (std::uint64_t d = 3; d * d <= p; d += 2)
      if (p % d == 0) return false;
    return true;
  }

 private:
  std::uint64_t p_;
};

namespace detail {

inline void require_same_modulus(const PrimeModulus& a, const PrimeModulus& b, const char* where) {
  if (a != b) throw ModulusMismatch(std::string(where) + ": moduli differ");
}

/** w[k] = e^{2*pi*i*k/p} for k = 0..p-1. */
inline std::vector<std::complex<double>> unit_roots(std::size_t p) {
  std::vector<std::complex<double>> w(p);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(p);
  for (std::size_t k = 0; k < p; ++k) w[k] = std::polar(1.0, step * static_cast<double>(k));
  return w;
}

}  // namespace detail

/** Real-valued function on Z_p, stored densely; all entries finite. */
class ZpFunction {
 public:
  ZpFunction(PrimeModulus modulus, std::vector<double> values)
      : modulus_(modulus), values_(std::move(values)) {
    if (values_.size() != modulus_.size())
      throw LengthMismatch("ZpFunction requires exactly p values, got " + std::to_string(values_.size()));
    for (double v : values_)
      if (!std::isfinite(v)) throw InvalidArgument("ZpFunction entries must be finite");
  }

  static ZpFunction zero(PrimeModulus modulus) {
    return ZpFunction(modulus, std::vector<double>(modulus.size(), 0.0));
  }

  static ZpFunction indicator(PrimeModulus modulus, const std::vector<std::size_t>& members) {
    std::vector<double> v(modulus.size(), 0.0);
    for (std::size_t n : members) {
      if (n >= modulus.size()) throw InvalidArgument("indicator member out of range");
      v[n] = 1.0;
    }
    return ZpFunction(modulus, std::move(v));
  }

  const PrimeModulus& modulus() const { return modulus_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  const std::vector<double>& values() const { return values_; }

  double l1_norm() const {
    double s = 0.0;
    for (double v : values_) s += std::abs(v);
    return s;
  }

  double sum() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
  }

 private:
  PrimeModulus modulus_;
  std::vector<double> values_;
};

/** Complex Fourier coefficients indexed by places 0..p-1. */
class Spectrum {
 public:
  Spectrum(PrimeModulus modulus, std::vector<std::complex<double>> coeffs)
      : modulus_(modulus), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != modulus_.size())
      throw LengthMismatch("Spectrum requires exactly p coefficients, got " + std::to_string(coeffs_.size()));
    for (const auto& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw InvalidArgument("Spectrum entries must be finite");
  }

  const PrimeModulus& modulus() const { return modulus_; }
  std::size_t size() const { return coeffs_.size(); }
  const std::complex<double>& operator[](std::size_t a) const { return coeffs_[a]; }
  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  PrimeModulus modulus_;
  std::vector<std::complex<double>> coeffs_;
};

/** The set {n : g(n) > 0} together with its ambient modulus. */
class SupportSet {
 public:
  SupportSet(PrimeModulus modulus, std::vector<std::size_t> members)
      : modulus_(modulus), mask_(modulus.size(), 0) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t n : members) {
      if (n >= modulus_.size()) throw InvalidArgument("support member " + std::to_string(n) + " out of range");
      mask_[n] = 1;
    }
    members_ = std::move(members);
  }

  const PrimeModulus& modulus() const { return modulus_; }
  bool contains(std::size_t n) const { return mask_[n] != 0; }
  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool full() const { return members_.size() == modulus_.size(); }

  std::vector<std::size_t> complement() const {
    std::vector<std::size_t> out;
    out.reserve(modulus_.size() - members_.size());
    for (std::size_t n = 0; n < modulus_.size(); ++n)
      if (!mask_[n]) out.push_back(n);
    return out;
  }

  ZpFunction indicator() const { return ZpFunction::indicator(modulus_, members_); }

  friend bool operator==(const SupportSet& a, const SupportSet& b) {
    return a.modulus_ == b.modulus_ && a.members_ == b.members_;
  }

 private:
  PrimeModulus modulus_;
  std::vector<char> mask_;
  std::vector<std::size_t> members_;
};

/** Distinguished places a_1..a_k together with their canonical reduction
 *  b_1 < ... < b_t into {1,...,(p-1)/2}; a and -a collapse to the same b. */
class PlaceSet {
 public:
  PlaceSet(PrimeModulus modulus, const std::vector<std::int64_t>& raw) : modulus_(modulus) {
    const std::int64_t p = static_cast<std::int64_t>(modulus.value());
    raw_.reserve(raw.size());
    for (std::int64_t a : raw) {
      const std::int64_t r = ((a % p) + p) % p;
      if (r == 0) throw ZeroPlace("place " + std::to_string(a) + " is 0 mod " + std::to_string(p));
      raw_.push_back(static_cast<std::size_t>(r));
    }
    if (p == 2 && !raw_.empty())
      throw InvalidArgument("p = 2 admits no canonical nonzero places; supply an empty place list");
    reduced_.reserve(raw_.size());
    for (std::size_t r : raw_) reduced_.push_back(std::min(r, static_cast<std::size_t>(p) - r));
    std::sort(reduced_.begin(), reduced_.end());
    reduced_.erase(std::unique(reduced_.begin(), reduced_.end()), reduced_.end());
  }

  const PrimeModulus& modulus() const { return modulus_; }
  /** Raw places normalized into {1,...,p-1}, in input order (duplicates kept). */
  const std::vector<std::size_t>& raw() const { return raw_; }
  /** Canonical places b_1 < ... < b_t in {1,...,(p-1)/2}. */
  const std::vector<std::size_t>& reduced() const { return reduced_; }
  std::size_t k() const { return raw_.size(); }
  std::size_t t() const { return reduced_.size(); }

 private:
  PrimeModulus modulus_;
  std::vector<std::size_t> raw_;
  std::vector<std::size_t> reduced_;
};

inline PlaceSet reduce_places(const std::vector<std::int64_t>& raw, PrimeModulus p) {
  return PlaceSet(p, raw);
}

/** Forward transform: coeffs[a] = sum_n f(n) e^{2*pi*i*a*n/p}. Direct O(p^2)
 *  summation; p is small in every intended use. */
inline Spectrum dft(const ZpFunction& f) {
  const std::size_t p = f.size();
  const auto w = detail::unit_roots(p);
  std::vector<std::complex<double>> coeffs(p);
  for (std::size_t a = 0; a < p; ++a) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < p; ++n) acc += f[n] * w[(a * n) % p];
    coeffs[a] = acc;
  }
  return Spectrum(f.modulus(), std::move(coeffs));
}

/** Inverse transform with the 1/p factor: f(n) = (1/p) sum_a F(a) e^{-2*pi*i*a*n/p}.
 *  A real result is demanded, so F must be conjugate-symmetric within tol_dft;
 *  the (tiny) imaginary parts are discarded. */
inline ZpFunction idft(const Spectrum& F, double tol_dft = 1e-9) {
  const std::size_t p = F.size();
  const double scale = std::max(1.0, F.max_abs());
  for (std::size_t a = 0; a < p; ++a) {
    const std::complex<double> diff = F[a] - std::conj(F[(p - a) % p]);
    if (std::abs(diff) > tol_dft * scale)
      throw SymmetryViolation("spectrum is not conjugate-symmetric at place " + std::to_string(a));
  }
  const auto w = detail::unit_roots(p);
  std::vector<double> values(p);
  for (std::size_t n = 0; n < p; ++n) {
    std::complex<double> acc = 0.0;
    for (std::size_t a = 0; a < p; ++a) acc += F[a] * std::conj(w[(a * n) % p]);
    values[n] = acc.real() / static_cast<double>(p);
  }
  return ZpFunction(F.modulus(), std::move(values));
}

/** Cyclic convolution (f*g)(n) = sum_a f(a) g(n-a mod p). */
inline ZpFunction convolve(const ZpFunction& f, const ZpFunction& g) {
  detail::require_same_modulus(f.modulus(), g.modulus(), "convolve");
  const std::size_t p = f.size();
  std::vector<double> out(p, 0.0);
  for (std::size_t n = 0; n < p; ++n) {
    double acc = 0.0;
    for (std::size_t a = 0; a < p; ++a) acc += f[a] * g[(n + p - a) % p];
    out[n] = acc;
  }
  return ZpFunction(f.modulus(), std::move(out));
}

/** {n : f(n) > 0} with no range demands; suits convolutions, whose values
 *  are counts rather than [0,1] data. */
inline SupportSet positive_support(const ZpFunction& f) {
  std::vector<std::size_t> members;
  for (std::size_t n = 0; n < f.size(); ++n)
    if (f[n] > 0.0) members.push_back(n);
  return SupportSet(f.modulus(), std::move(members));
}

/** Support of g with exact strict positivity; g must take values in [0,1]. */
inline SupportSet support_of(const ZpFunction& g) {
  for (std::size_t n = 0; n < g.size(); ++n)
    if (g[n] < 0.0 || g[n] > 1.0)
      throw RangeViolation("g(" + std::to_string(n) + ") = " + std::to_string(g[n]) + " outside [0,1]");
  return positive_support(g);
}

}  // namespace farkas_balance
