#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "farkas_balance/dichotomy.hpp"
#include "farkas_balance/errors.hpp"
#include "farkas_balance/zp.hpp"

namespace farkas_balance {

namespace detail {

/** 17 significant digits: lossless decimal round-trip for doubles. */
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

inline std::string format_real_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_real(values[i]);
  }
  out += "]";
  return out;
}

inline std::string format_index_array(const std::vector<std::size_t>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  out += "]";
  return out;
}

}  // namespace detail

struct ToleranceOverrides {
  std::optional<double> tol_hull;
  std::optional<double> tol_sep;
  std::optional<double> tol_dft;
};

/** A parsed, schema-valid problem instance. */
struct Instance {
  PrimeModulus modulus;
  SupportSet support;
  PlaceSet places;
  std::size_t budget;
  ToleranceOverrides tolerances;
  std::optional<ZpFunction> g;  // present when the instance supplied g rather than a support list
};

/**
 * Validates and decodes an instance document. Every schema violation is
 * collected; any violation aborts with the full list.
 */
inline Instance parse_instance(const nlohmann::json& j) {
  std::vector<std::string> bad;

  if (!j.is_object()) throw InstanceValidationError({"instance: top-level value must be an object"});

  std::uint64_t p = 0;
  bool p_ok = false;
  if (!j.contains("p") || !j["p"].is_number_integer() || j["p"].get<std::int64_t>() < 2)
    bad.push_back("p: required integer >= 2");
  else {
    p = j["p"].get<std::uint64_t>();
    if (!PrimeModulus::is_prime(p))
      bad.push_back("p: " + std::to_string(p) + " is not prime");
    else
      p_ok = true;
  }

  const bool has_g = j.contains("g");
  const bool has_support = j.contains("support");
  if (has_g == has_support) bad.push_back("exactly one of \"g\" or \"support\" must be given");

  std::vector<double> g_values;
  if (has_g) {
    if (!j["g"].is_array())
      bad.push_back("g: must be an array of reals");
    else {
      for (const auto& x : j["g"]) {
        if (!x.is_number()) {
          bad.push_back("g: entries must be numbers");
          break;
        }
        g_values.push_back(x.get<double>());
      }
      if (p_ok && g_values.size() != p)
        bad.push_back("g: expected " + std::to_string(p) + " entries, got " + std::to_string(g_values.size()));
      for (std::size_t n = 0; n < g_values.size(); ++n)
        if (!(g_values[n] >= 0.0 && g_values[n] <= 1.0)) {
          bad.push_back("g[" + std::to_string(n) + "]: value outside [0,1]");
          break;
        }
    }
  }

  std::vector<std::size_t> support_members;
  if (has_support) {
    if (!j["support"].is_array())
      bad.push_back("support: must be an array of integers");
    else {
      bool range_ok = true;
      for (const auto& x : j["support"]) {
        if (!x.is_number_integer() || x.get<std::int64_t>() < 0 ||
            (p_ok && x.get<std::uint64_t>() >= p)) {
          bad.push_back("support: members must be integers in [0, p-1]");
          range_ok = false;
          break;
        }
        support_members.push_back(x.get<std::size_t>());
      }
      if (range_ok) {
        auto sorted = support_members;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
          bad.push_back("support: members must be distinct");
      }
    }
  }

  std::vector<std::int64_t> places_raw;
  if (j.contains("places")) {
    if (!j["places"].is_array())
      bad.push_back("places: must be an array of integers");
    else {
      for (const auto& x : j["places"]) {
        if (!x.is_number_integer()) {
          bad.push_back("places: members must be integers");
          break;
        }
        const std::int64_t a = x.get<std::int64_t>();
        if (a < 1 || (p_ok && a >= static_cast<std::int64_t>(p))) {
          bad.push_back("places: " + std::to_string(a) + " outside [1, p-1]");
          break;
        }
        places_raw.push_back(a);
      }
    }
  }

  std::size_t budget = 0;
  if (!j.contains("E") || !j["E"].is_number_integer() || j["E"].get<std::int64_t>() < 0)
    bad.push_back("E: required integer >= 0");
  else
    budget = j["E"].get<std::size_t>();

  ToleranceOverrides tols;
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object())
      bad.push_back("tolerances: must be an object");
    else {
      for (const char* key : {"tol_hull", "tol_sep", "tol_dft"}) {
        if (!j["tolerances"].contains(key)) continue;
        const auto& x = j["tolerances"][key];
        if (!x.is_number() || !(x.get<double>() > 0.0)) {
          bad.push_back(std::string("tolerances.") + key + ": must be a positive number");
          continue;
        }
        const double v = x.get<double>();
        if (key == std::string("tol_hull")) tols.tol_hull = v;
        if (key == std::string("tol_sep")) tols.tol_sep = v;
        if (key == std::string("tol_dft")) tols.tol_dft = v;
      }
    }
  }

  if (!bad.empty()) throw InstanceValidationError(std::move(bad));

  PrimeModulus modulus(p);
  std::optional<ZpFunction> g;
  try {
    if (has_g) {
      g = ZpFunction(modulus, std::move(g_values));
      SupportSet support = support_of(*g);
      PlaceSet places(modulus, places_raw);
      return Instance{modulus, std::move(support), std::move(places), budget, tols, std::move(g)};
    }
    SupportSet support(modulus, std::move(support_members));
    PlaceSet places(modulus, places_raw);
    return Instance{modulus, std::move(support), std::move(places), budget, tols, std::nullopt};
  } catch (const Error& e) {
    throw InstanceValidationError({std::string(e.what())});
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path + ": JSON parse error: " + e.what());
  }
  return j;
}

inline Instance load_instance(const std::string& path) { return parse_instance(read_json_file(path)); }

/**
 * Certificate files are emitted by hand with a fixed key order and %.17g
 * reals, so identical certificates serialize to identical bytes and parsing
 * recovers every double exactly.
 */
inline std::string serialize_certificate(const Certificate& cert) {
  const SolveDiagnostics& d = cert.diagnostics();
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": 1,\n";
  out << "  \"variant\": \"" << (cert.is_vanishing() ? "vanishing_balanced" : "small_spectral_support")
      << "\",\n";
  out << "  \"p\": " << cert.h().modulus().value() << ",\n";
  out << "  \"h\": " << detail::format_real_array(cert.h().values()) << ",\n";
  if (!cert.is_vanishing()) {
    const SmallSpectralSupport& c = cert.spectral();
    out << "  \"spectrum\": [";
    bool first = true;
    for (std::size_t a = 0; a < c.spectrum.size(); ++a) {
      const auto& z = c.spectrum[a];
      if (z == std::complex<double>(0.0, 0.0)) continue;
      if (!first) out << ", ";
      first = false;
      out << "[" << a << ", " << detail::format_real(z.real()) << ", " << detail::format_real(z.imag())
          << "]";
    }
    out << "],\n";
    out << "  \"exceptions\": " << detail::format_index_array(c.exceptions) << ",\n";
  }
  out << "  \"diagnostics\": {\n";
  out << "    \"rounds\": " << d.rounds << ",\n";
  if (cert.is_vanishing())
    out << "    \"l1_norm\": " << detail::format_real(cert.vanishing().l1_norm) << ",\n";
  else
    out << "    \"margin\": " << detail::format_real(cert.spectral().margin) << ",\n";
  out << "    \"deleted_count\": " << d.deleted_count << ",\n";
  out << "    \"max_residual\": " << detail::format_real(d.max_embed_residual) << ",\n";
  out << "    \"pivots\": " << d.pivots << ",\n";
  out << "    \"solver_version\": \"" << d.solver_version << "\",\n";
  out << "    \"config\": {\n";
  out << "      \"E\": " << d.config.budget << ",\n";
  out << "      \"tol_hull\": " << detail::format_real(d.config.tol_hull) << ",\n";
  out << "      \"tol_sep\": " << detail::format_real(d.config.tol_sep) << ",\n";
  out << "      \"tol_dft\": " << detail::format_real(d.config.tol_dft) << ",\n";
  out << "      \"deterministic\": " << (d.config.deterministic ? "true" : "false") << "\n";
  out << "    }\n";
  out << "  }\n";
  out << "}\n";
  return out.str();
}

inline Certificate parse_certificate(const nlohmann::json& j) {
  try {
    if (!j.is_object()) throw Error("certificate: top-level value must be an object");
    const std::string variant = j.at("variant").get<std::string>();
    PrimeModulus modulus(j.at("p").get<std::uint64_t>());
    std::vector<double> h_values = j.at("h").get<std::vector<double>>();
    ZpFunction h(modulus, std::move(h_values));

    const auto& dj = j.at("diagnostics");
    SolveDiagnostics diag;
    diag.rounds = dj.at("rounds").get<std::size_t>();
    diag.deleted_count = dj.at("deleted_count").get<std::size_t>();
    diag.max_embed_residual = dj.at("max_residual").get<double>();
    diag.pivots = dj.at("pivots").get<std::size_t>();
    diag.solver_version = dj.at("solver_version").get<std::string>();
    const auto& cj = dj.at("config");
    diag.config.budget = cj.at("E").get<std::size_t>();
    diag.config.tol_hull = cj.at("tol_hull").get<double>();
    diag.config.tol_sep = cj.at("tol_sep").get<double>();
    diag.config.tol_dft = cj.at("tol_dft").get<double>();
    diag.config.deterministic = cj.at("deterministic").get<bool>();

    if (variant == "vanishing_balanced") {
      VanishingBalanced cert{std::move(h), diag.rounds, dj.at("l1_norm").get<double>()};
      return Certificate(std::move(cert), std::move(diag));
    }
    if (variant == "small_spectral_support") {
      std::vector<std::complex<double>> coeffs(modulus.size(), std::complex<double>(0.0, 0.0));
      for (const auto& triple : j.at("spectrum")) {
        const std::size_t a = triple.at(0).get<std::size_t>();
        if (a >= modulus.size()) throw Error("certificate: spectrum place out of range");
        coeffs[a] = std::complex<double>(triple.at(1).get<double>(), triple.at(2).get<double>());
      }
      std::vector<std::size_t> exceptions = j.at("exceptions").get<std::vector<std::size_t>>();
      diag.margin = dj.at("margin").get<double>();
      SmallSpectralSupport cert{std::move(h), Spectrum(modulus, std::move(coeffs)),
                                std::move(exceptions), diag.rounds, diag.margin};
      return Certificate(std::move(cert), std::move(diag));
    }
    throw Error("certificate: unknown variant \"" + variant + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("certificate: malformed document: ") + e.what());
  }
}

inline Certificate load_certificate(const std::string& path) {
  return parse_certificate(read_json_file(path));
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
}

/** CSV rows (a, re, im, modulus) for a = 0..p-1, with a header line. */
inline void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "a,re,im,modulus\n";
  for (std::size_t a = 0; a < spectrum.size(); ++a) {
    const auto& z = spectrum[a];
    out << a << "," << detail::format_real(z.real()) << "," << detail::format_real(z.imag()) << ","
        << detail::format_real(std::abs(z)) << "\n";
  }
}

}  // namespace farkas_balance
