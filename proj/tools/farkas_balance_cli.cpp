#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "farkas_balance/farkas_balance.hpp"

namespace fb = farkas_balance;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitAmbiguity = 2;
constexpr int kExitVerificationFailure = 3;

/** FARKAS_BALANCE_TOL seeds the tolerance defaults; explicit flags win. */
std::optional<double> env_tolerance() {
  const char* raw = std::getenv("FARKAS_BALANCE_TOL");
  if (!raw || !*raw) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0)) {
    std::cerr << "warning: ignoring invalid FARKAS_BALANCE_TOL=\"" << raw << "\"\n";
    return std::nullopt;
  }
  return v;
}

std::vector<std::size_t> parse_index_list(const std::string& csv) {
  std::vector<std::size_t> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const long long v = std::stoll(item, &pos);
    if (pos != item.size() || v < 0) throw fb::Error("invalid index \"" + item + "\" in list");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void print_members(std::ostream& os, const std::vector<std::size_t>& members) {
  if (members.empty()) {
    os << "(empty)";
    return;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) os << " ";
    os << members[i];
  }
}

int cmd_solve(const std::string& input, const std::string& output, double tol_hull, double tol_sep,
              double tol_dft, bool hull_flag_set, bool sep_flag_set, bool dft_flag_set,
              std::uint64_t max_p) {
  const fb::Instance instance = fb::load_instance(input);
  if (instance.modulus.value() > max_p)
    throw fb::InstanceValidationError(
        {"p: " + std::to_string(instance.modulus.value()) + " exceeds --max-p guard " + std::to_string(max_p)});

  fb::SolveConfig cfg;
  cfg.budget = instance.budget;
  cfg.tol_hull = instance.tolerances.tol_hull.value_or(tol_hull);
  cfg.tol_sep = instance.tolerances.tol_sep.value_or(tol_sep);
  cfg.tol_dft = instance.tolerances.tol_dft.value_or(tol_dft);
  // Explicit flags outrank tolerances embedded in the instance file.
  if (hull_flag_set) cfg.tol_hull = tol_hull;
  if (sep_flag_set) cfg.tol_sep = tol_sep;
  if (dft_flag_set) cfg.tol_dft = tol_dft;

  const fb::Certificate cert = fb::run_dichotomy(instance.support, instance.places, cfg);
  fb::write_file(output, fb::serialize_certificate(cert));
  std::cout << "wrote " << (cert.is_vanishing() ? "vanishing_balanced" : "small_spectral_support")
            << " certificate to " << output << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& instance_path, const std::string& certificate_path, double tol) {
  const fb::Instance instance = fb::load_instance(instance_path);
  const fb::Certificate cert = fb::load_certificate(certificate_path);
  const fb::VerificationReport report =
      fb::verify_certificate(cert, instance.support, instance.places, instance.budget, tol);

  std::printf("%-28s %-6s %-14s %-14s\n", "property", "status", "residual", "tolerance");
  for (const auto& prop : report.properties) {
    std::printf("%-28s %-6s %-14.6g %-14.6g%s\n", prop.name.c_str(), prop.pass ? "pass" : "FAIL",
                prop.residual, prop.tolerance, prop.informational ? "  (informational)" : "");
  }
  std::printf("verdict: %s\n", report.verdict ? "pass" : "fail");
  return report.verdict ? kExitOk : kExitVerificationFailure;
}

int cmd_dft(std::uint64_t p, const std::string& set_csv, const std::string& g_file, bool set_given) {
  fb::PrimeModulus modulus(p);
  std::optional<fb::ZpFunction> f;
  if (set_given) {
    const auto members = parse_index_list(set_csv);
    f = fb::ZpFunction::indicator(modulus, members);
  } else {
    const nlohmann::json j = fb::read_json_file(g_file);
    if (!j.is_array()) throw fb::Error(g_file + ": expected a JSON array of reals");
    f = fb::ZpFunction(modulus, j.get<std::vector<double>>());
  }
  fb::write_spectrum_csv(std::cout, fb::dft(*f));
  return kExitOk;
}

int cmd_demo_sumset(std::uint64_t p, const std::string& set_csv, const std::string& certificate_path) {
  fb::PrimeModulus modulus(p);
  const fb::SupportSet S(modulus, parse_index_list(set_csv));

  const fb::SupportSet brute = fb::brute_force_sumset(S, S);
  const fb::SupportSet via_conv = fb::positive_support(fb::convolve(S.indicator(), S.indicator()));

  std::cout << "S+S (brute force): ";
  print_members(std::cout, brute.members());
  std::cout << "\nsupport(S*S):      ";
  print_members(std::cout, via_conv.members());
  std::cout << "\n";
  if (!(brute == via_conv)) {
    std::cerr << "error: sumset disagreement between brute force and convolution\n";
    return kExitVerificationFailure;
  }

  if (!certificate_path.empty()) {
    const fb::Certificate cert = fb::load_certificate(certificate_path);
    fb::detail::require_same_modulus(cert.h().modulus(), modulus, "demo-sumset");
    const fb::SupportSet minorant = fb::demo_minorant(S, cert.h());
    std::cout << "minorant support:  ";
    print_members(std::cout, minorant.members());
    std::cout << "\n";
    bool contained = true;
    for (std::size_t n : minorant.members())
      if (!brute.contains(n)) contained = false;
    std::cout << "containment:       " << (contained ? "pass" : "FAIL") << "\n";
    if (!contained) return kExitVerificationFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certificates for the balanced-function dichotomy on Z_p"};
  app.require_subcommand(1);

  const double base_tol = env_tolerance().value_or(0.0);
  const double default_solver_tol = base_tol > 0.0 ? base_tol : 1e-9;
  const double default_verify_tol = base_tol > 0.0 ? base_tol : 1e-7;

  // solve
  std::string solve_input, solve_output;
  double tol_hull = default_solver_tol, tol_sep = default_solver_tol, tol_dft = default_solver_tol;
  std::uint64_t max_p = 4096;
  auto* solve = app.add_subcommand("solve", "Solve an instance and write a certificate file");
  solve->add_option("input", solve_input, "Instance JSON file")->required();
  solve->add_option("-o,--output", solve_output, "Certificate output path")->required();
  auto* hull_opt = solve->add_option("--tol-hull", tol_hull, "Hull feasibility tolerance");
  auto* sep_opt = solve->add_option("--tol-sep", tol_sep, "Strict separation tolerance");
  auto* dft_opt = solve->add_option("--tol-dft", tol_dft, "Transform tolerance");
  solve->add_option("--max-p", max_p, "Refuse instances with p beyond this guard");

  // verify
  std::string verify_instance, verify_certificate;
  double verify_tol = default_verify_tol;
  auto* verify = app.add_subcommand("verify", "Re-check a certificate against its instance");
  verify->add_option("instance", verify_instance, "Instance JSON file")->required();
  verify->add_option("certificate", verify_certificate, "Certificate JSON file")->required();
  verify->add_option("--tol", verify_tol, "Verification tolerance (spectral checks scale by p)");

  // dft
  std::uint64_t dft_p = 0;
  std::string dft_set, dft_g_file;
  auto* dft_cmd = app.add_subcommand("dft", "Print the spectrum of a set or function as CSV");
  dft_cmd->add_option("p", dft_p, "Prime modulus")->required();
  auto* set_opt = dft_cmd->add_option("--set", dft_set, "Comma-separated members of an indicator set");
  auto* gfile_opt = dft_cmd->add_option("--g-file", dft_g_file, "JSON array file with p real values");
  set_opt->excludes(gfile_opt);

  // demo-sumset
  std::uint64_t demo_p = 0;
  std::string demo_set, demo_certificate;
  auto* demo = app.add_subcommand("demo-sumset", "Compare S+S by brute force, convolution, and a minorant");
  demo->add_option("p", demo_p, "Prime modulus")->required();
  demo->add_option("--set", demo_set, "Comma-separated members of S")->required();
  demo->add_option("--certificate", demo_certificate, "Certificate whose h is used as the minorant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (solve->parsed())
      return cmd_solve(solve_input, solve_output, tol_hull, tol_sep, tol_dft, hull_opt->count() > 0,
                       sep_opt->count() > 0, dft_opt->count() > 0, max_p);
    if (verify->parsed()) return cmd_verify(verify_instance, verify_certificate, verify_tol);
    if (dft_cmd->parsed()) {
      if ((set_opt->count() > 0) == (gfile_opt->count() > 0))
        throw fb::Error("dft: exactly one of --set or --g-file is required");
      return cmd_dft(dft_p, dft_set, dft_g_file, set_opt->count() > 0);
    }
    if (demo->parsed()) return cmd_demo_sumset(demo_p, demo_set, demo_certificate);
  } catch (const fb::InstanceValidationError& e) {
    for (const auto& violation : e.violations()) std::cerr << "error: " << violation << "\n";
    return kExitInputError;
  } catch (const fb::NumericalAmbiguity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAmbiguity;
  } catch (const fb::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
