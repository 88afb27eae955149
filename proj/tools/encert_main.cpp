// Command-line driver: proves the enclosures of a script and optionally
// writes a checkable certificate, or re-checks an existing certificate.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "encert/certificate.hpp"
#include "encert/checker.hpp"

namespace {

int run_prove(const std::string &path, const encert::RunConfig &config,
              const std::string &cert_path, bool quiet) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  encert::RunResult result = encert::run_source(buf.str(), config);
  if (quiet) {
    std::istringstream lines(result.report);
    std::string line;
    while (std::getline(lines, line))
      if (line.rfind("warning:", 0) != 0 && line.rfind("note:", 0) != 0)
        std::cout << line << "\n";
  } else {
    std::cout << result.report;
  }
  if (result.exit_code == 0 && !cert_path.empty()) {
    encert::Certificate cert =
        encert::emit_certificate(result.script, config, result.sequents);
    encert::widen(cert);
    std::ofstream out(cert_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << cert_path << "'\n";
      return 2;
    }
    out << encert::serialize(cert);
    if (!quiet) std::cout << "certificate written to " << cert_path << "\n";
  }
  return result.exit_code;
}

int run_check(const std::string &path, bool quiet) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return 2;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  encert::Certificate cert;
  try {
    cert = encert::parse_certificate(buf.str());
  } catch (const encert::CertFormatError &e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return 2;
  }
  encert::CheckReport rep = encert::check(cert);
  if (!rep.structural_ok) {
    std::cerr << "structural error: sequent " << rep.failed_sequent << ", lemma "
              << rep.failed_lemma << ": " << rep.message << "\n";
    return 2;
  }
  if (!rep.valid) {
    std::cout << "INVALID: sequent " << rep.failed_sequent << ", lemma " << rep.failed_lemma
              << ": " << rep.message << "\n";
    return 1;
  }
  if (!quiet) {
    std::cout << "certificate valid";
    if (rep.assumed_rules > 0)
      std::cout << " modulo " << rep.assumed_rules << " assumed identit"
                << (rep.assumed_rules == 1 ? "y" : "ies");
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"encert: certifies enclosures of expressions with rounded operators"};
  app.require_subcommand(0, 1);

  encert::RunConfig config;
  std::string script_path, cert_out, cert_in;
  bool quiet = false;

  app.add_option("--precision", config.precision, "working mantissa bits (default 128)")
      ->check(CLI::Range(2u, 1u << 20));
  app.add_option("--budget", config.max_applications,
                 "theorem application budget (default 1000000)")
      ->check(CLI::PositiveNumber);
  app.add_option("--iterations", config.max_iterations,
                 "saturation iteration budget (default 100)")
      ->check(CLI::PositiveNumber);
  app.add_option("--depth", config.dichotomy_depth, "dichotomy depth per axis (default 32)")
      ->check(CLI::PositiveNumber);
  app.add_option("--cert", cert_out, "write the (widened) proof certificate here");
  app.add_flag("--quiet", quiet, "suppress warnings and notes");

  CLI::App *prove = app.add_subcommand("prove", "prove the goals of a script (default)");
  prove->fallthrough();
  prove->add_option("script", script_path, "input script")->required();
  CLI::App *chk = app.add_subcommand("check", "verify a previously written certificate");
  chk->fallthrough();
  chk->add_option("certificate", cert_in, "certificate file")->required();
  app.add_option("script", script_path, "input script");

  CLI11_PARSE(app, argc, argv);

  try {
    if (chk->parsed()) return run_check(cert_in, quiet);
    if (prove->parsed() || !script_path.empty())
      return run_prove(script_path, config, cert_out, quiet);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cerr << app.help();
  return 2;
}
