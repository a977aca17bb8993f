#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpt/innovations.hpp"
#include "fpt/passage_analysis.hpp"

namespace fpt {

struct GridSpec {
  double lo = 0.0;
  double hi = 10.0;
  double step = 0.1;
  std::vector<double> points() const;
};

/// "LO:HI:STEP" with LO <= HI and STEP > 0.
GridSpec parse_grid(const std::string& text);

struct ValidateBlock {
  std::vector<double> n_orders{0.5, 1.0, 2.0};
  std::vector<double> w_orders{-0.1, -0.4};
  std::vector<double> y_values{-2.0, 0.0};
};

struct RunConfig {
  nlohmann::json family;  // as written, for the echo
  InnovationSpec spec = InnovationSpec::gaussian(0.0, 1.0);
  double lambda = 0.5;
  double x = 0.0;
  std::optional<double> a;
  std::uint64_t seed = 42;
  std::uint64_t paths = 100000;
  std::uint64_t max_steps = 1000000;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  GridSpec u_grid;
  double delta = 0.5;
  std::optional<double> cap;
  std::optional<double> n_cap;
  ValidateBlock validate;
  bool dump_paths = false;
};

/// Values given on the command line; they win over the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  std::optional<std::uint64_t> max_steps;
  std::optional<double> rel_tol;
  std::optional<std::string> u_grid;
  std::optional<double> delta;
  std::optional<double> cap;
};

/// Builds a family from {"name": ..., parameters}; `where` prefixes messages.
InnovationSpec parse_family(const nlohmann::json& j, const std::string& where = "$.family");

/// Validates the document and applies overrides. Throws ErrorKind::config
/// with the offending field path.
RunConfig parse_config(const nlohmann::json& doc, const Overrides& flags = {});
RunConfig load_config(const std::string& path, const Overrides& flags = {});

/// Normalised config with every default filled in.
nlohmann::json config_echo(const RunConfig& cfg);

enum class Subcommand { phi, simulate, bounds, identity_check, certificate, validate };
std::optional<Subcommand> parse_subcommand(const std::string& name);
std::string to_string(Subcommand s);

nlohmann::json to_json(const QuadratureResult& r);
nlohmann::json to_json(const SimulationSummary& s);
nlohmann::json to_json(const IdentityResult& r);
nlohmann::json to_json(const ExponentialCertificate& c);
nlohmann::json to_json(const FeasibilityReport& f);
nlohmann::json to_json(const PassageReport& r);

/// Runs one subcommand, writing report.json (and table.csv where defined)
/// into out_dir. Returns the "result" object of the report.
nlohmann::json run_subcommand(const RunConfig& cfg, Subcommand which, const std::string& out_dir);

/// Entry point shared by the executable: parses argv, runs, maps errors to
/// exit codes and prints a JSON error object on stderr.
int cli_main(int argc, char** argv);

}  // namespace fpt
