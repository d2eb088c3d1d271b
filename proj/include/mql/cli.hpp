#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mql/coeff_algebra.hpp"

namespace mql::cli {

/// Malformed input; exits with status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int epsilon = 1;
  std::map<std::int64_t, double> lambdas;
  std::int64_t k_max = 256;
  std::int64_t n_max = 0;  ///< 0 means K_max / 2
  std::string backend = "formal";
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  json raw = json::object();  ///< command-specific keys

  std::int64_t effective_n_max() const { return n_max > 0 ? n_max : k_max / 2; }
};

/// Validates every known key; throws InputError naming the offending key.
RunConfig parse_config(const json& j);

struct CommandSpec {
  std::string name;
  std::string usage;
  std::string help;
  std::vector<std::string> operations;  ///< engine operations reachable from the command
};

const std::vector<CommandSpec>& command_table();

/// Engine operations that must be reachable from some command.
const std::vector<std::string>& engine_operations();

/// argv excludes the program name. Returns 0 when every check in scope
/// passes, 1 when a check fails, 2 on malformed input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mql::cli
