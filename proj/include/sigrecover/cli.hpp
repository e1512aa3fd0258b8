#pragma once

#include "json.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigrecover::cli {

/// Process exit codes of the sigrecover tool.
enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,  ///< internal failure
  kValidation = 2,  ///< bad flags, config, input file, or budget
  kComputation = 3, ///< the computation itself failed (e.g. ambiguous recovery)
};

/// Config or input rejected before any computation.
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

const std::vector<std::string>& commands();

/// Every key a command accepts, with its default value. null means "unset".
nlohmann::json default_config(const std::string& command);

/// defaults <- file <- overrides, rejecting unknown keys and values whose
/// JSON type differs from the default's.
nlohmann::json merge_config(const std::string& command, const nlohmann::json& file,
                            const nlohmann::json& overrides);

/// Runs the tool; returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sigrecover::cli
