#pragma once

#include "sigrecover/paths.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace sigrecover {

/// Malformed input file or document.
class FormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// CSV with header "t,x1,...,xd" and one knot per row.
void write_path_csv(std::ostream& os, const PiecewiseLinearPath& path);
PiecewiseLinearPath read_path_csv(std::istream& is);

/// JSON envelope: {"dim", "samples", "metadata", "times", "points"}.
nlohmann::json path_to_json(const PiecewiseLinearPath& path,
                            const nlohmann::json& metadata = nlohmann::json::object());
PiecewiseLinearPath path_from_json(const nlohmann::json& doc);

/// Dispatches on extension: ".json" uses the envelope, anything else CSV.
PiecewiseLinearPath load_path(const std::filesystem::path& file);
void save_path(const std::filesystem::path& file, const PiecewiseLinearPath& path,
               const nlohmann::json& metadata = nlohmann::json::object());

} // namespace sigrecover
