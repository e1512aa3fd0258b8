#include "sigrecover/path_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sigrecover {

void write_path_csv(std::ostream& os, const PiecewiseLinearPath& path) {
  os << "t";
  for (int k = 1; k <= path.dim(); ++k) {
    os << ",x" << k;
  }
  os << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < path.size(); ++i) {
    os << path.time(i);
    for (double v : path.point(i)) {
      os << ',' << v;
    }
    os << '\n';
  }
}

PiecewiseLinearPath read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw FormatError("path csv: empty input");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
        cell.pop_back();
      }
      header.push_back(cell);
    }
  }
  if (header.size() < 2 || header[0] != "t") {
    throw FormatError("path csv: header must be 't,x1,...,xd'");
  }
  const std::size_t dim = header.size() - 1;
  for (std::size_t k = 1; k <= dim; ++k) {
    if (header[k] != "x" + std::to_string(k)) {
      throw FormatError("path csv: unexpected column '" + header[k] + "'");
    }
  }
  std::vector<double> times;
  std::vector<Point> points;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw FormatError("path csv: bad number '" + cell + "' on row " +
                          std::to_string(row));
      }
    }
    if (vals.size() != dim + 1) {
      throw FormatError("path csv: row " + std::to_string(row) + " has " +
                        std::to_string(vals.size()) + " columns, expected " +
                        std::to_string(dim + 1));
    }
    times.push_back(vals[0]);
    points.emplace_back(vals.begin() + 1, vals.end());
  }
  try {
    return PiecewiseLinearPath(std::move(times), std::move(points));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("path csv: ") + e.what());
  }
}

nlohmann::json path_to_json(const PiecewiseLinearPath& path,
                            const nlohmann::json& metadata) {
  nlohmann::json doc;
  doc["dim"] = path.dim();
  doc["samples"] = path.size();
  doc["metadata"] = metadata;
  doc["times"] = path.times();
  doc["points"] = path.points();
  return doc;
}

PiecewiseLinearPath path_from_json(const nlohmann::json& doc) {
  try {
    auto times = doc.at("times").get<std::vector<double>>();
    auto points = doc.at("points").get<std::vector<Point>>();
    if (doc.contains("samples") && doc["samples"].get<std::size_t>() != times.size()) {
      throw FormatError("path json: 'samples' disagrees with data length");
    }
    PiecewiseLinearPath path(std::move(times), std::move(points));
    if (doc.contains("dim") && doc["dim"].get<int>() != path.dim()) {
      throw FormatError("path json: 'dim' disagrees with point length");
    }
    return path;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("path json: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("path json: ") + e.what());
  }
}

PiecewiseLinearPath load_path(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw FormatError("cannot open path file " + file.string());
  }
  if (file.extension() == ".json") {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("path json: " + std::string(e.what()));
    }
    return path_from_json(doc);
  }
  return read_path_csv(in);
}

void save_path(const std::filesystem::path& file, const PiecewiseLinearPath& path,
               const nlohmann::json& metadata) {
  std::ofstream out(file);
  if (!out) {
    throw FormatError("cannot write " + file.string());
  }
  if (file.extension() == ".json") {
    out << path_to_json(path, metadata).dump(2) << '\n';
  } else {
    write_path_csv(out, path);
  }
}

} // namespace sigrecover
