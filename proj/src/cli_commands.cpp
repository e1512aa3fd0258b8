#include "sigrecover/cli.hpp"

#include "sigrecover/convergence.hpp"
#include "sigrecover/frechet.hpp"
#include "sigrecover/gaussian_sim.hpp"
#include "sigrecover/path_io.hpp"
#include "sigrecover/reconstruct.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

namespace sigrecover::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

json model_defaults() {
  return {{"model", "bm"}, {"hurst", 0.5}, {"dim", 2}, {"n_points", 513}};
}

json recovery_defaults() {
  const ReconstructionConfig rc;
  json j = to_json(rc);
  j.erase("epsilon");
  j.erase("delta");
  return j;
}

json common_defaults() { return {{"seed", 0}, {"threads", 1}, {"out_dir", "."}}; }

bool same_kind(const json& def, const json& value) {
  if (def.is_null()) {
    return value.is_string() || value.is_null();
  }
  if (def.is_number_float()) {
    return value.is_number();
  }
  if (def.is_number_unsigned() || def.is_number_integer()) {
    return value.is_number_integer();
  }
  if (def.is_array()) {
    return value.is_array();
  }
  return def.type() == value.type();
}

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

/// A flag value typed like the key's default.
json parse_flag(const json& def, const std::string& text) {
  if (def.is_null() || def.is_string()) {
    return text;
  }
  std::string src = text;
  if (def.is_array() && (src.empty() || src.front() != '[')) {
    src = "[" + src + "]";
  }
  try {
    return json::parse(src);
  } catch (const json::parse_error&) {
    throw ValidationError("cannot parse '" + text + "'");
  }
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ValidationError("cannot open " + file.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(file.string() + ": " + e.what());
  }
}

template <class T>
T get(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config key '") + key + "': " + e.what());
  }
}

GaussianModel model_from(const json& cfg) {
  GaussianModel m;
  const auto name = get<std::string>(cfg, "model");
  try {
    m.variant = parse_variant(name);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  m.hurst = name == "bm" ? 0.5 : get<double>(cfg, "hurst");
  m.dim = get<int>(cfg, "dim");
  m.n_points = get<std::size_t>(cfg, "n_points");
  m.seed = get<std::uint64_t>(cfg, "seed");
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return m;
}

ReconstructionConfig recovery_from(const json& cfg, double eps, double delta) {
  ReconstructionConfig rc;
  try {
    rc.lattice = CubeLattice(eps, delta);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  rc.max_word_length = get<std::size_t>(cfg, "max_word_length");
  rc.zero.log10_base = get<double>(cfg, "zero_log10_base");
  rc.zero.log10_per_letter = get<double>(cfg, "zero_log10_per_letter");
  rc.candidate_radius = get<double>(cfg, "candidate_radius");
  rc.search_budget = get<std::size_t>(cfg, "search_budget");
  rc.quadrature.substeps = get<int>(cfg, "substeps");
  rc.quadrature.adaptive_tolerance = get<double>(cfg, "adaptive_tolerance");
  rc.quadrature.max_bisections = get<int>(cfg, "max_bisections");
  if (rc.quadrature.substeps < 2 || rc.quadrature.substeps % 2 != 0) {
    throw ValidationError("substeps must be an even number >= 2");
  }
  if (!(rc.quadrature.adaptive_tolerance >= 0.0) || rc.quadrature.max_bisections < 0) {
    throw ValidationError("adaptive_tolerance and max_bisections must be >= 0");
  }
  if (!(rc.candidate_radius > 0.0)) {
    throw ValidationError("candidate_radius must be > 0");
  }
  return rc;
}

/// The input file if given, otherwise a path sampled from the model.
PiecewiseLinearPath input_path(const json& cfg, json& meta) {
  if (!cfg.at("input").is_null()) {
    const auto file = get<std::string>(cfg, "input");
    try {
      return load_path(file);
    } catch (const FormatError& e) {
      throw ValidationError(file + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(file + ": " + e.what());
    }
  }
  const GaussianModel m = model_from(cfg);
  meta["sampled_model"] = to_json(m);
  return sample_path(m);
}

fs::path out_dir(const json& cfg) {
  fs::path dir = get<std::string>(cfg, "out_dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ValidationError("cannot create " + dir.string() + ": " + ec.message());
  }
  return dir;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) {
    throw ValidationError("cannot write " + file.string());
  }
  os << text;
}

void write_json(const fs::path& file, const json& doc) { write_text(file, doc.dump(2) + "\n"); }

json metadata(const std::string& command, const json& cfg) {
  return {{"tool", "sigrecover"}, {"version", kVersion}, {"command", command}, {"config", cfg}};
}

json ext_to_json(const ExtReal& v) {
  return {{"sign", v.sign()},
          {"log10_abs", v.is_zero() ? json(nullptr) : json(v.log10_abs())},
          {"value", v.to_double()}};
}

int cmd_signature(const json& cfg, std::ostream& out) {
  json meta = metadata("signature", cfg);
  const int level = get<int>(cfg, "level");
  if (level < 0) {
    throw ValidationError("level must be >= 0");
  }
  const PiecewiseLinearPath path = input_path(cfg, meta);
  const auto d = static_cast<double>(path.dim());
  double count = 0.0;
  for (int k = 0; k <= level; ++k) {
    count += std::pow(d, k);
  }
  const auto budget = get<double>(cfg, "max_coefficients");
  if (count > budget) {
    std::ostringstream msg;
    msg << "level " << level << " in dimension " << path.dim() << " needs " << std::setprecision(6)
        << count << " coefficients (d^L = " << std::pow(d, level) << "), over the budget of "
        << budget;
    throw ValidationError(msg.str());
  }
  const fs::path dir = out_dir(cfg);
  const TensorSeries sig = path_signature(path, level);

  json coeffs = json::object();
  std::ostringstream summary;
  summary << "level  count  max_abs  l2_norm\n" << std::setprecision(6);
  for (int k = 0; k <= level; ++k) {
    const auto lv = sig.level_coeffs(k);
    double mx = 0.0;
    double ss = 0.0;
    for (std::size_t i = 0; i < lv.size(); ++i) {
      coeffs["coeff" + word_from_index(i, static_cast<std::size_t>(k), path.dim()).to_string()] =
          lv[i];
      mx = std::max(mx, std::abs(lv[i]));
      ss += lv[i] * lv[i];
    }
    summary << k << "  " << lv.size() << "  " << mx << "  " << std::sqrt(ss) << "\n";
  }
  meta["dim"] = path.dim();
  meta["level"] = level;
  meta["knots"] = path.size();
  write_json(dir / "signature.json", {{"metadata", meta}, {"coefficients", coeffs}});
  write_text(dir / "signature_summary.txt", summary.str());
  out << summary.str();
  return kOk;
}

int cmd_recover(const json& cfg, std::ostream& out, std::ostream& err) {
  json meta = metadata("recover", cfg);
  const ReconstructionConfig rc =
      recovery_from(cfg, get<double>(cfg, "epsilon"), get<double>(cfg, "delta"));
  const PiecewiseLinearPath path = input_path(cfg, meta);
  if (!path.starts_at_origin()) {
    throw ValidationError("recover: the path must start at the origin");
  }
  meta["effective"] = to_json(rc);
  const fs::path dir = out_dir(cfg);
  try {
    const ReconstructionResult r = reconstruct(path, rc);
    json doc = {{"metadata", meta},
                {"geometric", to_json(r.geometric)},
                {"recovered", to_json(r.word)},
                {"extended_signature", ext_to_json(r.value)},
                {"agrees", r.agrees},
                {"sup_error", r.sup_error},
                {"evaluations", r.evaluations}};
    write_json(dir / "recover.json", doc);
    std::ostringstream csv;
    write_path_csv(csv, r.polygon);
    write_text(dir / "polygon.csv", csv.str());
    out << "moves " << r.word.moves() << "\nagrees " << (r.agrees ? "true" : "false")
        << "\nsup_error " << std::setprecision(9) << r.sup_error << "\n";
  } catch (const AmbiguousRecovery& e) {
    err << "AMBIGUOUS: " << e.what() << "\n";
    for (const auto& w : e.candidates()) {
      err << "  candidate " << w.to_string() << "\n";
    }
    return kComputation;
  }
  return kOk;
}

int cmd_converge(const json& cfg, std::ostream& out) {
  ConvergenceConfig cc;
  cc.model = model_from(cfg);
  cc.n_list = get<std::vector<int>>(cfg, "n_list");
  cc.delta_ratio = get<double>(cfg, "delta_ratio");
  cc.trials = get<std::size_t>(cfg, "trials");
  cc.threads = get<unsigned>(cfg, "threads");
  cc.recover = get<bool>(cfg, "recover");
  cc.recovery = recovery_from(cfg, 0.25, 0.025);
  try {
    cc.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const fs::path dir = out_dir(cfg);
  const ConvergenceResult r = convergence_study(cc);
  std::ostringstream csv;
  write_convergence_csv(csv, r);
  write_text(dir / "converge.csv", csv.str());
  json summary = convergence_summary(r);
  summary["metadata"] = metadata("converge", cfg);
  write_json(dir / "converge_summary.json", summary);
  out << "n  median  violation_fraction\n" << std::setprecision(6);
  for (const auto& lv : r.levels) {
    out << lv.n << "  " << lv.median << "  " << lv.violation_fraction << "\n";
  }
  return kOk;
}

int cmd_metric(const json& cfg, std::ostream& out) {
  if (cfg.at("input").is_null() || cfg.at("other").is_null()) {
    throw ValidationError("metric needs --input and --other");
  }
  auto load = [&](const char* key) {
    const auto file = get<std::string>(cfg, key);
    try {
      return load_path(file);
    } catch (const std::exception& e) {
      throw ValidationError(file + ": " + e.what());
    }
  };
  const PiecewiseLinearPath x = load("input");
  const PiecewiseLinearPath y = load("other");
  if (x.dim() != y.dim()) {
    throw ValidationError("dimension mismatch: " + std::to_string(x.dim()) + " vs " +
                          std::to_string(y.dim()));
  }
  const auto res = get<std::size_t>(cfg, "resolution");
  if (res < 2) {
    throw ValidationError("resolution must be >= 2");
  }
  const double d = frechet_variant(x, y, {res});
  out << std::setprecision(17) << "distance " << d << "\nresolution " << res << "\n";
  return kOk;
}

int cmd_sample(const json& cfg, std::ostream& out) {
  const GaussianModel m = model_from(cfg);
  const auto format = get<std::string>(cfg, "format");
  if (format != "csv" && format != "json") {
    throw ValidationError("format must be csv or json");
  }
  const fs::path dir = out_dir(cfg);
  const GaussianSampler sampler(m);
  const PiecewiseLinearPath path = sampler.sample(m.seed);
  json meta = metadata("sample", cfg);
  meta["model"] = to_json(m);
  meta["jitter"] = sampler.jitter();
  const fs::path file = dir / ("path." + format);
  save_path(file, path, meta);
  if (format == "csv") {
    write_json(dir / "path_metadata.json", meta);
  }
  out << "wrote " << file.string() << "\n";
  return kOk;
}

int dispatch(const std::string& command, const json& cfg, std::ostream& out, std::ostream& err) {
  if (command == "signature") {
    return cmd_signature(cfg, out);
  }
  if (command == "recover") {
    return cmd_recover(cfg, out, err);
  }
  if (command == "converge") {
    return cmd_converge(cfg, out);
  }
  if (command == "metric") {
    return cmd_metric(cfg, out);
  }
  return cmd_sample(cfg, out);
}

} // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"signature", "recover", "converge", "metric",
                                              "sample"};
  return names;
}

json default_config(const std::string& command) {
  json j = common_defaults();
  if (command == "signature") {
    j.update(model_defaults());
    j["input"] = nullptr;
    j["level"] = 3;
    j["max_coefficients"] = 5.0e7;
  } else if (command == "recover") {
    j.update(model_defaults());
    j.update(recovery_defaults());
    j["input"] = nullptr;
    j["epsilon"] = 0.25;
    j["delta"] = 0.025;
  } else if (command == "converge") {
    j.update(model_defaults());
    j.update(recovery_defaults());
    const ConvergenceConfig cc;
    j["n_list"] = cc.n_list;
    j["delta_ratio"] = cc.delta_ratio;
    j["trials"] = cc.trials;
    j["recover"] = cc.recover;
  } else if (command == "metric") {
    j["input"] = nullptr;
    j["other"] = nullptr;
    j["resolution"] = FrechetConfig{}.resolution;
  } else if (command == "sample") {
    j.update(model_defaults());
    j["format"] = "csv";
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  return j;
}

json merge_config(const std::string& command, const json& file, const json& overrides) {
  json cfg = default_config(command);
  for (const json* layer : {&file, &overrides}) {
    if (layer->is_null()) {
      continue;
    }
    if (!layer->is_object()) {
      throw ValidationError("config must be a JSON object");
    }
    for (const auto& [key, value] : layer->items()) {
      if (!cfg.contains(key)) {
        throw ValidationError("unknown config key '" + key + "' for " + command);
      }
      if (!same_kind(cfg[key], value)) {
        throw ValidationError("config key '" + key + "' expects " + cfg[key].type_name() +
                              ", got " + value.type_name());
      }
      cfg[key] = value;
    }
  }
  return cfg;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signatures, extended signatures and lattice-word recovery of paths"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  struct Sub {
    CLI::App* app;
    std::string config_file;
    std::map<std::string, std::string> flags;
  };
  std::map<std::string, Sub> subs;
  const std::map<std::string, std::string> help{
      {"signature", "truncated signature of a path as JSON plus a level summary"},
      {"recover", "recover the visited lattice word from extended signatures"},
      {"converge", "Monte Carlo study of the polygonal approximation error"},
      {"metric", "Frechet-type distance between two path files"},
      {"sample", "draw a Gaussian sample path"}};
  for (const auto& name : commands()) {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help.at(name));
    s.app->add_option("--config", s.config_file, "JSON config file");
    const json defaults = default_config(name);
    for (const auto& [key, def] : defaults.items()) {
      std::string desc = "default " + def.dump();
      s.app->add_option(flag_name(key), s.flags[key], desc);
    }
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    for (const auto& [name, s] : subs) {
      if (s.app->parsed()) {
        err << s.app->help();
      }
    }
    return kValidation;
  }

  try {
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) {
        continue;
      }
      const json defaults = default_config(name);
      json file = json::object();
      if (!s.config_file.empty()) {
        file = read_json_file(s.config_file);
      }
      json overrides = json::object();
      for (const auto& [key, text] : s.flags) {
        if (s.app->count(flag_name(key)) > 0) {
          overrides[key] = parse_flag(defaults[key], text);
        }
      }
      return dispatch(name, merge_config(name, file, overrides), out, err);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SearchBudgetExceeded& e) {
    err << "computation failed: " << e.what() << "\n";
    return kComputation;
  } catch (const CovarianceError& e) {
    err << "computation failed: " << e.what() << "\n";
    return kComputation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kUnexpected;
  }
  return kUnexpected;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) {
    args.emplace_back(argv[i]);
  }
  return run(args, out, err);
}

} // namespace sigrecover::cli
