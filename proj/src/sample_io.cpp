#include "christoffel/sample_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <vector>

#include "christoffel/errors.hpp"

namespace christoffel {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

SampleCloud read_samples_csv(std::istream& in) {
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header_checked = false;
  bool has_weight_column = false;
  std::size_t columns = 0;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line);

    if (!header_checked) {
      header_checked = true;
      double probe;
      const bool numeric_row = std::all_of(fields.begin(), fields.end(),
                                           [&](const std::string& f) {
                                             return parse_double(f, probe);
                                           });
      columns = fields.size();
      if (!numeric_row) {  // header row
        has_weight_column = !fields.empty() && lower(fields.back()) == "weight";
        continue;
      }
    }

    if (fields.size() != columns) {
      throw ConfigError("samples CSV line " + std::to_string(line_no) +
                        ": expected " + std::to_string(columns) + " fields, got " +
                        std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!parse_double(fields[i], row[i])) {
        throw ConfigError("samples CSV line " + std::to_string(line_no) + ", field " +
                          std::to_string(i + 1) + ": not a number: '" + fields[i] + "'");
      }
      if (!std::isfinite(row[i])) {
        throw ConfigError("samples CSV line " + std::to_string(line_no) + ", field " +
                          std::to_string(i + 1) + ": non-finite value rejected");
      }
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw ConfigError("samples CSV: no data rows");
  const std::size_t d = columns - (has_weight_column ? 1 : 0);
  if (d == 0) throw ConfigError("samples CSV: no coordinate columns");

  Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(d));
  std::vector<double> weights;
  if (has_weight_column) weights.reserve(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      points(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][i];
    }
    if (has_weight_column) weights.push_back(rows[j][d]);
  }
  try {
    return SampleCloud(std::move(points), std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("samples CSV: ") + e.what());
  }
}

SampleCloud read_samples_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open samples CSV: " + path);
  return read_samples_csv(in);
}

void write_samples_csv(const SampleCloud& cloud, std::ostream& out) {
  const int d = cloud.dim();
  for (int i = 0; i < d; ++i) out << "x" << (i + 1) << (i + 1 < d ? "," : "");
  if (!cloud.weights.empty()) out << ",weight";
  out << "\n";
  char buffer[40];
  for (Eigen::Index j = 0; j < cloud.count(); ++j) {
    for (int i = 0; i < d; ++i) {
      std::snprintf(buffer, sizeof buffer, "%.17g", cloud.points(j, i));
      out << buffer << (i + 1 < d ? "," : "");
    }
    if (!cloud.weights.empty()) {
      std::snprintf(buffer, sizeof buffer, "%.17g",
                    cloud.weights[static_cast<std::size_t>(j)]);
      out << "," << buffer;
    }
    out << "\n";
  }
}

void write_samples_csv_file(const SampleCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  write_samples_csv(cloud, out);
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

MomentProviderPtr provider_from_json(const json& cfg) {
  if (!cfg.is_object() || !cfg.contains("kind") || !cfg["kind"].is_string()) {
    throw ConfigError("measure config: expected an object with a \"kind\" string");
  }
  const std::string kind = cfg["kind"].get<std::string>();
  const json params = cfg.value("params", json::object());

  if (kind == "chebyshev-1d") {
    return std::make_shared<Chebyshev1dProvider>();
  }

  if (kind == "lebesgue-box") {
    if (!params.contains("bounds") || !params["bounds"].is_array() ||
        params["bounds"].empty()) {
      throw ConfigError("lebesgue-box: params.bounds must be a non-empty array of [a,b]");
    }
    const auto& bounds = params["bounds"];
    Eigen::VectorXd lo(static_cast<Eigen::Index>(bounds.size()));
    Eigen::VectorXd hi(static_cast<Eigen::Index>(bounds.size()));
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto& pair = bounds[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        throw ConfigError("lebesgue-box: bounds[" + std::to_string(i) +
                          "] must be a numeric pair [a,b]");
      }
      lo[static_cast<Eigen::Index>(i)] = pair[0].get<double>();
      hi[static_cast<Eigen::Index>(i)] = pair[1].get<double>();
    }
    try {
      AxisBox box(lo, hi);
      if (params.contains("mass")) {
        if (!params["mass"].is_number()) throw ConfigError("lebesgue-box: mass must be a number");
        return std::make_shared<LebesgueBoxProvider>(box, params["mass"].get<double>());
      }
      return std::make_shared<LebesgueBoxProvider>(box);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("lebesgue-box: ") + e.what());
    }
  }

  if (kind == "product") {
    if (!params.contains("factors") || !params["factors"].is_array() ||
        params["factors"].empty()) {
      throw ConfigError("product: params.factors must be a non-empty array of configs");
    }
    std::vector<MomentProviderPtr> factors;
    for (const auto& f : params["factors"]) factors.push_back(provider_from_json(f));
    return std::make_shared<ProductProvider>(std::move(factors));
  }

  if (kind == "empirical") {
    if (!params.contains("csv") || !params["csv"].is_string()) {
      throw ConfigError("empirical: params.csv must be a file path");
    }
    return std::make_shared<EmpiricalProvider>(
        read_samples_csv_file(params["csv"].get<std::string>()));
  }

  throw ConfigError("unknown measure kind: '" + kind + "'");
}

}  // namespace

MomentProviderPtr parse_measure_config(const std::string& json_text) {
  json cfg;
  try {
    cfg = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("measure config: invalid JSON: ") + e.what());
  }
  return provider_from_json(cfg);
}

MomentProviderPtr load_measure(const std::string& spec) {
  const std::string trimmed = trim(spec);
  if (!trimmed.empty() && trimmed.front() == '{') {
    return parse_measure_config(trimmed);
  }
  if (trimmed.size() > 5 && trimmed.substr(trimmed.size() - 5) == ".json") {
    std::ifstream in(trimmed);
    if (!in) throw ConfigError("cannot open measure config: " + trimmed);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_measure_config(ss.str());
  }
  return std::make_shared<EmpiricalProvider>(read_samples_csv_file(trimmed));
}

}  // namespace christoffel
