#include "oscue/io.hpp"

#include <cstdio>
#include <fstream>

namespace oscue {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const nlohmann::json& config,
                     const std::vector<std::string>& columns)
    : out_(out), n_cols_(columns.size()) {
  out_ << "# " << config.dump() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out_ << ",";
    out_ << columns[i];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != n_cols_)
    throw ConfigError("csv row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ",";
    out_ << format_double(values[i]);
  }
  out_ << "\n";
}

nlohmann::json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse failure in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

namespace {

const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing config key: " + key);
  return *it;
}

}  // namespace

int require_int(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_key(j, key);
  if (!v.is_number_integer()) throw ConfigError("config key must be an integer: " + key);
  return v.get<int>();
}

double require_double(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_key(j, key);
  if (!v.is_number()) throw ConfigError("config key must be a number: " + key);
  return v.get<double>();
}

std::string require_string(const nlohmann::json& j, const std::string& key) {
  const auto& v = require_key(j, key);
  if (!v.is_string()) throw ConfigError("config key must be a string: " + key);
  return v.get<std::string>();
}

int get_int(const nlohmann::json& j, const std::string& key, int fallback) {
  return j.contains(key) ? require_int(j, key) : fallback;
}

double get_double(const nlohmann::json& j, const std::string& key, double fallback) {
  return j.contains(key) ? require_double(j, key) : fallback;
}

std::string get_string(const nlohmann::json& j, const std::string& key,
                       const std::string& fallback) {
  return j.contains(key) ? require_string(j, key) : fallback;
}

PotentialSpec potential_from_config(const nlohmann::json& config) {
  const auto& v = require_key(config, "potential");
  if (!v.is_object()) throw ConfigError("potential must be a JSON object");
  try {
    return PotentialSpec::from_json(v);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad potential spec: ") + e.what());
  } catch (const NumericError& e) {
    throw ConfigError(std::string("bad potential spec: ") + e.what());
  }
}

}  // namespace oscue
