#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "oscue/potential.hpp"

#include "json.hpp"

namespace oscue {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal representation.
std::string format_double(double v);

// CSV with a '#'-prefixed JSON config line, then a header row, then data rows.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const nlohmann::json& config,
            const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t n_cols_;
};

nlohmann::json load_config(const std::string& path);

// Required/optional typed accessors with ConfigError on mismatch.
int require_int(const nlohmann::json& j, const std::string& key);
double require_double(const nlohmann::json& j, const std::string& key);
std::string require_string(const nlohmann::json& j, const std::string& key);
int get_int(const nlohmann::json& j, const std::string& key, int fallback);
double get_double(const nlohmann::json& j, const std::string& key, double fallback);
std::string get_string(const nlohmann::json& j, const std::string& key,
                       const std::string& fallback);

PotentialSpec potential_from_config(const nlohmann::json& config);

}  // namespace oscue
