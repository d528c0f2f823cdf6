#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "opdyn/netgraph.hpp"
#include "opdyn/solver.hpp"

namespace opdyn {

using json = nlohmann::json;

// Reads keys from a JSON object and rejects any key that was never asked for.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where);

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key);

  double number(const std::string& key, double def);
  double number(const std::string& key);
  int integer(const std::string& key, int def);
  int integer(const std::string& key);
  std::uint64_t uint64(const std::string& key, std::uint64_t def);
  bool boolean(const std::string& key, bool def);
  std::string string(const std::string& key, const std::string& def);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  void finish() const;

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

// How a graph is specified in configs: a named family, explicit weights, or a population spec.
struct GraphSpec {
  enum class Kind { Family, Weights, Population };
  Kind kind = Kind::Family;
  std::string family = "complete";  // complete | ring | path
  int n = 10;
  bool directed = false;            // ring only
  Mat weights;
  PopulationSpec population;

  Graph build() const;
  json to_json() const;
  static GraphSpec from_json(const json& j, const std::string& where = "graph");
  static GraphSpec complete(int n);
  static GraphSpec of_population(const PopulationSpec& spec);
};

json population_to_json(const PopulationSpec& spec);
PopulationSpec population_from_json(const json& j, const std::string& where = "population");
json graph_to_json(const Graph& g);
Graph graph_from_json(const json& j);

json vec_to_json(const Vec& v);
Vec vec_from_json(const json& j, const std::string& where);

// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_double(double v);
std::string csv_field(const std::string& s);

class CsvWriter {
 public:
  CsvWriter(std::string path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  void save() const;

 private:
  std::string path_;
  std::string buffer_;
  std::size_t columns_;
};

void write_text(const std::string& path, const std::string& content);
void write_json(const std::string& path, const json& j);
std::string read_text(const std::string& path);

std::uint64_t fnv1a64(const std::string& s);
std::string hex64(std::uint64_t v);

}  // namespace opdyn
