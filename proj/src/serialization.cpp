#include "opdyn/serialization.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace opdyn {

StrictObject::StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
  if (!j_.is_object()) throw InvalidInput(where_ + ": expected a JSON object");
}

const json& StrictObject::raw(const std::string& key) {
  seen_.insert(key);
  if (!j_.contains(key)) throw InvalidInput(where_ + ": missing required key '" + key + "'");
  return j_.at(key);
}

double StrictObject::number(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number()) throw InvalidInput(where_ + "." + key + ": expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidInput(where_ + "." + key + ": must be finite");
  return d;
}

double StrictObject::number(const std::string& key, double def) {
  seen_.insert(key);
  return j_.contains(key) ? number(key) : def;
}

int StrictObject::integer(const std::string& key) {
  const json& v = raw(key);
  if (!v.is_number_integer()) throw InvalidInput(where_ + "." + key + ": expected an integer");
  return v.get<int>();
}

int StrictObject::integer(const std::string& key, int def) {
  seen_.insert(key);
  return j_.contains(key) ? integer(key) : def;
}

std::uint64_t StrictObject::uint64(const std::string& key, std::uint64_t def) {
  seen_.insert(key);
  if (!j_.contains(key)) return def;
  const json& v = j_.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw InvalidInput(where_ + "." + key + ": expected a nonnegative integer");
}

bool StrictObject::boolean(const std::string& key, bool def) {
  seen_.insert(key);
  if (!j_.contains(key)) return def;
  if (!j_.at(key).is_boolean()) throw InvalidInput(where_ + "." + key + ": expected true or false");
  return j_.at(key).get<bool>();
}

std::string StrictObject::string(const std::string& key, const std::string& def) {
  seen_.insert(key);
  if (!j_.contains(key)) return def;
  if (!j_.at(key).is_string()) throw InvalidInput(where_ + "." + key + ": expected a string");
  return j_.at(key).get<std::string>();
}

std::vector<double> StrictObject::numbers(const std::string& key, const std::vector<double>& def) {
  seen_.insert(key);
  if (!j_.contains(key)) return def;
  const json& v = j_.at(key);
  if (!v.is_array()) throw InvalidInput(where_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw InvalidInput(where_ + "." + key + ": expected an array of numbers");
    out.push_back(e.get<double>());
    if (!std::isfinite(out.back())) throw InvalidInput(where_ + "." + key + ": entries must be finite");
  }
  return out;
}

void StrictObject::finish() const {
  std::string unknown;
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!seen_.count(it.key())) unknown += (unknown.empty() ? "" : ", ") + it.key();
  if (!unknown.empty()) throw InvalidInput(where_ + ": unknown key(s): " + unknown);
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array of numbers");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput(where + ": expected an array of numbers");
    v(i) = j[i].get<double>();
    if (!std::isfinite(v(i))) throw InvalidInput(where + ": entries must be finite");
  }
  return v;
}

namespace {

Mat weights_from_json(const json& w, int n, const std::string& where) {
  if (!w.is_array()) throw InvalidInput(where + ".weights: expected an array");
  Mat m(n, n);
  if (!w.empty() && w[0].is_array()) {
    if (static_cast<int>(w.size()) != n) throw InvalidInput(where + ".weights: expected " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
      Vec r = vec_from_json(w[i], where + ".weights");
      if (r.size() != n) throw InvalidInput(where + ".weights: adjacency matrix must be square");
      m.row(i) = r.transpose();
    }
  } else {
    Vec flat = vec_from_json(w, where + ".weights");
    if (flat.size() != static_cast<Index>(n) * n)
      throw InvalidInput(where + ".weights: expected " + std::to_string(n * n) + " entries (row-major)");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = flat(i * n + j);
  }
  return m;
}

}  // namespace

json population_to_json(const PopulationSpec& spec) {
  json c = json::array();
  for (auto& row : spec.coupling) c.push_back(json::array({row[0], row[1], row[2]}));
  return {{"n1", spec.n1}, {"n2", spec.n2}, {"n3", spec.n3}, {"coupling", c}};
}

PopulationSpec population_from_json(const json& j, const std::string& where) {
  StrictObject o(j, where);
  PopulationSpec s;
  s.n1 = o.integer("n1");
  s.n2 = o.integer("n2");
  s.n3 = o.integer("n3");
  if (o.has("coupling")) {
    const json& c = o.raw("coupling");
    if (!c.is_array() || c.size() != 3) throw InvalidInput(where + ".coupling: expected a 3x3 array");
    for (int k = 0; k < 3; ++k) {
      Vec r = vec_from_json(c[k], where + ".coupling");
      if (r.size() != 3) throw InvalidInput(where + ".coupling: expected a 3x3 array");
      for (int m = 0; m < 3; ++m) s.coupling[k][m] = r(m);
    }
  }
  o.finish();
  s.validate();
  return s;
}

Graph GraphSpec::build() const {
  switch (kind) {
    case Kind::Family:
      if (family == "complete") return complete_graph(n);
      if (family == "ring") {
        if (directed) return directed_ring(n);
        Mat a = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) a(i, (i + 1) % n) = a((i + 1) % n, i) = 1.0;
        return build_graph(a);
      }
      if (family == "path") return path_graph(n);
      throw InvalidInput("unknown graph family '" + family + "' (valid: complete, ring, path)");
    case Kind::Weights:
      return build_graph(weights);
    case Kind::Population:
      return three_population_graph(population);
  }
  throw InvalidInput("bad graph spec");
}

json GraphSpec::to_json() const {
  switch (kind) {
    case Kind::Family: {
      json j = {{"family", family}, {"n", n}};
      if (family == "ring") j["directed"] = directed;
      return j;
    }
    case Kind::Weights: {
      json rows = json::array();
      for (Index i = 0; i < weights.rows(); ++i) rows.push_back(vec_to_json(weights.row(i).transpose()));
      return {{"n", weights.rows()}, {"weights", rows}};
    }
    case Kind::Population:
      return population_to_json(population);
  }
  return {};
}

GraphSpec GraphSpec::from_json(const json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected a JSON object");
  GraphSpec g;
  if (j.contains("n1") || j.contains("n2") || j.contains("n3")) {
    g.kind = Kind::Population;
    g.population = population_from_json(j, where);
    return g;
  }
  StrictObject o(j, where);
  if (o.has("weights")) {
    g.kind = Kind::Weights;
    const json& w = o.raw("weights");
    // Nested rows carry their own size; a flat list needs n.
    if (w.is_array() && !w.empty() && w[0].is_array())
      g.n = o.integer("n", static_cast<int>(w.size()));
    else
      g.n = o.integer("n");
    require(g.n >= 1, where + ".n must be positive");
    g.weights = weights_from_json(o.raw("weights"), g.n, where);
    o.finish();
    build_graph(g.weights);
    return g;
  }
  g.kind = Kind::Family;
  g.family = o.string("family", "complete");
  g.n = o.integer("n");
  require(g.n >= 1, where + ".n must be positive");
  if (g.family == "ring") g.directed = o.boolean("directed", true);
  o.finish();
  g.build();
  return g;
}

GraphSpec GraphSpec::complete(int n) {
  GraphSpec g;
  g.n = n;
  return g;
}

GraphSpec GraphSpec::of_population(const PopulationSpec& spec) {
  GraphSpec g;
  g.kind = Kind::Population;
  g.population = spec;
  return g;
}

json graph_to_json(const Graph& g) {
  GraphSpec s;
  s.kind = GraphSpec::Kind::Weights;
  s.weights = g.adjacency();
  return s.to_json();
}

Graph graph_from_json(const json& j) { return GraphSpec::from_json(j).build(); }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

CsvWriter::CsvWriter(std::string path, const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
  row_mixed(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row_mixed(cells);
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += csv_field(cells[i]);
  }
  buffer_ += "\r\n";
}

void CsvWriter::save() const { write_text(path_, buffer_); }

void write_text(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot write '" + path + "'");
  f << content;
  if (!f) throw IoFailure("failed writing '" + path + "'");
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace opdyn
