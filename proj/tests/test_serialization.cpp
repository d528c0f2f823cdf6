#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <random>

#include "opdyn/commands.hpp"
#include "opdyn/serialization.hpp"

using namespace opdyn;

TEST_CASE("17-digit floats round-trip exactly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double v = d(rng) * std::pow(10.0, (i % 40) - 20);
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(s.find(',') == std::string::npos);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("CSV framing follows RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  auto dir = std::filesystem::temp_directory_path() / "opdyn_csv_test";
  std::string path = (dir / "t.csv").string();
  CsvWriter w(path, {"x", "label"});
  w.row_mixed({"1.5", "a,b"});
  w.row({2.0, 3.0});
  CHECK_THROWS(w.row({1.0}));
  w.save();
  CHECK(read_text(path) == "x,label\r\n1.5,\"a,b\"\r\n2,3\r\n");
  std::filesystem::remove_all(dir);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("strict objects reject unknown keys and wrong types") {
  json j = {{"a", 1.5}, {"b", "x"}, {"c", true}};
  {
    StrictObject o(j, "cfg");
    CHECK(o.number("a", 0) == 1.5);
    CHECK(o.string("b", "") == "x");
    CHECK_THROWS_AS(o.finish(), InvalidInput);
  }
  {
    StrictObject o(j, "cfg");
    CHECK_THROWS_AS(o.number("b", 0), InvalidInput);
    CHECK_THROWS_AS(o.integer("a", 0), InvalidInput);
    CHECK(o.boolean("c", false));
    CHECK(o.number("missing", 7.0) == 7.0);
  }
  CHECK_THROWS_AS(StrictObject(json::array(), "cfg"), InvalidInput);
  CHECK_THROWS_AS(parse_json_text("{\"a\": 1e999}", "cfg"), InvalidInput);
}

TEST_CASE("graph specs round-trip through JSON") {
  for (const char* text : {R"({"family":"complete","n":4})", R"({"family":"ring","n":5,"directed":true})",
                           R"({"family":"path","n":3})", R"({"weights":[[0,1],[2,0]]})",
                           R"({"n":2,"weights":[0,1,2,0]})", R"({"n1":2,"n2":2,"n3":1})"}) {
    CAPTURE(text);
    GraphSpec s = GraphSpec::from_json(json::parse(text));
    GraphSpec r = GraphSpec::from_json(s.to_json());
    CHECK(r.build().adjacency() == s.build().adjacency());
  }
  CHECK_THROWS_AS(GraphSpec::from_json(json::parse(R"({"family":"star","n":4})")), InvalidInput);
  CHECK_THROWS_AS(GraphSpec::from_json(json::parse(R"({"family":"complete","n":4,"extra":1})")), InvalidInput);
  CHECK_THROWS_AS(GraphSpec::from_json(json::parse(R"({"weights":[[0,1],[2]]})")), InvalidInput);
  CHECK_THROWS_AS(GraphSpec::from_json(json::parse(R"({"n":3,"weights":[0,1,2,0]})")), InvalidInput);
}

TEST_CASE("resolved configs materialize defaults and are stable") {
  json r = resolve_config("simulate", "", json::object());
  CHECK(r["u"] == 0.5);
  CHECK(r["command"] == "simulate");
  CHECK(r.contains("x0"));
  // Resolving a resolved config is the identity.
  CHECK(resolve_config("simulate", "", r) == r);
  json h = resolve_config("sweep", "hysteresis", json::object());
  CHECK(h["scenario"] == "hysteresis");
  CHECK(resolve_config("sweep", "", h) == h);
  json a = resolve_config("adaptive", "", json::object(), 5);
  CHECK(a["case"] == "symmetric");
  CHECK(a["seed"] == 5);
  CHECK(a["horizon"] == doctest::Approx(500.0 / 0.01));
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(resolve_config("simulate", "", json{{"u", -0.1}}), InvalidInput);
  CHECK_THROWS_AS(resolve_config("simulate", "", json{{"bogus", 1}}), InvalidInput);
  CHECK_THROWS_AS(resolve_config("simulate", "", json{{"command", "continue"}}), InvalidInput);
  CHECK_THROWS_AS(resolve_config("sweep", "nope", json::object()), InvalidInput);
  CHECK_THROWS_AS(resolve_config("sweep", "hysteresis", json{{"scenario", "reduction_demo"}}), InvalidInput);
  CHECK_THROWS_AS(resolve_config("adaptive", "case9", json::object()), InvalidInput);
  CHECK_THROWS_AS(resolve_config("frobnicate", "", json::object()), InvalidInput);
  CHECK_THROWS_AS(resolve_config("sweep", "uninformed_influence", json{{"n3_values", {2}}}), InvalidInput);
  CHECK_THROWS_AS(validate_config(json{{"u", 1}}), InvalidInput);
  CHECK_THROWS_AS(parse_json_text("{\"a\":", "cfg"), InvalidInput);
  CHECK_THROWS_AS(resolve_config("continue", "", json{{"graph", {{"weights", {{0, 1}, {0, 0}}}}}}),
                  InvalidInput);
}
