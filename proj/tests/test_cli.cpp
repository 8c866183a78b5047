#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrlab/cli.hpp"
#include "qrlab/error.hpp"
#include "qrlab/io.hpp"
#include "schema_validator.hpp"

using namespace qrlab;
using nlohmann::json;

namespace {

const std::filesystem::path kSource = QRLAB_SOURCE_DIR;

std::string data(const std::string& name) { return (kSource / "data" / name).string(); }

struct Run {
  int code = -1;
  std::string out;
  std::string err;

  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

test::SchemaValidator validator() { return test::SchemaValidator(kSource / "schemas"); }

void check_report(const Run& r) {
  const auto errors = validator().validate("report.schema.json", r.report());
  for (const auto& e : errors) MESSAGE(e);
  CHECK(errors.empty());
}

json without_clock(json j) {
  j.erase("wall_clock_seconds");
  return j;
}

}  // namespace

TEST_CASE("range over the maximally mixed ball") {
  const auto r = run({"range", "--op", data("sz.json"), "--condition", data("ball.json"), "--samples", "1000", "--seed",
                      "42"});
  REQUIRE(r.code == 0);
  check_report(r);
  const auto j = r.report();
  CHECK(j["result"]["lo"].get<double>() == doctest::Approx(-0.2).epsilon(1e-9));
  CHECK(j["result"]["hi"].get<double>() == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(j["rigor"] == "closed_form");
  CHECK(j["tool"]["version"] == cli::kToolVersion);
  CHECK(j["parameters"]["seed"] == "42");
  CHECK(j["inputs"]["op"]["dim"] == 2);
}

TEST_CASE("same seed gives the same report") {
  const std::vector<std::string> args{"range", "--qr", data("product_expr.json"), "--seed", "5"};
  CHECK(without_clock(run(args).report()) == without_clock(run(args).report()));
  const std::vector<std::string> bell{"bell", "--uL", "0", "0", "1", "--uR", "1", "0", "0",
                                      "--eps", "0.01", "--pairs", "50", "--seed", "3"};
  CHECK(without_clock(run(bell).report()).dump() == without_clock(run(bell).report()).dump());
}

TEST_CASE("bell example") {
  const auto r = run({"bell", "--uL", "0", "0", "1", "--uR", "0", "0", "1", "--eps", "0.01", "--pairs", "1000", "--seed",
                      "7"});
  REQUIRE(r.code == 0);
  check_report(r);
  const auto j = r.report();
  CHECK(j["result"]["pass"] == true);
  CHECK(j["result"]["mean"].get<double>() == doctest::Approx(-1.0).epsilon(0.011));
}

TEST_CASE("logic example") {
  const auto r = run({"logic", "--poset", data("chain3.json"), "--check", "lem"});
  REQUIRE(r.code == 0);
  check_report(r);
  const auto j = r.report();
  CHECK(j["result"]["lem_holds"] == false);
  CHECK(j["result"]["witness"] == "U={b1}");
  const auto laws = run({"logic", "--poset", data("chain3.json")}).report();
  CHECK(laws["result"]["failures"]["adjunction"] == 0);
}

TEST_CASE("every command produces a schema-valid report") {
  const std::vector<std::vector<std::string>> commands{
      {"eval", "--op", "sz", "--condition", data("ball.json"), "--state", R"({"bloch": [0, 0, 0.1]})"},
      {"collimate", "--op", data("sz.json"), "--condition", data("near_up.json"), "--interval", "0.8", "1.2", "--eps",
       "0.1", "--strict", "--seed", "1"},
      {"locate", "--op", "sz", "--interval", "0.9", "1.1", "--poset", data("nested_balls.json"), "--seed", "1"},
      {"heisenberg", "--op", "sx", "--op-b", "sy", "--condition", data("near_up.json"), "--interval", "-1.5", "1.5",
       "--interval-b", "-1.5", "1.5", "--eps", "0.4", "--seed", "1"},
      {"dynamics", "--potential", "harmonic", "--dim", "30", "--t-end", "1", "--samples", "3", "--seed", "1"},
      {"chsh", "--eps", "0.01", "--pairs", "100", "--seed", "1"},
      {"dichotomic", "--projection", data("plus_projection.json"), "--state", R"({"basis": 0, "dim": 2})", "--eps",
       "0.01", "--runs", "1000", "--seed", "1"},
      {"lueders", "--op", "sz", "--interval", "0.8", "1.2", "--op-b", "sx", "--state", data("lueders_rho0.json"),
       "--delta", "0.02", "--u-condition", data("lueders_u.json"), "--eps", "0.05", "--seed", "1"},
      {"slit", "--points", "60", "--eps", "0.05", "--samples", "4", "--seed", "1"},
  };
  for (const auto& args : commands) {
    CAPTURE(args[0]);
    const auto r = run(args);
    CHECK(r.code == 0);
    check_report(r);
  }
}

TEST_CASE("validation errors exit with 2 and name the field") {
  auto r = run({"range", "--op", "sz", "--condition", R"({"balls": [{"center": {"basis": 0, "dim": 2}, "radius": -1}]})",
                "--seed", "1"});
  CHECK(r.code == 2);
  check_report(r);
  CHECK(r.report()["status"] == "validation_error");
  CHECK(r.err.find("radius") != std::string::npos);

  r = run({"eval", "--op", R"({"dim": 2, "re": [[1, 2], [0, 1]]})", "--condition", data("ball.json"), "--state",
           R"({"maximally_mixed": 2})"});
  CHECK(r.code == 2);

  r = run({"eval", "--op", "sz", "--condition", data("ball.json"), "--state", R"({"dim": 2, "re": [[1.5, 0], [0, -0.5]]})"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--state") != std::string::npos);
}

TEST_CASE("malformed files report a position") {
  const auto path = std::filesystem::temp_directory_path() / "qrlab_bad.json";
  {
    std::ofstream f(path);
    f << "{\n  \"balls\": [\n    {\"center\": , }\n  ]\n}\n";
  }
  const auto r = run({"range", "--op", "sz", "--condition", path.string(), "--seed", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("line") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("parse errors and unknown commands exit with 2") {
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"range", "--op", "sz", "--condition", "{}"}).code == 2);  // --seed missing
  CHECK(run({"range", "--op", "sz", "--condition", data("ball.json"), "--seed", "1", "--samples", "0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"--version"}).code == 0);
}

TEST_CASE("evaluation outside the extent exits with 2") {
  const auto r = run({"eval", "--op", "sz", "--condition", data("near_up.json"), "--state", R"({"basis": 1, "dim": 2})"});
  CHECK(r.code == 2);
}

TEST_CASE("empty Lueders cover is a validation error") {
  const auto r = run({"lueders", "--op", "sz", "--interval", "0.8", "1.2", "--op-b", "sx", "--state",
                      R"({"dim": 2, "re": [[0.95, 0], [0, 0.05]]})", "--delta", "0.01", "--u-condition",
                      data("lueders_u.json"), "--eps", "0.05", "--seed", "1"});
  CHECK(r.code == 2);
}

TEST_CASE("numeric failures exit with 4") {
  const auto r = run({"range", "--qr",
                      R"({"op": "apply", "fn": "sqrt+", "arg": {"op": "linear", "operator": "sz", "condition": {"balls": [{"center": {"basis": 1, "dim": 2}, "radius": 0.1}]}}})",
                      "--seed", "1"});
  CHECK(r.code == 4);
  check_report(r);
}

TEST_CASE("CSV output") {
  const auto r = run({"dynamics", "--dim", "20", "--t-end", "0.05", "--samples", "2", "--seed", "1", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  CHECK(header == "sample_id,t,q_hamilton,p_hamilton,q_heisenberg,p_heisenberg");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 2 * 6);
  CHECK(run({"logic", "--poset", data("chain3.json"), "--format", "csv"}).code == 2);
}

TEST_CASE("output file") {
  const auto path = std::filesystem::temp_directory_path() / "qrlab_report.json";
  const auto r = run({"logic", "--poset", data("chain3.json"), "--check", "dne", "--output", path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  const auto j = json::parse(f);
  CHECK(j["result"]["dne_holds"] == false);
  std::filesystem::remove(path);
}

TEST_CASE("shipped inputs match their schemas") {
  const auto v = validator();
  auto load = [](const std::string& name) { return io::load_json_file(data(name)); };
  CHECK(v.validate("matrix.schema.json", load("sz.json")).empty());
  CHECK(v.validate("matrix.schema.json", load("sy.json")).empty());
  CHECK(v.validate("matrix.schema.json", load("plus_projection.json")).empty());
  CHECK(v.validate("state.schema.json", load("lueders_rho0.json")).empty());
  CHECK(v.validate("condition.schema.json", load("ball.json")).empty());
  CHECK(v.validate("condition.schema.json", load("near_up.json")).empty());
  CHECK(v.validate("poset.schema.json", load("chain3.json")).empty());
  CHECK(v.validate("poset.schema.json", load("nested_balls.json")).empty());
  CHECK(v.validate("qr.schema.json", load("product_expr.json")).empty());
  CHECK_FALSE(v.validate("condition.schema.json", json::parse(R"({"balls": [{"center": "x", "radius": 0}]})")).empty());
  CHECK_FALSE(v.validate("qr.schema.json", json::parse(R"({"op": "div", "args": []})")).empty());
}

TEST_CASE("io round trips") {
  const auto rho = io::state_from_json(json::parse(R"({"bloch": [0.1, 0.2, 0.3]})"), "s");
  const auto back = io::state_from_json(io::to_json(rho), "s");
  CHECK((rho.matrix() - back.matrix()).norm() < 1e-15);
  const auto op = io::operator_from_json("sy", "op");
  CHECK((io::operator_from_json(io::to_json(op.matrix()), "op").matrix() - op.matrix()).norm() == 0.0);
  CHECK(io::builtin_operator("id3").dim() == 3);
  CHECK(io::builtin_operator("ladder_q:10").dim() == 10);
  CHECK_THROWS_AS(io::builtin_operator("sw"), ValidationError);
}
