#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "finsler/cli.hpp"
#include "finsler/scene.hpp"

using namespace finsler;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scene(const std::string& name) { return std::string(FINSLER_SCENE_DIR) + "/" + name + ".json"; }

std::string temp_file(const std::string& name, const std::string& content) {
  const auto p = fs::temp_directory_path() / ("finsler_cli_test_" + name);
  std::ofstream(p) << content;
  return p.string();
}

std::string field(const std::string& line, const std::string& key) {
  std::istringstream is(line);
  std::string tok;
  while (is >> tok)
    if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
  return "";
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("connect on the disk scene") {
  const auto csv = (fs::temp_directory_path() / "finsler_cli_test_disk.csv").string();
  const auto r = run({"connect", "--scene", scene("disk"), "--out", csv});
  CHECK(r.code == kExitOk);
  const auto line = first_line(r.out);
  CHECK(line.rfind("classification=interior_geodesic length=", 0) == 0);
  CHECK(std::stod(field(line, "length")) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(count_lines(r.out) == 8);

  std::ifstream f(csv, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text.rfind("s,x1,x2,F_speed,phi\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(count_lines(text) == 130);
  // node 64 sits on the chord midpoint
  std::istringstream rows(text);
  std::string row;
  for (int i = 0; i <= 65; ++i) std::getline(rows, row);
  CHECK(row.rfind("0.5,", 0) == 0);
}

TEST_CASE("convexity on the annulus inner boundary") {
  const auto r = run({"convexity", "infinitesimal", "--scene", scene("annulus")});
  CHECK(r.code == kExitOk);
  CHECK(field(r.out, "verdict") == "nonconvex");
  CHECK(!field(r.out, "witness").empty());
  CHECK(field(r.out, "witness") != "none");
  const auto t = run({"convexity", "tangency", "--scene", scene("annulus")});
  CHECK(field(t.out, "outcome") == "enters_D");
  const auto l = run({"convexity", "local", "--scene", scene("disk")});
  CHECK(field(l.out, "verdict") == "convex");
}

TEST_CASE("other subcommands") {
  const auto a = run({"metric-audit", "--scene", scene("randers_half_plane"), "--samples", "200"});
  CHECK(a.code == kExitOk);
  CHECK(field(a.out, "passed") == "true");
  const auto g = run({"geodesic", "--scene", scene("hyperbolic")});
  CHECK(g.code == kExitOk);
  CHECK(field(g.out, "endpoint").rfind("0,2.71828182", 0) == 0);
  const auto e = run({"expmap", "--scene", scene("disk")});
  CHECK(field(e.out, "point") == "1,1");
  const auto d = run({"distance", "--scene", scene("randers_half_plane"), "--radius", "1"});
  CHECK(d.code == kExitOk);
  CHECK(std::stod(field(d.out, "forward")) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(std::stod(field(d.out, "backward")) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(field(d.out, "forward_ball") == "non_member");
  CHECK(field(d.out, "backward_ball") == "member");
  const auto m = run({"multiplicity", "--scene", scene("cylinder")});
  CHECK(m.code == kExitOk);
  CHECK(m.out.find("found=3 requested=3") != std::string::npos);
  const auto o = run({"grnew-oracle", "--samples", "100"});
  CHECK(o.code == kExitOk);
  CHECK(o.out.find("counterexamples=0") != std::string::npos);
}

TEST_CASE("echo-config records every default and override") {
  const auto r = run({"connect", "--scene", scene("disk"), "--echo-config", "--N", "32", "--seed", "5"});
  const auto line = first_line(r.out);
  REQUIRE(line.rfind("config=", 0) == 0);
  const auto back = parse_scene(line.substr(7));
  CHECK(back.solver.N == 32);
  CHECK(back.solver.seed == 5);
  CHECK(back.solver.eps_count == 7);
  CHECK(back.solver.tol_grad == 1e-9);
  CHECK(back.phi->source() == "1 - x1^2 - x2^2");
  CHECK(back.resolved_json() == line.substr(7));
}

TEST_CASE("exit codes") {
  const auto missing = run({"connect", "--scene", "/nonexistent/scene.json"});
  CHECK(missing.code == kExitConfig);
  CHECK(count_lines(missing.err) == 1);
  CHECK(missing.out.empty());

  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"connect"}).code == kExitConfig);
  CHECK(run({"convexity", "sideways", "--scene", scene("disk")}).code == kExitConfig);
  CHECK(run({"connect", "--scene", scene("disk"), "--N", "1"}).code == kExitConfig);
  CHECK(run({"connect", "--scene", scene("disk"), "--N", "many"}).code == kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);

  const auto unknown = temp_file("unknown.json", R"({"chart": {"dim": 2}, "colour": "red"})");
  const auto u = run({"connect", "--scene", unknown});
  CHECK(u.code == kExitConfig);
  CHECK(u.err.find("colour") != std::string::npos);

  const auto bad_phi = temp_file("bad_phi.json", R"({"domain": {"phi": "1 - x1^^2"}, "points": {"p": [0, 0], "q": [0.1, 0]}})");
  const auto b = run({"connect", "--scene", bad_phi});
  CHECK(b.code == kExitConfig);
  CHECK(b.err.find("8") != std::string::npos);

  const auto randers = temp_file("randers.json", R"({"metric": {"kind": "randers", "b": [1.1, 0]}})");
  CHECK(run({"metric-audit", "--scene", randers}).code == kExitConfig);

  const auto outside = temp_file("outside.json", R"({"domain": {"phi": "1 - x1^2 - x2^2"}, "points": {"p": [2, 0], "q": [0, 0]}})");
  const auto o = run({"connect", "--scene", outside});
  CHECK(o.code == kExitSolver);
  CHECK(count_lines(o.err) == 1);

  const auto no_x = temp_file("no_x.json", R"({"domain": {"phi": "x2"}})");
  CHECK(run({"convexity", "local", "--scene", no_x}).code == kExitConfig);
}

TEST_CASE("property: identical runs give identical records") {
  const std::vector<std::vector<std::string>> cmds{
      {"connect", "--scene", scene("annulus"), "--N", "64"},
      {"convexity", "local", "--scene", scene("horoball"), "--seed", "3"},
      {"metric-audit", "--scene", scene("hyperbolic"), "--seed", "9"},
      {"grnew-oracle", "--seed", "4", "--samples", "50"},
  };
  for (const auto& c : cmds) {
    const auto a = run(c), b = run(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
  CHECK(run({"metric-audit", "--scene", scene("hyperbolic"), "--seed", "9"}).out !=
        run({"metric-audit", "--scene", scene("hyperbolic"), "--seed", "10"}).out);
}

TEST_CASE("property: every scene file survives the echo round trip") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(FINSLER_SCENE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto s = load_scene(entry.path().string());
    const auto echoed = s.resolved_json();
    CHECK_MESSAGE(parse_scene(echoed).resolved_json() == echoed, entry.path().string());
    ++seen;
  }
  CHECK(seen >= 8);
}
