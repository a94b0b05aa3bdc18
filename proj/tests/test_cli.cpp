#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "doctest.h"

using namespace nrw::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// File body without the `# ` header lines.
std::string body(const fs::path& p) {
  std::istringstream is(slurp(p));
  std::string line, out;
  while (std::getline(is, line))
    if (line.rfind("# ", 0) != 0 && line != "#") out += line + "\n";
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nrw_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing") {
  Config c = Config::parse(
      "# solver\n[solver]\nh = 1/512   # grid\ncfl=0.4\n\n[data]\ndata = bump[0.5,1.5], gaussian\ndim = 3, 5\n", "run.cfg");
  CHECK(c.num("h") == doctest::Approx(1.0 / 512));
  CHECK(c.num("cfl") == doctest::Approx(0.4));
  CHECK(c.entry("cfl").section == "solver");
  CHECK(c.entry("dim").line == 8);
  CHECK(c.list("data", "") == std::vector<std::string>{"bump[0.5,1.5]", "gaussian"});
  CHECK(c.ints("dim") == std::vector<int>{3, 5});
  CHECK(c.num("eps", 1e-8) == 1e-8);
  CHECK(c.echo().rfind("# # solver\n# [solver]\n", 0) == 0);

  c.set("cfl", "0.3", "--cfl");
  CHECK(c.num("cfl") == doctest::Approx(0.3));
  CHECK(c.echo().find("# cfl = 0.3  (--cfl)") != std::string::npos);
}

TEST_CASE("config errors name the line and key") {
  auto message = [](const std::string& text, const std::string& key) {
    try {
      Config c = Config::parse(text, "bad.cfg");
      if (!key.empty()) c.num(key);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("dim = 3\ndim = 5\n", "").find("bad.cfg:2: duplicate key 'dim' (first set on line 1)") == 0);
  CHECK(message("[a\n", "").find("bad.cfg:1: unterminated") == 0);
  CHECK(message("just words\n", "").find("bad.cfg:1: expected") == 0);
  CHECK(message("\nh = fast\n", "h").find("bad.cfg:2: key 'h': expected a number") == 0);
  CHECK(message("x = 1\n", "dim").find("missing required key 'dim'") != std::string::npos);
}

TEST_CASE("presets") {
  Config c = Config::parse("amp = 2\n", "p.cfg");
  nrw::Dim d(5);
  CHECK(make_preset("gaussian", d, c).u0(0.0) == doctest::Approx(2.0));
  CHECK(make_preset("bump[1,3]", d, c).u0(2.0) == doctest::Approx(2.0));
  CHECK(make_preset("w_soliton", d, c).u0(0.0) == doctest::Approx(2.0));
  const nrw::AnalyticPair xi = nrw::build_basis(d).xi(2);
  CHECK(make_preset("xi_tail[2]", d, c).u0(2.0) == doctest::Approx(2.0 * xi.u0(2.0)));
  CHECK(make_preset("xi_tail[2]", d, c).u1(2.0) == doctest::Approx(2.0 * xi.u1(2.0)));
  CHECK(make_preset("zero", d, c).empty());
  CHECK(make_preset("mixture[4]", d, c).profiles().size() >= 2);
  CHECK(make_preset("mixture[4]", d, c).u1(1.0) == make_preset("mixture[4]", d, c).u1(1.0));

  Config bad = Config::parse("dim = 5\ndata = blob\n", "p.cfg");
  try {
    make_preset("blob", d, bad);
    FAIL("unknown preset accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("p.cfg:2: key 'data': unknown preset 'blob'") == 0);
  }
  CHECK_THROWS_AS(make_preset("xi_tail[3]", d, c), ConfigError);
  CHECK_THROWS_AS(make_preset("bump[2,1]", d, c), ConfigError);
  CHECK_THROWS_AS(make_preset("xi_tail[1]", nrw::Dim(4), c), ConfigError);
}

TEST_CASE("run_command maps outcomes to exit codes") {
  CommandResult ok = run_command("check-sequences", Config::parse("trials = 500\nseed = 7\n", "s.cfg"));
  CHECK(ok.status == kPass);
  CHECK(ok.rows.size() == 5);

  CommandResult missing = run_command("check-w", Config::parse("h = 1/64\n", "w.cfg"));
  CHECK(missing.status == kConfigError);
  CHECK(missing.message.find("'dim'") != std::string::npos);

  CommandResult stray = run_command("check-sequences", Config::parse("trials = 10\nwidth = 2\n", "s.cfg"));
  CHECK(stray.status == kConfigError);
  CHECK(stray.message.find("s.cfg:2: key 'width'") == 0);

  CHECK(run_command("no-such-command", Config::parse("", "x")).status == kConfigError);
  CHECK(run_command("check-rates", Config::parse("dim = 4\n", "r.cfg")).status == kConfigError);
  // A precondition of the numerics (here an even N for the odd-only exterior bound) is a config error too.
  CHECK(run_command("check-support", Config::parse("dim = 2\n", "r.cfg")).status == kConfigError);
}

TEST_CASE("outputs are deterministic apart from headers") {
  Config c = Config::parse("trials = 300\nseed = 3\n", "det.cfg");
  fs::path a = scratch("det_a"), b = scratch("det_b");
  CHECK(run_and_write("check-sequences", c, a.string()) == kPass);
  CHECK(run_and_write("check-sequences", c, b.string()) == kPass);
  CHECK(body(a / "check-sequences.csv") == body(b / "check-sequences.csv"));
  CHECK(body(a / "check-sequences.csv").rfind("check,instance,param,observed,expected,tolerance,pass\n", 0) == 0);
  const std::string head = slurp(a / "check-sequences.csv");
  CHECK(head.rfind("# nrw check-sequences\n# generated ", 0) == 0);
  CHECK(head.find("# trials = 300\n") != std::string::npos);
  CHECK(fs::exists(a / "check-sequences_summary.txt"));
}

TEST_CASE("sweeps") {
  SUBCASE("dyadic W tail fits for three dimensions") {
    fs::path out = scratch("sweep_w");
    Config c = Config::parse("base = w-tail-rates\nR0 = 32\nlevels = 6\nworkers = 2\n[sweep]\ndim = 3, 5, 7\n", "sw.cfg");
    CHECK(run_and_write("sweep", c, out.string()) == kPass);
    auto rows = lines(body(out / "sweep.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "case,dim,status,pass,check,instance,observed,expected,tolerance");
    for (int i = 1; i <= 3; ++i) CHECK(rows[i].find(",pass,1,w_tail_slope,") != std::string::npos);
    CHECK(fs::exists(out / "case_002" / "w-tail-rates.csv"));
  }
  SUBCASE("empty grid") {
    fs::path out = scratch("sweep_empty");
    Config c = Config::parse("base = check-sequences\n", "e.cfg");
    CHECK(run_and_write("sweep", c, out.string()) == kPass);
    CHECK(lines(body(out / "sweep.csv")).size() == 1);
  }
  SUBCASE("one failing case does not stop the others") {
    fs::path out = scratch("sweep_fail");
    Config c = Config::parse("base = check-sequences\ntrials = 200\n[sweep]\nseed = 1, 2, 3, 4, x, 6, 7, 8, 9, 10\n", "f.cfg");
    CHECK(run_and_write("sweep", c, out.string()) == kCheckFailed);
    auto rows = lines(body(out / "sweep.csv"));
    REQUIRE(rows.size() == 11);
    int pass = 0, fail = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) (rows[i].find(",pass,1,") != std::string::npos ? pass : fail)++;
    CHECK(pass == 9);
    CHECK(fail == 1);
    CHECK(rows[5].rfind("4,x,config-error,0,error,", 0) == 0);
  }
  SUBCASE("unknown base") {
    CHECK(run_and_write("sweep", Config::parse("base = nope\n", "b.cfg"), scratch("sweep_bad").string()) ==
          kConfigError);
  }
}
