#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "rcw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Outcome r;
  r.code = rcw::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rcw_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("decide rc examples") {
  const Outcome seven = run({"decide", "rc", "--arity", "4", "--m", "7", "--mode", "complete"});
  CHECK(seven.code == 0);
  CHECK(seven.out.find("holds_at_bound") != std::string::npos);

  const fs::path cert = scratch("w.json");
  const Outcome six = run({"decide", "rc", "--arity", "4", "--m", "6", "--cert", cert.string()});
  CHECK(six.code == 0);
  CHECK(six.out.find("fails") != std::string::npos);
  const Outcome ok = run({"verify", cert.string()});
  CHECK(ok.code == 0);
  CHECK(ok.out.rfind("accepted", 0) == 0);
}

TEST_CASE("verify rejects a tampered certificate with exit 2") {
  const fs::path cert = scratch("m6.json");
  REQUIRE(run({"decide", "rc", "--arity", "4", "--m", "6", "--cert", cert.string()}).code == 0);
  std::string text = slurp(cert);
  const auto pos = text.find("\"domain_size\": 6");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 16, "\"domain_size\": 5");
  const fs::path bad = scratch("tampered.json");
  std::ofstream(bad, std::ios::binary) << text;
  const Outcome r = run({"verify", bad.string()});
  CHECK(r.code == 2);
  CHECK(r.out.find("rejected") != std::string::npos);
}

TEST_CASE("usage and internal errors exit 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"decide", "rc", "--arity", "4"}).code == 1);
  CHECK(run({"decide", "rc", "--arity", "4", "--m", "9"}).code == 1);  // above the complete bound
  CHECK(run({"verify", scratch("does-not-exist.json").string()}).code == 1);
  CHECK(run({"zoo", "eval", "--principle", "c_n", "--n", "2"}).code == 1);
  CHECK(run({"zoo", "eval", "--model", "vfin", "--params", "x", "--principle", "c_n", "--n", "2"}).code == 1);
  CHECK(run({"matrix", "rc", "--arity", "4", "--m-range", "7..3"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("output does not depend on --jobs") {
  const fs::path d1 = scratch("jobs1");
  const fs::path d8 = scratch("jobs8");
  const Outcome a = run({"--jobs", "1", "matrix", "rc", "--arity", "4", "--m-range", "3..8", "--cert-dir", d1.string()});
  const Outcome b = run({"matrix", "rc", "--arity", "4", "--m-range", "3..8", "--cert-dir", d8.string(), "--jobs", "8"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d1)) {
    ++files;
    CHECK(slurp(e.path()) == slurp(d8 / e.path().filename()));
    CHECK(run({"verify", e.path().string()}).code == 0);
  }
  CHECK(files == 4);
}

TEST_CASE("decide nrc with a certificate") {
  const fs::path cert = scratch("nrc.json");
  const Outcome r = run({"decide", "nrc", "--arity", "2", "--k", "3", "--bound", "12", "--mode", "cyclic", "--cert",
                     cert.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("fails") != std::string::npos);
  CHECK(run({"verify", cert.string()}).code == 0);
}

TEST_CASE("reduce is reproducible from the seed") {
  const fs::path fam = scratch("family.json");
  std::ofstream(fam) << R"({"members": [[0,1,2,3,4],[5,6,7,8,9],[10,11,12,13,14,15],[16,17,18,19,20],
    [21,22,23,24,25,26],[27,28,29,30,31],[32,33,34,35,36],[37,38,39,40,41,42]]})";
  const Outcome a = run({"reduce", "--n", "4", "--family", fam.string(), "--oracle-seed", "11"});
  const Outcome b = run({"reduce", "--n", "4", "--family", fam.string(), "--oracle-seed", "11"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find(" valid") != std::string::npos);
  CHECK(run({"reduce", "--n", "5", "--family", fam.string()}).code == 1);
}

TEST_CASE("fraisse build and check") {
  const fs::path dump = scratch("stage.txt");
  const Outcome b = run({"fraisse", "build", "--arity", "2", "--stages", "3", "--out", dump.string()});
  CHECK(b.code == 0);
  CHECK(b.out.find("sizes 1 4 49") != std::string::npos);
  const Outcome c = run({"fraisse", "check", dump.string()});
  CHECK(c.code == 0);
  CHECK(c.out.find(": ok") != std::string::npos);

  std::string text = slurp(dump);
  const auto sel = text.find("\nsel ");
  REQUIRE(sel != std::string::npos);
  const auto eol = text.find('\n', sel + 1);
  text.erase(sel, eol - sel);
  const fs::path broken = scratch("broken.txt");
  std::ofstream(broken, std::ios::binary) << text;
  CHECK(run({"fraisse", "check", broken.string()}).code == 1);

  CHECK(run({"fraisse", "build", "--arity", "2", "--stages", "4", "--atom-cap", "100", "--out", dump.string()}).code == 1);
}

TEST_CASE("zoo eval") {
  const fs::path cert = scratch("zoo.json");
  const Outcome f = run({"zoo", "eval", "--model", "vfin", "--params", "6", "--principle", "nrc_fin", "--n", "3", "--cert",
                     cert.string()});
  CHECK(f.code == 0);
  CHECK(f.out.find("fails") != std::string::npos);
  CHECK(run({"verify", cert.string()}).code == 0);

  const Outcome h = run({"zoo", "eval", "--model", "vlines", "--params", "4", "--principle", "nrc_fin", "--n", "8"});
  CHECK(h.out.find("holds_at_bound") != std::string::npos);
  const Outcome two = run({"zoo", "eval", "--model", "vlines", "--params", "4,3x2", "--principle", "c_n", "--n", "1"});
  CHECK(two.code == 0);
  CHECK(two.out.find("8 blocks") == std::string::npos);
  CHECK(two.out.find("4 blocks") != std::string::npos);
}
