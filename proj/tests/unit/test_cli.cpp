#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using xpowx::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh scratch directory and cache root per test case.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("xpowx-cli-test-" + std::to_string(std::rand()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    setenv("XPOWX_CACHE_DIR", (dir / "cache").c_str(), 1);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("fixed-points") {
  Scratch s;
  auto r = call({"fixed-points", "--p", "7"});
  CHECK(r.code == 0);
  CHECK(r.out == "F(7)=2\n");

  r = call({"fixed-points", "--p", "8"});
  CHECK(r.code == 3);
  CHECK(r.err.find("8 is not prime") != std::string::npos);

  r = call({"fixed-points", "--range", "2..10", "--out", s.path("rows.csv")});
  CHECK(r.code == 0);
  CHECK(slurp(s.path("rows.csv")) == "p,F,omega_pm1\n2,1,0\n3,1,1\n5,1,1\n7,2,2\n");
  CHECK(fs::exists(s.path("rows.csv.manifest.json")));

  CHECK(call({"fixed-points"}).code == 2);
  CHECK(call({"fixed-points", "--p", "7", "--range", "2..3"}).code == 2);
  CHECK(call({"fixed-points", "--range", "9"}).code == 2);
}

TEST_CASE("scan cache reuse gives identical output") {
  Scratch s;
  REQUIRE(call({"fixed-points", "--range", "1000..3000", "--out", s.path("a.csv")}).code == 0);
  CHECK(fs::exists(s.dir / "cache" / "cache.jsonl"));
  REQUIRE(call({"fixed-points", "--range", "500..4000", "--out", s.path("b.csv")}).code == 0);
  REQUIRE(call({"fixed-points", "--range", "500..4000", "--no-cache", "--out", s.path("c.csv")}).code == 0);
  CHECK(slurp(s.path("b.csv")) == slurp(s.path("c.csv")));
}

TEST_CASE("cq") {
  Scratch s;
  auto r = call({"cq", "--q", "7", "--mode", "exact", "--out", s.path("cq.csv")});
  CHECK(r.code == 0);
  CHECK(r.out == "N=156 c=156/343≈0.45481\n");
  CHECK(slurp(s.path("cq.csv")) ==
        "q,x0,mode,value,samples,stderr,seed,exact\n7,1,exact,0.45481049562682213,0,0,,156/343\n");

  r = call({"cq", "--q", "23", "--mode", "exact"});
  CHECK(r.code == 4);
  CHECK(r.err.find("23^8 = 78310985281") != std::string::npos);

  CHECK(call({"cq", "--q", "21"}).code == 3);
  CHECK(call({"cq", "--q", "7", "--mode", "fast"}).code == 2);

  r = call({"cq", "--q", "101", "--mode", "mc", "--samples", "2000", "--seed", "4", "--out", s.path("mc1.csv")});
  CHECK(r.code == 0);
  r = call({"cq", "--q", "101", "--mode", "mc", "--samples", "2000", "--seed", "4", "--no-cache", "--threads",
            "2", "--out", s.path("mc2.csv")});
  CHECK(r.code == 0);
  CHECK(slurp(s.path("mc1.csv")) == slurp(s.path("mc2.csv")));
}

TEST_CASE("multind, nset, bonferroni") {
  Scratch s;
  auto r = call({"multind", "--tuple", "2,3,6"});
  CHECK(r.code == 0);
  CHECK(r.out == "rank=2 relation=(1,1,-1)\n");
  CHECK(call({"multind", "--tuple", "2,3,5"}).out == "rank=3 independent\n");
  CHECK(call({"multind", "--tuple", "2,2"}).code == 3);
  CHECK(call({"multind", "--tuple", "2,x"}).code == 2);

  r = call({"multind", "--sample-set", "nset", "--q", "1000", "--k", "3", "--trials", "500", "--seed", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("/500") != std::string::npos);

  r = call({"nset", "--q", "100000", "--dump", s.path("n.bin")});
  CHECK(r.code == 0);
  CHECK(r.out.find("within bound") != std::string::npos);
  CHECK(fs::file_size(s.path("n.bin")) == 12500);
  CHECK(call({"nset", "--q", "100", "--c2", "2"}).code == 3);

  r = call({"bonferroni", "--q", "5", "--family", "2,3,4", "--K", "1"});
  CHECK(r.code == 0);
  CHECK(r.out == "K=1 lower=10 upper=12 exact=12 enumerated=12 sandwich=ok\n");
}

TEST_CASE("stats and replay") {
  Scratch s;
  REQUIRE(call({"fixed-points", "--range", "20000..40000", "--out", s.path("rows.csv")}).code == 0);
  auto r = call({"stats", "--scan", s.path("rows.csv"), "--qq", s.path("qq.csv"), "--hist", s.path("h.csv"),
                 "--summary", s.path("sum.csv")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("group=omega>=3") == 0);
  CHECK(r.out.find("r2=") != std::string::npos);
  CHECK(fs::exists(s.path("qq.omega3.csv")));
  CHECK(fs::exists(s.path("h.omega_ge5.csv")));
  CHECK(slurp(s.path("sum.csv")).rfind("p_lo,p_hi,group,n,mean_z,sd_z,r2,outlier_prone\n", 0) == 0);

  r = call({"replay", "--manifest", s.path("qq.csv.manifest.json"), "--check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("differs") == std::string::npos);
  CHECK(r.out.find("identical") != std::string::npos);

  // Tamper with an output: the check must notice.
  std::ofstream(s.path("sum.csv"), std::ios::app) << "junk\n";
  r = call({"replay", "--manifest", s.path("qq.csv.manifest.json"), "--check"});
  CHECK(r.code == 1);
  CHECK(r.out.find("differs " + s.path("sum.csv")) != std::string::npos);

  // A plain replay rewrites the outputs.
  CHECK(call({"replay", "--manifest", s.path("qq.csv.manifest.json")}).code == 0);
  CHECK(call({"replay", "--manifest", s.path("qq.csv.manifest.json"), "--check"}).code == 0);

  CHECK(call({"stats", "--scan", s.path("missing.csv")}).code == 1);
}

TEST_CASE("usage") {
  CHECK(call({}).code == 2);
  CHECK(call({"bogus"}).code == 2);
  auto r = call({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("fixed-points") != std::string::npos);
}
