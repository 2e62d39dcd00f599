#include <catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wshift/cli.hpp"

using namespace wshift;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "wshift_cli_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen prints n, w_n and log2 w_n") {
  const auto r = run({"gen", "--family", "diamond", "--horizon", "6"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "n,w_n,log2_wn\n1,2,1\n2,0.25,-2\n3,2,1\n4,2,1\n5,2,1\n6,0.25,-2\n");
  const auto b = run({"gen", "--family", "block", "--horizon", "5"});
  CHECK(b.out == "n,w_n,log2_wn\n1,2,1\n2,1,0\n3,0.5,-1\n4,2,1\n5,2,1\n");
  const auto l = run({"gen", "--family", "literal", "--values", "3,1/2", "--tail", "ones", "--horizon", "3"});
  CHECK(l.code == kExitOk);
  CHECK(l.out.find("3,1,0\n") != std::string::npos);
}

TEST_CASE("classify reports one verdict per check") {
  const auto r = run({"classify", "--family", "diamond", "--horizon", "10000", "--imax", "1000", "--engine", "table"});
  REQUIRE(r.code != kExitConfig);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["command"] == "classify");
  CHECK(j["verdicts"]["hypercyclic"] == "EvidenceFor");
  CHECK(j["verdicts"]["mixing"] == "EvidenceAgainst");
  CHECK(j["verdicts"]["ultra"] == "EvidenceAgainst");
  CHECK(j["reports"].size() == 5);

  const auto one = run({"classify", "--family", "literal", "--values", "1", "--tail", "periodic", "--horizon", "2000",
                        "--imax", "10", "--checks", "hypercyclic"});
  CHECK(one.code == kExitOk);
  CHECK(nlohmann::json::parse(one.out)["verdicts"]["hypercyclic"] == "EvidenceAgainst");
}

TEST_CASE("gen then literal re-ingest reproduces classify output") {
  for (const char* family : {"diamond", "block"}) {
    const auto csv = temp_path(std::string(family) + ".csv");
    REQUIRE(run({"gen", "--family", family, "--horizon", "10000", "--out", csv.string()}).code == kExitOk);
    const std::vector<std::string> common = {"--horizon", "10000", "--imax", "1000", "--engine", "table",
                                             "--nk",      family,  "--profile", "inv-sqrt4"};
    std::vector<std::string> a = {"classify", "--family", family};
    std::vector<std::string> b = {"classify", "--family", "literal", "--values-file", csv.string()};
    a.insert(a.end(), common.begin(), common.end());
    b.insert(b.end(), common.begin(), common.end());
    auto ja = nlohmann::json::parse(run(a).out);
    auto jb = nlohmann::json::parse(run(b).out);
    ja.erase("sequence");
    jb.erase("sequence");
    CHECK(ja.dump() == jb.dump());
  }
}

TEST_CASE("verify suites pass on the diamond and block weights and fail on a corrupted one") {
  const auto d = run({"verify", "--family", "diamond"});
  CHECK(d.code == kExitOk);
  CHECK(d.out.find("PASS diamond_identities") != std::string::npos);
  const auto b = run({"verify", "--family", "block", "--kmax", "8"});
  CHECK(b.code == kExitOk);
  CHECK(b.out.find("PASS block_facts") != std::string::npos);
  const auto bad = run({"verify", "--family", "literal", "--values", "2,1,1/2", "--suite", "diamond"});
  CHECK(bad.code == kExitFailed);
  CHECK(bad.err.find("FAIL diamond_identities") != std::string::npos);
  const auto js = run({"verify", "--family", "diamond", "--suite", "product", "--json"});
  CHECK(nlohmann::json::parse(js.out).is_object());
}

TEST_CASE("orbit and scan CSV") {
  const auto o = run({"orbit", "--family", "block", "--nk", "block", "--kmax", "4", "--horizon", "1000"});
  CHECK(o.out == "n,norm\n5,0.25\n20,0.125\n87,0.0625\n444,0.03125\n");
  const auto s = run({"scan", "--family", "diamond", "--horizon", "8", "--imax", "2"});
  CHECK(s.code == kExitOk);
  CHECK(s.out.rfind("n,log2_M1n,min_log2_Min_window,argmin\n1,1,-2,2\n", 0) == 0);

  const auto vec = temp_path("vec.json");
  write_file(vec, R"({"space":"l1","entries":[[0,1.0],[1,1.0]]})");
  const auto ov = run({"orbit", "--family", "diamond", "--nk", "list:1,2", "--space", "l1", "--vector", vec.string(),
                       "--horizon", "100"});
  CHECK(ov.code == kExitOk);
  CHECK(ov.out == "n,norm\n1,4.5\n2,4\n");
}

TEST_CASE("config files fill the sequence section") {
  const auto ini = temp_path("run.ini");
  write_file(ini, "horizon = 5\n[sequence]\nfamily = literal\nvalues = 2,1/4\ntail = periodic\n");
  const auto r = run({"gen", "--config", ini.string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "n,w_n,log2_wn\n1,2,1\n2,0.25,-2\n3,2,1\n4,0.25,-2\n5,2,1\n");

  write_file(ini, "[weights]\nfamily = block\n");
  CHECK(run({"gen", "--config", ini.string()}).code == kExitConfig);
  write_file(ini, "family = block\n");
  CHECK(run({"gen", "--config", ini.string()}).code == kExitConfig);
  write_file(ini, "[sequence]\nfamilly = block\n");
  CHECK(run({"gen", "--config", ini.string()}).code == kExitConfig);
}

TEST_CASE("witness bundles replay through verify") {
  const auto w = temp_path("uh.json");
  const auto r = run({"witness", "--family", "diamond", "--kind", "uh", "--nk", "diamond", "--horizon", "20000",
                      "--imax", "4000", "-L", "4", "--out", w.string()});
  REQUIRE(r.code == kExitOk);
  const auto v = run({"verify", "--bundle", w.string()});
  CHECK(v.code == kExitOk);
  CHECK(v.out.find("PASS witness_uh_blocker") != std::string::npos);

  auto j = nlohmann::json::parse(read_text(w));
  j["x"]["entries"][0][1] = 0.2;
  write_file(w, j.dump());
  CHECK(run({"verify", "--bundle", w.string()}).code == kExitFailed);

  const auto sh = run({"witness", "--kind", "sh", "--family", "diamond", "--space", "l2", "-N", "20", "--imax", "16",
                       "--horizon", "5000"});
  CHECK(sh.code == kExitFailed);
  CHECK(sh.err.find("PreconditionUnmet") != std::string::npos);
  const auto blk = run({"witness", "--kind", "uh", "--family", "block", "--horizon", "1000", "--imax", "100", "-L", "2"});
  CHECK(blk.code == kExitFailed);
}

TEST_CASE("exit codes") {
  CHECK(run({"gen", "--family", "nope"}).code == kExitConfig);
  CHECK(run({"gen", "--bogus"}).code == kExitConfig);
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"classify", "--family", "diamond", "--horizon", "5", "--imax", "10"}).code == kExitHorizon);
  CHECK(run({"gen", "--family", "literal", "--values", "0"}).code == kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("the installed binary agrees with the in-process entry point") {
  const std::string cmd = std::string(WSHIFT_CLI_PATH) + " gen --family diamond --horizon 3";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string text;
  char buf[256];
  while (std::fgets(buf, sizeof buf, p) != nullptr) text += buf;
  const int status = pclose(p);
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(text == run({"gen", "--family", "diamond", "--horizon", "3"}).out);
  const int bad = std::system((std::string(WSHIFT_CLI_PATH) + " gen --family nope 2>/dev/null").c_str());
  CHECK(WEXITSTATUS(bad) == kExitConfig);
}
