#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "json.hpp"

#include "dx/classifier.hpp"
#include "fixtures.hpp"

namespace {

const std::string kCli = DX_CLI_PATH;
const std::string kDemo = std::string(DX_TEST_DATA) + "/demo";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const dxt::TempDir& dir, const std::string& args) {
  const auto out = dir.file("stdout.txt"), err = dir.file("stderr.txt");
  const int status = std::system((kCli + " " + args + " >" + out + " 2>" + err).c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, dxt::read_file(out), dxt::read_file(err)};
}

std::string q(const std::string& s) { return "'" + s + "'"; }

// Builds the demo index: tags -> memberships -> index.
std::string demo_index(const dxt::TempDir& dir) {
  auto m = run(dir, "map-labels --items " + q(kDemo + "/items.tsv") + " --mapfile " + q(kDemo + "/mapfile.tsv") +
                        " --out " + q(dir.file("memberships.tsv")));
  REQUIRE(m.code == 0);
  auto b = run(dir, "build-index --edges " + q(kDemo + "/edges.tsv") + " --memberships " +
                        q(dir.file("memberships.tsv")) + " --out " + q(dir.file("demo.idx")));
  REQUIRE(b.code == 0);
  return dir.file("demo.idx");
}

}  // namespace

TEST_CASE("build-index prints counts and is byte-stable") {
  dxt::TempDir dir;
  dir.write("e.tsv", "A\tB\nB\tC\nC\tA\nD\tB\nD\tB\n");
  dir.write("m.tsv", "x\tA\ny\tD\n");
  auto r = run(dir, "build-index --edges " + dir.file("e.tsv") + " --memberships " + dir.file("m.tsv") +
                        " --out " + dir.file("a.idx"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("concepts\t4\n") != std::string::npos);
  CHECK(r.out.find("individuals\t2\n") != std::string::npos);
  CHECK(r.out.find("edges_loaded\t5\n") != std::string::npos);
  CHECK(r.out.find("duplicate_edges\t1\n") != std::string::npos);
  CHECK(r.out.find("removed_cycle_edges\t1\n") != std::string::npos);
  CHECK(r.out.find("# dxplain 0.1.0 build-index") == 0);
  run(dir, "build-index --edges " + dir.file("e.tsv") + " --memberships " + dir.file("m.tsv") + " --out " +
               dir.file("b.idx"));
  CHECK(dxt::read_file(dir.file("a.idx")) == dxt::read_file(dir.file("b.idx")));
}

TEST_CASE("parse errors exit 1 with file and line") {
  dxt::TempDir dir;
  dir.write("e.tsv", "A\tB\nbroken\n");
  dir.write("m.tsv", "x\tA\n");
  auto r = run(dir, "build-index --edges " + dir.file("e.tsv") + " --memberships " + dir.file("m.tsv") +
                        " --out " + dir.file("a.idx"));
  CHECK(r.code == 1);
  CHECK(r.err.find("e.tsv:2:") != std::string::npos);
  CHECK(run(dir, "explain").code == 1);
  CHECK(run(dir, "no-such-command").code == 1);
}

TEST_CASE("explain on the demo corpus") {
  dxt::TempDir dir;
  const auto idx = demo_index(dir);
  auto c = run(dir, "classify --items " + q(kDemo + "/items.tsv") + " --target kitchen --out-dir " + dir.file("cls"));
  REQUIRE(c.code == 0);
  dir.write("pos.txt", "img_k000\nimg_k001\nimg_k002\nimg_k003\nimg_k004\nimg_k005\nimg_k006\nimg_k007\n");
  dir.write("neg.txt", "img_o000\nimg_o001\nimg_o002\nimg_o003\nimg_o004\nimg_o005\nimg_o006\nimg_o007\n");
  const auto base = "explain --index " + idx + " --positives " + dir.file("pos.txt") + " --negatives " +
                    dir.file("neg.txt");

  SUBCASE("happy path") {
    auto r = run(dir, base + " --out-json " + dir.file("r.json"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("metric=f1") != std::string::npos);
    auto j = nlohmann::json::parse(dxt::read_file(dir.file("r.json")));
    REQUIRE(j["explanations"].size() == 1);
    CHECK(j["explanations"][0]["kind"] == "ecii");
    CHECK(j["explanations"][0]["concepts"].size() == 7);
    CHECK(j["explanations"][0]["filtered"] == false);
  }
  SUBCASE("baseline seed") {
    auto r = run(dir, base + " --baseline-seed 5 --out-text " + dir.file("r.txt"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("\nsemi_random\tf1\t5\t") != std::string::npos);
    CHECK(dxt::read_file(dir.file("r.txt")) == r.out);
  }
  SUBCASE("concreteness filter") {
    auto r = run(dir, base + " --concreteness " + q(kDemo + "/concreteness.csv") + " --out-json " + dir.file("r.json"));
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(dxt::read_file(dir.file("r.json")));
    CHECK(j["explanations"][0]["filtered"] == true);
    for (const auto& label : j["explanations"][0]["concepts"]) {
      CHECK(label.get<std::string>() != "Technology");
      CHECK(label.get<std::string>() != "Business");
    }
  }
  SUBCASE("alphabetized and other metrics") {
    auto r = run(dir, base + " --alphabetize --metric hybrid --max-disjuncts 1 --out-json " + dir.file("r.json"));
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(dxt::read_file(dir.file("r.json")));
    auto labels = j["explanations"][0]["concepts"].get<std::vector<std::string>>();
    CHECK(std::is_sorted(labels.begin(), labels.end()));
    CHECK(j["explanations"][0]["metric"] == "hybrid");
  }
  SUBCASE("config file") {
    dir.write("run.ini", "metric=precision\nmax_conjuncts=1\n");
    auto r = run(dir, "--config " + dir.file("run.ini") + " " + base);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("metric=precision") != std::string::npos);
    CHECK(r.out.find("max_conjuncts=1") != std::string::npos);
  }
  SUBCASE("unknown individuals are rejected") {
    dir.write("bad.txt", "img_k000\nnobody\n");
    auto r = run(dir, "explain --index " + idx + " --positives " + dir.file("bad.txt") + " --negatives " +
                          dir.file("neg.txt"));
    CHECK(r.code == 1);
    CHECK(r.err.find("nobody") != std::string::npos);
  }
  SUBCASE("classifier comparisons feed explain") {
    for (auto stem : {"fp_vs_tn", "tp_vs_fn", "tp_vs_fp", "fn_vs_tn"}) {
      CHECK(std::filesystem::exists(dir.file(std::string("cls/") + stem + ".positives.txt")));
      CHECK(std::filesystem::exists(dir.file(std::string("cls/") + stem + ".negatives.txt")));
    }
    auto r = run(dir, "explain --index " + idx + " --positives " + dir.file("cls/tp_vs_fp.positives.txt") +
                          " --negatives " + dir.file("cls/tp_vs_fp.negatives.txt"));
    CHECK((r.code == 0 || r.code == 2));
  }
}

TEST_CASE("no explanation exits 2") {
  dxt::TempDir dir;
  dir.write("e.tsv", "A\tB\n");
  dir.write("m.tsv", "x\tA\ny\tB\n");
  dir.write("lenient.tsv", "x\tA\ny\tB\nz\tLonely\n");
  run(dir, "build-index --edges " + dir.file("e.tsv") + " --memberships " + dir.file("lenient.tsv") +
               " --lenient --out " + dir.file("a.idx"));
  dir.write("p.txt", "z\n");
  dir.write("n.txt", "x\n");
  dir.write("t.csv", "word,rating\nb,1.0\nlonely,1.0\n");
  auto r = run(dir, "explain --index " + dir.file("a.idx") + " --positives " + dir.file("p.txt") + " --negatives " +
                        dir.file("n.txt") + " --concreteness " + dir.file("t.csv"));
  CHECK(r.code == 2);
  CHECK(r.err.find("no explanation") != std::string::npos);
}

TEST_CASE("classify writes reports deterministically") {
  dxt::TempDir dir;
  auto a = run(dir, "classify --items " + q(kDemo + "/items.tsv") + " --target kitchen --seed 3 --out-dir " + dir.file("a"));
  auto b = run(dir, "classify --items " + q(kDemo + "/items.tsv") + " --target kitchen --seed 3 --out-dir " + dir.file("b"));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const auto& entry : std::filesystem::directory_iterator(dir.file("a"))) {
    const auto name = entry.path().filename().string();
    CHECK(dxt::read_file(entry.path().string()) == dxt::read_file(dir.file("b/" + name)));
  }
  const auto csv = dxt::read_file(dir.file("a/predictions.csv"));
  CHECK(csv.find("item_id,truth,pred,prob,group\n") != std::string::npos);
  CHECK(csv.find("# seed: 3") != std::string::npos);
  std::size_t few = 0;
  for (const auto& item : dx::load_items(kDemo + "/items.tsv")) {
    few += std::set<std::string>(item.tags.begin(), item.tags.end()).size() < 6;
  }
  CHECK(a.out.find("dropped_few_tags\t" + std::to_string(few) + "\n") != std::string::npos);
}

TEST_CASE("perfect classifier warns about empty groups") {
  dxt::TempDir dir;
  std::string items;
  for (int i = 0; i < 20; ++i) {
    items += "k" + std::to_string(i) + "\tkitchen\toven;sink;stove;pot;pan;kettle\n";
    items += "o" + std::to_string(i) + "\toffice\tdesk;printer;monitor;keyboard;lamp;phone\n";
  }
  dir.write("items.tsv", items);
  auto r = run(dir, "classify --items " + dir.file("items.tsv") + " --target kitchen --out-dir " + dir.file("o"));
  REQUIRE(r.code == 0);
  CHECK(r.err.find("fp_vs_tn: empty group FP") != std::string::npos);
  CHECK(r.err.find("tp_vs_fn: empty group FN") != std::string::npos);
  CHECK(dxt::read_file(dir.file("o/fp_vs_tn.positives.txt")).empty());
}

TEST_CASE("bt reports") {
  dxt::TempDir dir;
  const auto tally = std::string(DX_TEST_DATA) + "/study_tally.csv";
  auto plain = run(dir, "bt --tally " + q(tally) + " --reference R");
  CHECK(plain.code == 3);
  CHECK(plain.err.find("'13'") != std::string::npos);
  CHECK(plain.err.find("--penalty") != std::string::npos);

  auto pen = run(dir, "bt --tally " + q(tally) + " --reference R --penalty 0.01 --out " + dir.file("bt.csv"));
  CHECK(pen.code == 0);
  std::size_t rows = 0;
  for (auto line : dxt::read_file(dir.file("bt.csv"))) rows += line == '\n';
  CHECK(rows == 3 + 1 + 45);  // header block, column names, sets

  dir.write("sym.csv", "item_a,item_b,wins_a,wins_b\nx,y,20,20\n");
  auto sym = run(dir, "bt --tally " + dir.file("sym.csv") + " --reference y");
  CHECK(sym.code == 0);
  CHECK(sym.out.find("x=0.0000;y=0.0000") != std::string::npos);
}

TEST_CASE("sdt report") {
  dxt::TempDir dir;
  auto r = run(dir, "sdt --counts " + q(kDemo + "/sdt_counts.csv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("perfect,50,0,0,50,") != std::string::npos);
  auto none = run(dir, "sdt --correction none --counts " + q(kDemo + "/sdt_counts.csv"));
  CHECK(none.code == 3);
  CHECK(none.err.find("perfect") != std::string::npos);
}

TEST_CASE("map-labels offline") {
  dxt::TempDir dir;
  dir.write("labels.txt", "Oven\nspaceship\n");
  auto r = run(dir, "map-labels --labels " + dir.file("labels.txt") + " --mapfile " + q(kDemo + "/mapfile.tsv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("Oven\thttp://example.org/Category:Kitchen_appliances\tfile") != std::string::npos);
  CHECK(r.err.find("unmapped\tspaceship") != std::string::npos);
}

TEST_CASE("version flag") {
  dxt::TempDir dir;
  auto r = run(dir, "--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("0.1.0") != std::string::npos);
}
