#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "invasion/output.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "invasion_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(INVASION_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kRoot);
  const fs::path p = kRoot / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string strip_directory(const std::string& text) {
  std::string out;
  size_t pos = 0;
  while (pos < text.size()) {
    const size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind("directory = ", 0) != 0) out += line + '\n';
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

const char* kSmall = "[domain]\nn_cells = 80\n[integrator]\nt_end = 1\n[output]\nsnapshot_stride = 1\n";

}  // namespace

TEST_CASE("exit codes") {
  fs::remove_all(kRoot);
  const std::string ok = write_config("ok.ini", kSmall);
  CHECK(run("simulate " + ok + " --out " + (kRoot / "ok").string()) == 0);
  CHECK(run("stability " + ok + " --out " + (kRoot / "stab").string()) == 0);

  const std::string bad = write_config("bad.ini", "[model]\nalpha = 3\n");
  CHECK(run("simulate " + bad + " --out " + (kRoot / "bad").string()) == 2);
  const std::string unknown = write_config("unknown.ini", "[model]\ngamma = 3\n");
  CHECK(run("simulate " + unknown + " --out " + (kRoot / "bad").string()) == 2);
  CHECK(run("simulate") == 2);
  CHECK(run("frobnicate x") == 2);

  const std::string blow = write_config("blow.ini", std::string(kSmall) + "blowup_threshold = 0.5\n");
  // The first file puts the key under [output], where it is unknown.
  const std::string blow2 = write_config(
      "blow2.ini", "[domain]\nn_cells = 80\n[integrator]\nt_end = 1\nblowup_threshold = 0.5\n");
  CHECK(run("simulate " + blow + " --out " + (kRoot / "blow").string()) == 2);
  CHECK(run("simulate " + blow2 + " --out " + (kRoot / "blow").string()) == 3);

  const std::string file = write_config("plain.txt", "x");
  CHECK(run("simulate " + ok + " --out " + (kRoot / "plain.txt" / "sub").string()) == 4);
  CHECK(run("simulate " + (kRoot / "missing.ini").string()) == 4);
}

TEST_CASE("run directory and byte-identical reruns") {
  const std::string ok = write_config("det.ini", kSmall);
  REQUIRE(run("simulate " + ok + " --out " + (kRoot / "a").string()) == 0);
  REQUIRE(run("simulate " + ok + " --out " + (kRoot / "b").string()) == 0);
  int snapshots = 0;
  for (const auto& e : fs::directory_iterator(kRoot / "a")) {
    const std::string name = e.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0) ++snapshots;
    if (name == "manifest.txt") continue;
    std::string a = invasion::read_text(e.path().string());
    std::string b = invasion::read_text((kRoot / "b" / name).string());
    if (name == "config.ini") {  // only the output directory may differ
      a = strip_directory(a);
      b = strip_directory(b);
    }
    CHECK(a == b);
  }
  CHECK(snapshots == 2);
  CHECK(fs::exists(kRoot / "a" / "manifest.txt"));
  CHECK(fs::exists(kRoot / "a" / "config.ini"));
  CHECK(fs::exists(kRoot / "a" / "heatmap_u.pgm"));
}

TEST_CASE("kinetic mode is reproducible at a fixed seed") {
  const std::string cfg = write_config(
      "kin.ini", "[domain]\na = 5\nn_cells = 50\n[kinetic]\nparticles = 20000\nepsilon = 0.3\nt_end = 0.5\n");
  REQUIRE(run("kinetic " + cfg + " --seed 7 --out " + (kRoot / "k1").string()) == 0);
  REQUIRE(run("kinetic " + cfg + " --seed 7 --threads 2 --out " + (kRoot / "k2").string()) == 0);
  REQUIRE(run("kinetic " + cfg + " --seed 8 --out " + (kRoot / "k3").string()) == 0);
  const std::string h1 = invasion::read_text((kRoot / "k1" / "kinetic_histogram.csv").string());
  CHECK(h1 == invasion::read_text((kRoot / "k2" / "kinetic_histogram.csv").string()));
  CHECK(h1 != invasion::read_text((kRoot / "k3" / "kinetic_histogram.csv").string()));
}
