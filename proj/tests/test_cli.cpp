#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = NEGMEM_CLI_PATH;

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("negmem_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("verify: pass, config rejection, and assumption failure exit codes") {
    Sandbox box;
    CHECK(run("verify --model fgn --hurst 0.25 --out " + box.path("ok")) == 0);
    CHECK(fs::exists(box.dir / "ok" / "assumption.json"));
    CHECK(fs::exists(box.dir / "ok" / "manifest.cfg"));

    // H >= 1/2 is a config error, not an assumption failure.
    CHECK(run("verify --model fgn --hurst 0.7 --out " + box.path("bad")) == 1);

    std::ofstream(box.dir / "iid.txt") << "1.0\n0.0\n0.0\n";
    CHECK(run("verify --model explicit --cov-file " + box.path("iid.txt") +
              " --compact --lag-lo 1 --lag-hi 500 --out " + box.path("iid")) == 2);
    const auto report = slurp(box.dir / "iid" / "assumption.json");
    CHECK(report.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("verify: unknown flags and commands are config errors") {
    Sandbox box;
    CHECK(run("verify --no-such-flag") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("--help") == 0);
    CHECK(run("verify --help") == 0);
}

TEST_CASE("certify emits a certificate plus plot data") {
    Sandbox box;
    CHECK(run("certify --model fgn --hurst 0.25 --horizon 1200 --out " +
              box.path("cert")) == 0);
    CHECK(fs::exists(box.dir / "cert" / "certificate.json"));
    CHECK(fs::exists(box.dir / "cert" / "var_ratio.csv"));
    CHECK(fs::exists(box.dir / "cert" / "rho_grid.csv"));
    const auto cert = slurp(box.dir / "cert" / "certificate.json");
    CHECK(cert.find("\"epsilon\"") != std::string::npos);

    std::ofstream(box.dir / "iid.txt") << "1.0\n";
    CHECK(run("certify --model explicit --cov-file " + box.path("iid.txt") +
              " --compact --horizon 1200 --out " + box.path("certbad")) == 2);
}

TEST_CASE("sample writes a loadable batch and respects fallback rules") {
    Sandbox box;
    CHECK(run("sample --model fgn --hurst 0.25 -T 16 -n 3 --seed 4 --out " +
              box.path("smp")) == 0);
    CHECK(fs::exists(box.dir / "smp" / "paths.bin"));
    CHECK(fs::exists(box.dir / "smp" / "paths.csv"));
    CHECK(fs::exists(box.dir / "smp" / "spectrum.json"));

    std::ofstream(box.dir / "hard.txt") << "1.0\n-0.6\n";
    const std::string base = "sample --model explicit --cov-file " + box.path("hard.txt") +
                             " --compact -T 2 -n 10 --seed 1 --out " + box.path("h");
    CHECK(run(base) == 2);                       // embedding fails, no fallback
    CHECK(run(base + " --allow-fallback") == 0);  // Durbin-Levinson takes over
}

TEST_CASE("settle consumes column files and writes the ledger") {
    Sandbox box;
    std::ofstream(box.dir / "prices.txt") << "0\n1\n0\n";
    std::ofstream(box.dir / "phi.txt") << "-1\n1\n";
    CHECK(run("settle --prices " + box.path("prices.txt") + " --phi " +
              box.path("phi.txt") + " --alpha 2 --lambda 1 --out " + box.path("led")) == 0);
    const auto summary = slurp(box.dir / "led" / "ledger.json");
    CHECK(summary.find("\"terminal_cash\": -3.0") != std::string::npos);

    std::ofstream(box.dir / "open.txt") << "-1\n0.5\n";
    CHECK(run("settle --prices " + box.path("prices.txt") + " --phi " +
              box.path("open.txt") + " --out " + box.path("led2")) == 3);
}

TEST_CASE("growth: manifest reruns reproduce outputs byte-for-byte") {
    Sandbox box;
    const std::string common =
        " --model fgn --hurst 0.25 --alpha 2 --lambda 0.01"
        " --horizons 60,120,240,480,960,1920 --paths 200 --seed 11";
    CHECK(run("growth" + common + " --workers 2 --out " + box.path("g1")) == 0);
    CHECK(run("growth --config " + box.path("g1") + "/manifest.cfg --workers 1 --out " +
              box.path("g2")) == 0);
    CHECK(slurp(box.dir / "g1" / "growth.json") == slurp(box.dir / "g2" / "growth.json"));
    CHECK(slurp(box.dir / "g1" / "growth.csv") == slurp(box.dir / "g2" / "growth.csv"));

    const auto report = slurp(box.dir / "g1" / "growth.json");
    CHECK(report.find("\"theory_exponent\": 1.5") != std::string::npos);
}

TEST_CASE("growth: zero strategy reports a flat table without a fit") {
    Sandbox box;
    CHECK(run("growth --model fgn --hurst 0.25 --strategy zero"
              " --horizons 60,120,240,480,960,1920 --paths 150 --seed 2 --out " +
              box.path("z")) == 0);
    const auto report = slurp(box.dir / "z" / "growth.json");
    CHECK(report.find("\"fit_valid\": false") != std::string::npos);
}

TEST_CASE("lambda-sweep consumes a certificate") {
    Sandbox box;
    CHECK(run("certify --model fgn --hurst 0.25 --horizon 1200 --out " +
              box.path("cert")) == 0);
    CHECK(run("lambda-sweep --model fgn --hurst 0.25 -T 120"
              " --lambdas 0.001,0.01,0.1,1000 --paths 200 --seed 6 --certificate " +
              box.path("cert") + "/certificate.json --out " + box.path("sw")) == 0);
    const auto sweep = slurp(box.dir / "sw" / "sweep.json");
    CHECK(sweep.find("\"epsilon_over_3\"") != std::string::npos);
    CHECK(fs::exists(box.dir / "sw" / "sweep.csv"));
}

TEST_CASE("NEGMEM_OUT provides the default output directory") {
    Sandbox box;
    const std::string cmd = "NEGMEM_OUT=" + box.path("envout") + " " + kCli +
                            " verify --model fgn --hurst 0.25 > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(box.dir / "envout" / "assumption.json"));
}
