#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exitCode;
    std::string output;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(FLOWTRACE_CLI_PATH) + " " + args + " 2>&1";
    std::array<char, 256> buf{};
    std::string output;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), output};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path tempDir() {
    fs::path dir = fs::temp_directory_path() / "flowtrace_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("catalog subcommand validates the bundled catalog") {
    RunResult r = run("catalog --expand");
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("concrete flows: 34") != std::string::npos);
    CHECK(r.output.find("mem_write[X=0]") != std::string::npos);
}

TEST_CASE("simulate is byte-deterministic and analyze reports a clean run") {
    fs::path dir = tempDir();
    std::string trc = (dir / "a.trc").string();
    std::string gt = (dir / "a.gt").string();

    RunResult s1 = run("simulate --seed 7 --budget 4 --out-trace " + trc + " --out-truth " + gt);
    REQUIRE(s1.exitCode == 0);
    std::string traceBytes = slurp(trc), gtBytes = slurp(gt);

    RunResult s2 = run("simulate --seed 7 --budget 4 --out-trace " + trc + " --out-truth " + gt);
    REQUIRE(s2.exitCode == 0);
    CHECK(slurp(trc) == traceBytes);
    CHECK(slurp(gt) == gtBytes);

    RunResult a = run("analyze --trace " + trc + " --strategy S1 --truth " + gt);
    CHECK(a.exitCode == 0);
    CHECK(a.output.find("final=1") != std::string::npos);
    CHECK(a.output.find("ground truth present in final set") != std::string::npos);

    SUBCASE("reports are byte-reproducible") {
        std::string rep = (dir / "r.json").string();
        RunResult r1 = run("analyze --trace " + trc + " --strategy S2+us --report json --out " + rep);
        REQUIRE(r1.exitCode == 0);
        std::string bytes = slurp(rep);
        RunResult r2 = run("analyze --trace " + trc + " --strategy S2+us --report json --out " + rep);
        REQUIRE(r2.exitCode == 0);
        CHECK(slurp(rep) == bytes);
        CHECK(bytes.find("wall_ms") == std::string::npos);  // timings off by default
    }

    SUBCASE("type filter reduces the report") {
        RunResult t1 = run("analyze --trace " + trc + " --strategy S1 --type 1");
        CHECK(t1.exitCode == 0);
        CHECK(t1.output.find("path=") == std::string::npos);
        RunResult t3 = run("analyze --trace " + trc + " --strategy S1 --type 3");
        CHECK(t3.output.find("path=") != std::string::npos);
    }
}

TEST_CASE("bug injection surfaces as exit code 2 with halt position") {
    fs::path dir = tempDir();
    std::string trc = (dir / "b.trc").string();
    std::string gt = (dir / "b.gt").string();
    RunResult s = run(
        "simulate --seed 3 --budget 2 --blocks CPU_0=2 --prob 1.0 --branch-mode first "
        "--templates mem_write --inject-bug swap:Mem:Bus:rd_resp@2=Cache_0:CPU_0:rd_resp "
        "--out-trace " + trc + " --out-truth " + gt);
    REQUIRE(s.exitCode == 0);
    RunResult a = run("analyze --trace " + trc + " --strategy S1");
    CHECK(a.exitCode == 2);
    CHECK(a.output.find("inconsistency at step") != std::string::npos);
    CHECK(a.output.find("halt_step=-1") == std::string::npos);
}

TEST_CASE("complexity abort surfaces as exit code 3") {
    fs::path dir = tempDir();
    std::string trc = (dir / "c.trc").string();
    std::string gt = (dir / "c.gt").string();
    REQUIRE(run("simulate --seed 5 --budget 6 --out-trace " + trc + " --out-truth " + gt)
                .exitCode == 0);
    RunResult a = run("analyze --trace " + trc + " --strategy S2+tag+sid --max-scenarios 500");
    CHECK(a.exitCode == 3);
    CHECK(a.output.find("complexity_exceeded") != std::string::npos);
}

TEST_CASE("mask files written by select feed analyze") {
    fs::path dir = tempDir();
    std::string msk = (dir / "m.msk").string();
    std::string trc = (dir / "d.trc").string();
    std::string gt = (dir / "d.gt").string();
    REQUIRE(run("select --strategy S3+cmd+tag+sid --out " + msk).exitCode == 0);
    REQUIRE(run("simulate --seed 11 --budget 3 --out-trace " + trc + " --out-truth " + gt)
                .exitCode == 0);
    RunResult a = run("analyze --trace " + trc + " --mask " + msk + " --truth " + gt);
    CHECK(a.exitCode == 0);
    CHECK(a.output.find("ground truth present") != std::string::npos);
}

TEST_CASE("sweep emits one row per matrix cell") {
    fs::path dir = tempDir();
    std::string trc = (dir / "e.trc").string();
    std::string gt = (dir / "e.gt").string();
    REQUIRE(run("simulate --seed 13 --budget 2 --out-trace " + trc + " --out-truth " + gt)
                .exitCode == 0);
    RunResult r = run("sweep --trace " + trc + " --truth " + gt +
                      " --max-scenarios 20000 --time-limit 10 --jobs 2");
    CHECK(r.exitCode == 0);
    CHECK(r.output.find("S1") != std::string::npos);
    CHECK(r.output.find("S4+us") != std::string::npos);
    std::size_t rows = 0;
    for (char c : r.output)
        if (c == '\n') ++rows;
    CHECK(rows >= 17);  // header + 16 cells
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run("analyze --trace /nonexistent.trc").exitCode == 1);
    CHECK(run("analyze --trace /nonexistent.trc --mask a --strategy S1").exitCode == 1);
    CHECK(run("simulate --seed 1 --budget 1 --branch-mode sideways").exitCode == 1);
}
