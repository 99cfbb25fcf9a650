#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

class Workdir {
public:
    Workdir() : dir_(fs::temp_directory_path() / "rtsim_cli_test") {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workdir() { fs::remove_all(dir_); }

    fs::path operator/(const std::string& name) const { return dir_ / name; }

    Run rtsim(const std::string& args) const {
        const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd = std::string(RTSIM_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
        const int status = std::system(cmd.c_str());
        Run r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    void write(const std::string& name, const std::string& text) const {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << text;
    }

private:
    fs::path dir_;
};

std::string data(const std::string& name) { return std::string(RTSIM_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
    Workdir w;
    CHECK(w.rtsim("").code == 2);
    CHECK(w.rtsim("frobnicate").code == 2);
    CHECK(w.rtsim("compile").code == 2);
    const Run missing = w.rtsim("compile " + (w / "none.fir").string());
    CHECK(missing.code == 2);
    CHECK_FALSE(missing.err.empty());
    CHECK(w.rtsim("compile " + data("shared_mul.fir") + " --format d").code == 2);
}

TEST_CASE("compile prints stats and writes both files") {
    Workdir w;
    const Run r = w.rtsim("compile " + data("shared_mul.fir") + " -o " + (w / "b").string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("layers: 1") != std::string::npos);
    CHECK(r.out.find("mul: 2") != std::string::npos);
    CHECK(fs::exists(w / "b" / "meta.json"));
    CHECK(fs::exists(w / "b" / "oim.json"));
    CHECK(nlohmann::json::parse(slurp(w / "b" / "meta.json"))["format"] == "B");

    REQUIRE(w.rtsim("compile " + data("shared_mul.fir") + " --format c -o " + (w / "c").string()).code == 0);
    CHECK(nlohmann::json::parse(slurp(w / "c" / "meta.json"))["format"] == "C");
}

TEST_CASE("unsupported constructs fail with a located message") {
    Workdir w;
    w.write("mem.fir",
            "circuit M :\n  module M :\n    input clock : Clock\n    mem m :\n      data-type => UInt<8>\n");
    const Run r = w.rtsim("compile " + (w / "mem.fir").string() + " -o " + (w / "m").string());
    CHECK(r.code != 0);
    CHECK(r.err.find("mem") != std::string::npos);
    CHECK(r.err.find(":4") != std::string::npos);
    CHECK_FALSE(fs::exists(w / "m" / "meta.json"));
}

TEST_CASE("simulate with a testbench") {
    Workdir w;
    REQUIRE(w.rtsim("compile " + data("counter.fir") + " -o " + (w / "k").string()).code == 0);
    const Run ok = w.rtsim("simulate " + (w / "k").string() + " --tb " + data("counter_tb.json"));
    CHECK(ok.code == 0);
    CHECK(ok.out.find("5 cycles") != std::string::npos);

    w.write("bad.json", R"({"cycles": 5, "actions": [{"cycle": 5, "expect": {"r": 6}}]})");
    const Run bad = w.rtsim("simulate " + (w / "k").string() + " --tb " + (w / "bad.json").string());
    CHECK(bad.code == 1);
    CHECK(bad.err.find("cycle 5") != std::string::npos);

    w.write("oops.json", R"({"actions": [{"cycle": 1, "poke": {"nope": 1}}]})");
    CHECK(w.rtsim("simulate " + (w / "k").string() + " --tb " + (w / "oops.json").string()).code == 2);
}

TEST_CASE("kernel and format must agree") {
    Workdir w;
    REQUIRE(w.rtsim("compile " + data("counter.fir") + " --format c -o " + (w / "c").string()).code == 0);
    const Run ru = w.rtsim("simulate " + (w / "c").string() + " -k ru -n 3");
    CHECK(ru.code == 2);
    CHECK(ru.err.find("Format B") != std::string::npos);
    const Run nu = w.rtsim("simulate " + (w / "c").string() + " -n 3");
    CHECK(nu.code == 0);
    CHECK(nu.out.find("NU") != std::string::npos);
    CHECK(w.rtsim("simulate " + (w / "c").string() + " -k xx -n 3").code == 2);
}

TEST_CASE("waveforms are deterministic") {
    Workdir w;
    REQUIRE(w.rtsim("compile " + data("counter.fir") + " -o " + (w / "k").string()).code == 0);
    for (const char* name : {"a.vcd", "b.vcd"}) {
        REQUIRE(w.rtsim("simulate " + (w / "k").string() + " -n 6 --vcd " + (w / name).string()).code == 0);
    }
    const std::string a = slurp(w / "a.vcd");
    CHECK_FALSE(a.empty());
    CHECK(a == slurp(w / "b.vcd"));
    CHECK(a.find("#5\n") != std::string::npos);
    CHECK(a.find("#6\n") == std::string::npos);
}

TEST_CASE("bench arguments") {
    Workdir w;
    CHECK(w.rtsim("bench --sizes 0").code == 2);
    const Run one = w.rtsim("bench --sizes 40 --cycles 50 --reps 1");
    CHECK(one.code == 0);
    CHECK(one.out.find("fit: omitted") != std::string::npos);
    CHECK(one.out.find("size,ops,layers") != std::string::npos);
}

TEST_CASE("check and fuzz") {
    Workdir w;
    const Run c = w.rtsim("check " + data("shared_mul.fir") + " -n 20");
    CHECK(c.code == 0);
    const Run f = w.rtsim("fuzz --seed 4 --nodes 30 -o " + (w / "f.fir").string());
    REQUIRE(f.code == 0);
    CHECK(w.rtsim("compile " + (w / "f.fir").string() + " -o " + (w / "f").string()).code == 0);
}
