#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

#ifndef WAGNER_BIN_DEFAULT
#define WAGNER_BIN_DEFAULT "wagner"
#endif

std::string wagner_bin() {
    if (const char* env = std::getenv("WAGNER_BIN")) return env;
    return WAGNER_BIN_DEFAULT;
}

struct RunResult {
    int exit_code;
    std::string output;  // stdout + stderr
};

RunResult run(const std::string& args) {
    const std::string out_path = "cli_test_output.tmp";
    const std::string cmd = wagner_bin() + " " + args + " > " + out_path + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    int code = -1;
    if (status != -1) code = WEXITSTATUS(status);
    return {code, buf.str()};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

const char* kTorusJson = R"({"kind":"builtin","name":"torus","params":{"R":2,"r":1}})";

}  // namespace

TEST_CASE("csv output is deterministic and carries the fixed header") {
    write_file("cli_torus.json", kTorusJson);
    const std::string args =
        "integrate --surface cli_torus.json --C 1 --init u1=0,u2=0.4,angle=0.6,speed=1 "
        "--t-span 0:2 --method rk4 --h-init 0.01 --out ";
    REQUIRE(run(args + "cli_a.csv").exit_code == 0);
    REQUIRE(run(args + "cli_b.csv").exit_code == 0);

    const std::string a = read_file("cli_a.csv");
    CHECK(a == read_file("cli_b.csv"));
    CHECK(a.substr(0, a.find('\n')) == "t,u1,u2,phi,Q1,Q2,Q3,K,C1,C2,C3sq");
    CHECK(a.find("\r") == std::string::npos);  // LF endings

    // projected runs leave phi, Q3, C1 empty
    const auto lines = split(a, '\n');
    REQUIRE(lines.size() > 2);
    const auto fields = split(lines[1] + " ", ',');
    REQUIRE(fields.size() == 11);
    CHECK(fields[3].empty());   // phi
    CHECK(fields[6].empty());   // Q3
    CHECK(fields[8].empty());   // C1
    CHECK_FALSE(fields[7].empty());  // K present
    CHECK_FALSE(fields[9].empty());  // C2 present on a revolution chart
}

TEST_CASE("lift and lift-solution emit the fiber columns") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run(
        "lift-solution --surface cli_torus.json --C 1 --init "
        "u1=0,u2=0.4,angle=0.6,speed=1,phi=0.25 --t-span 0:2 --out cli_ls.csv");
    REQUIRE(res.exit_code == 0);
    const auto lines = split(read_file("cli_ls.csv"), '\n');
    REQUIRE(lines.size() > 2);
    const auto fields = split(lines[1] + " ", ',');
    REQUIRE(fields.size() == 11);
    CHECK(fields[3] == "0.25");       // phi
    CHECK_FALSE(fields[6].empty());   // Q3
    CHECK(fields[8] == "1");          // C1 = C

    const RunResult lift = run(
        "lift --surface cli_torus.json --C 1 --init u1=0,u2=0.4,angle=0.6,speed=1 "
        "--t-span 0:1 --out cli_lift.csv");
    CHECK(lift.exit_code == 0);
}

TEST_CASE("config errors exit with code 1") {
    write_file("cli_bad.json", R"x({"kind":"revolution","A":"2 + qq(v)"})x");
    const RunResult res = run("integrate --surface cli_bad.json --t-span 0:1");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("qq") != std::string::npos);
    CHECK(res.output.find("byte") != std::string::npos);

    CHECK(run("region --surface cli_torus.json --C 0 --init u1=0,u2=0").exit_code == 1);
    CHECK(run("integrate --surface missing_file.json").exit_code == 1);
    CHECK(run("integrate --surface cli_torus.json --method euler").exit_code == 1);
}

TEST_CASE("numerical failures exit with code 2 and name the error") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res =
        run("tables --surface cli_torus.json --point u1=0,u2=1.5707963267948966");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("SingularPoint") != std::string::npos);
}

TEST_CASE("tables report includes oracle deltas") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run("tables --surface cli_torus.json --point u1=0,u2=0.785");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("\"c_hat\"") != std::string::npos);
    CHECK(res.output.find("\"gamma_hat\"") != std::string::npos);
    CHECK(res.output.find("\"r_hat\"") != std::string::npos);
    CHECK(res.output.find("\"oracle_delta\"") != std::string::npos);
}

TEST_CASE("region reports bands for revolution charts") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run(
        "region --surface cli_torus.json --C 3 --init "
        "u1=0,u2=1.5707963267948966,angle=0,speed=1 --out cli_region.json");
    REQUIRE(res.exit_code == 0);
    const std::string report = read_file("cli_region.json");
    CHECK(report.find("\"K_max\"") != std::string::npos);
    CHECK(report.find("0.333333") != std::string::npos);
    CHECK(report.find("\"bands\"") != std::string::npos);
}

TEST_CASE("quadrature emits a graph csv") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run(
        "quadrature --surface cli_torus.json --C 1 --init u1=0,u2=0.3,angle=0.9,speed=1 "
        "--samples 16 --out cli_quad.csv");
    REQUIRE(res.exit_code == 0);
    const auto lines = split(read_file("cli_quad.csv"), '\n');
    REQUIRE(lines.size() > 2);
    CHECK(lines[0] == "u2,u1");
}

TEST_CASE("svg plots are written and self-contained") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run(
        "integrate --surface cli_torus.json --C 1 --init u1=0,u2=0.4,angle=0.6,speed=1 "
        "--t-span 0:3 --out cli_svg.csv --svg cli_plot.svg");
    REQUIRE(res.exit_code == 0);
    const std::string svg = read_file("cli_plot.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external assets
}

TEST_CASE("plot overlays several trajectory CSVs") {
    write_file("cli_torus.json", kTorusJson);
    for (int c : {0, 2}) {
        REQUIRE(run("integrate --surface cli_torus.json --C " + std::to_string(c) +
                    " --init u1=0,u2=0.4,angle=0.6,speed=1 --t-span 0:4 --out cli_ov" +
                    std::to_string(c) + ".csv")
                    .exit_code == 0);
    }
    REQUIRE(run("plot --surface cli_torus.json --svg cli_overlay.svg cli_ov0.csv "
                "cli_ov2.csv")
                .exit_code == 0);
    const std::string svg = read_file("cli_overlay.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t polylines = 0, pos = 0;
    while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
        ++polylines;
        ++pos;
    }
    CHECK(polylines >= 2);
}

TEST_CASE("invariants subcommand reports drift") {
    write_file("cli_torus.json", kTorusJson);
    const RunResult res = run(
        "invariants --surface cli_torus.json --C 1 --init u1=0,u2=0.4,angle=0.6,speed=1 "
        "--t-span 0:5");
    REQUIRE(res.exit_code == 0);
    CHECK(res.output.find("\"C2_drift\"") != std::string::npos);
    CHECK(res.output.find("\"C3sq_drift\"") != std::string::npos);
}

TEST_CASE("runspec files merge with flag overrides") {
    write_file("cli_torus.json", kTorusJson);
    write_file("cli_spec.json", R"({
        "mode": "integrate", "surface": "cli_torus.json", "C": 1.0,
        "init": {"u1": 0.0, "u2": 0.4, "angle": 0.6, "speed": 1.0},
        "t_span": [0.0, 2.0], "method": "rk4", "h_init": 0.01
    })");
    REQUIRE(run("integrate --runspec cli_spec.json --out cli_rs1.csv").exit_code == 0);
    // flag overrides the file's C; outputs must differ
    REQUIRE(run("integrate --runspec cli_spec.json --C 2 --out cli_rs2.csv").exit_code == 0);
    CHECK(read_file("cli_rs1.csv") != read_file("cli_rs2.csv"));
    // and the file value matches the all-flags run
    REQUIRE(run("integrate --surface cli_torus.json --C 1 --init "
                "u1=0,u2=0.4,angle=0.6,speed=1 --t-span 0:2 --method rk4 --h-init 0.01 "
                "--out cli_rs3.csv")
                .exit_code == 0);
    CHECK(read_file("cli_rs1.csv") == read_file("cli_rs3.csv"));
}

TEST_CASE("batch mode runs specs concurrently") {
    write_file("cli_torus.json", kTorusJson);
    write_file("cli_batch.json", R"([
      {"mode": "integrate", "surface": "cli_torus.json", "C": 0.0,
       "init": {"u2": 0.0, "angle": 0.0}, "t_span": [0, 2], "out": "cli_batch_a.csv"},
      {"mode": "integrate", "surface": "cli_torus.json", "C": 2.0,
       "init": {"u2": 0.4, "angle": 0.7}, "t_span": [0, 2], "out": "cli_batch_b.csv"},
      {"mode": "tables", "surface": "cli_torus.json",
       "init": {"u1": 0.0, "u2": 0.785}, "out": "cli_batch_c.json"}
    ])");
    const RunResult res = run("batch cli_batch.json --jobs 3");
    REQUIRE(res.exit_code == 0);
    CHECK(read_file("cli_batch_a.csv").rfind("t,u1,u2", 0) == 0);
    CHECK(read_file("cli_batch_b.csv").rfind("t,u1,u2", 0) == 0);
    CHECK(read_file("cli_batch_c.json").find("oracle_delta") != std::string::npos);
}
