// Integration tests that drive the built CLI binary end to end: exit codes,
// file outputs, byte determinism, and the bit-exact round trip between the
// written polynomial and the in-process evaluator.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "bqi/bqi.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAIL: " << what << "\n";
    }
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& stdout_file) {
    std::string cmd = std::string(BQI_CLI_PATH) + " " + args + " > " + stdout_file + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = rc < 0 ? rc : WEXITSTATUS(rc);
    std::ifstream in(stdout_file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    fs::path tmp = fs::temp_directory_path() / "bqi_cli_tests";
    fs::create_directories(tmp);
    const std::string tri = std::string(BQI_DATA_DIR) + "/octant_triangle.json";
    const std::string quad = std::string(BQI_DATA_DIR) + "/dome_quad.json";
    const std::string sout = (tmp / "stdout.txt").string();

    // eval: corner reproduces the corner control point
    {
        auto r = run_cli("eval " + tri + " -u 1 -v 0", sout);
        check(r.exit_code == 0, "eval exit code");
        check(r.out == "{\"point\":[1.0,0.0,0.0]}\n", "eval corner output, got: " + r.out);
    }

    // eval: domain violation is malformed input (exit 2)
    {
        auto r = run_cli("eval " + tri + " -u 0.7 -v 0.7", sout);
        check(r.exit_code == 2, "eval domain violation exit code");
    }

    // implicitize: triangle summary + files; byte-deterministic across runs
    {
        fs::path poly1 = tmp / "tri1.json", poly2 = tmp / "tri2.json";
        fs::path slp1 = tmp / "tri1.slp", slp2 = tmp / "tri2.slp";
        auto r1 = run_cli(
            "implicitize " + tri + " --poly " + poly1.string() + " --slp " + slp1.string(), sout);
        std::string summary1 = r1.out;
        auto r2 = run_cli(
            "implicitize " + tri + " --poly " + poly2.string() + " --slp " + slp2.string(), sout);
        check(r1.exit_code == 0 && r2.exit_code == 0, "implicitize exit codes");
        check(slurp(poly1) == slurp(poly2), "poly output is byte-deterministic");
        check(slurp(slp1) == slurp(slp2), "slp output is byte-deterministic");
        check(summary1 == r2.out, "summary is byte-deterministic");
        check(summary1.find("\"max_degree\":5") != std::string::npos,
              "triangle summary reports max_degree 5, got: " + summary1);

        // round trip: the written polynomial evaluates bit-identically to the
        // in-process expansion, and the written SLP matches both
        auto net = bqitest::octant_triangle();
        auto poly = bqi::expand_resultant(bqi::build_cayley_matrix(net));
        auto loaded = bqi::poly_from_json_text(slurp(poly1));
        auto prog = bqi::slp_from_text(slurp(slp1));
        bqitest::Rng rng(901);
        bool all_match = true;
        for (int k = 0; k < 200; ++k) {
            bqi::Point3 q = bqitest::random_point(rng, -2, 2);
            double a = bqi::evaluate_poly(poly, q);
            double b = bqi::evaluate_poly(loaded, q);
            double c = bqi::run_slp(prog, q);
            all_match = all_match && std::memcmp(&a, &b, sizeof a) == 0 &&
                        std::memcmp(&a, &c, sizeof a) == 0;
        }
        check(all_match, "implicitize round trip is bit-exact");
    }

    // implicitize quad: degree 8 summary
    {
        auto r = run_cli("implicitize " + quad, sout);
        check(r.exit_code == 0, "implicitize quad exit code");
        check(r.out.find("\"max_degree\":8") != std::string::npos, "quad max_degree 8");
        check(r.out.find("\"n\":8") != std::string::npos, "quad 8x8 matrix");
    }

    // classify: a surface point round-trips to on-surface
    {
        auto e = run_cli("eval " + tri + " -u 0.33 -v 0.33", sout);
        auto j = nlohmann::json::parse(e.out);
        std::ostringstream cmd;
        cmd.precision(17);
        cmd << "classify " << tri << " --point " << j["point"][0].get<double>() << " "
            << j["point"][1].get<double>() << " " << j["point"][2].get<double>();
        auto r = run_cli(cmd.str(), sout);
        check(r.exit_code == 0, "classify exit code");
        check(r.out.find("\"verdict\":\"on-surface\"") != std::string::npos,
              "eval->classify round trip verdict, got: " + r.out);
    }

    // classify: degenerate net -> exit 1
    {
        fs::path degen = tmp / "degen.json";
        std::ofstream(degen) << R"({"kind":"triangle","points":{"b200":[0,0,0],"b020":[1,1,1],)"
                                R"("b002":[2,2,2],"b110":[0.5,0.5,0.5],"b101":[1.5,1.5,1.5],)"
                                R"("b011":[0.25,0.25,0.25]}})";
        auto r = run_cli("classify " + degen.string() + " --point 1 2 3", sout);
        check(r.exit_code == 1, "degenerate net exit code 1");
    }

    // malformed JSON and unknown keys -> exit 2
    {
        fs::path bad = tmp / "bad.json";
        std::ofstream(bad) << "{not json";
        check(run_cli("classify " + bad.string() + " --point 0 0 0", sout).exit_code == 2,
              "malformed json exit code 2");
        std::ofstream(bad) << R"({"kind":"triangle","points":{"b200":[0,0,0]},"junk":1})";
        check(run_cli("eval " + bad.string() + " -u 0 -v 0", sout).exit_code == 2,
              "unknown key exit code 2");
        check(run_cli("eval " + (tmp / "missing.json").string() + " -u 0 -v 0", sout).exit_code ==
                  2,
              "missing file exit code 2");
    }

    // raycast along the radial direction through the known surface point
    {
        auto r = run_cli("raycast " + tri +
                             " --origin 0.39633277 0.39633277 0.40731999"
                             " --dir 0.57245878 0.57245878 0.58732763 --tmin -1 --tmax 1",
                         sout);
        check(r.exit_code == 0, "raycast exit code");
        auto j = nlohmann::json::parse(r.out);
        check(j["hits"].size() == 1, "raycast hit count");
        if (j["hits"].size() == 1)
            check(std::abs(j["hits"][0]["t"].get<double>()) < 1e-5, "raycast hit near t=0");
    }

    // scan: CSV header and sample count; deterministic bytes
    {
        auto r1 = run_cli("scan " + tri + " --samples 101", sout);
        check(r1.exit_code == 0, "scan exit code");
        check(r1.out.rfind("t,implicit_value,det_value\n", 0) == 0, "scan CSV header");
        int lines = 0;
        for (char ch : r1.out) lines += ch == '\n';
        check(lines == 102, "scan line count");
        auto r2 = run_cli("scan " + tri + " --samples 101", sout);
        check(r1.out == r2.out, "scan output deterministic");
    }

    // study: 4 rows per offset, header contract
    {
        auto r = run_cli("study " + tri + " --offsets 0 1e13 --samples 257", sout);
        check(r.exit_code == 0, "study exit code");
        check(r.out.rfind("offset,mode,crossing_found,t_star,error_flags\n", 0) == 0,
              "study CSV header");
        int lines = 0;
        for (char ch : r.out) lines += ch == '\n';
        check(lines == 9, "study line count (header + 2 offsets x 4 modes)");
        check(r.out.find("norm_poly,true") != std::string::npos, "study norm_poly recovers");
    }

    // no subcommand -> parse error (exit 2)
    check(run_cli("", sout).exit_code == 2, "missing subcommand exit code");

    if (failures == 0) {
        std::cout << "cli tests: all passed\n";
        return 0;
    }
    std::cout << "cli tests: " << failures << " failure(s)\n";
    return 1;
}
