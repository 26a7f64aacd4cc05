// Drives the aoi executable end to end.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "aoi_cli_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

Outcome aoi(const std::string& args, const std::string& env = "") {
    const auto err = scratch("stderr.txt");
    const std::string cmd = env + " " + AOI_CLI_PATH + " " + args + " 2>" + err.string();
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, slurp(err)};
}

// Sorted key paths of a JSON document, one per line.
std::string key_paths(const json& j) {
    const json flat = j.flatten();
    std::string s;
    for (const auto& [k, v] : flat.items()) s += k + "\n";
    return s;
}

std::string golden(const std::string& name) { return slurp(std::filesystem::path(AOI_GOLDEN_DIR) / name); }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

const std::string kLogNormal = "lognormal:alpha=0.75,omega=0.75";

}  // namespace

TEST_CASE("analyze") {
    const Outcome r = aoi("analyze --lambda 1 --theta 1 --dist exp:rate=1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["results"]["avg_aoi"].get<double>() == 2.0);
    CHECK(j["results"]["avg_paoi"].get<double>() == 2.5);
    CHECK(j["results"]["mean_interdeparture"].get<double>() == 2.0);
    CHECK(j["results"]["delivery_prob"].get<double>() == 0.5);
    CHECK(j["command"] == "analyze");
    CHECK(key_paths(j) == golden("analyze.keys"));

    const Outcome m = aoi("analyze --lambda 1 --theta 1 --dist exp:rate=1 --moments 2");
    CHECK(key_paths(json::parse(m.out)) == golden("analyze_moments.keys"));
    CHECK(json::parse(m.out)["results"]["aoi_moment_2"].get<double>() == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("analyze at the lambda = 1 operating point") {
    const Outcome r = aoi("analyze --lambda 1 --theta 0.34 --dist " + kLogNormal);
    REQUIRE(r.code == 0);
    // regression value; the renewal-reward oracle in the analytic tests backs it
    CHECK(json::parse(r.out)["results"]["avg_aoi"].get<double>() == 4.95870398703);
}

TEST_CASE("csv output") {
    const Outcome r = aoi("analyze --lambda 1 --theta 1 --dist exp:rate=1 --csv");
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    CHECK(l.front() == "quantity,value");
    CHECK(std::find(l.begin(), l.end(), "avg_aoi,2") != l.end());
    CHECK(aoi("analyze --lambda 1 --theta 1 --dist exp:rate=1 --csv --json").code == 2);
}

TEST_CASE("usage and parse errors exit 2") {
    Outcome r = aoi("analyze --lambda 1 --theta 1.5 --dist exp:rate=1");
    CHECK(r.code == 2);
    CHECK(r.err.find("theta") != std::string::npos);
    r = aoi("analyze --lambda 1 --theta 0.5 --dist exp:speed=1");
    CHECK(r.code == 2);
    CHECK(r.err.find("speed") != std::string::npos);
    CHECK(aoi("analyze --lambda 1 --theta 0.5").code == 2);
    CHECK(aoi("analyze --lambda x --theta 0.5 --dist exp:rate=1").code == 2);
    CHECK(aoi("bogus").code == 2);
    CHECK(aoi("").code == 2);
    CHECK(aoi("simulate --lambda 1 --theta 1 --dist exp:rate=1 --deliveries 10 --warmup 10").code == 2);
    CHECK(aoi("--help").code == 0);
}

TEST_CASE("numeric failures exit 3 and name the quantity") {
    const Outcome r = aoi("analyze --lambda 1 --theta 0.34 --dist " + kLogNormal, "AOI_QUAD_TOL=1e-300");
    CHECK(r.code == 3);
    CHECK(r.err.find("error: ") == 0);
}

TEST_CASE("simulate") {
    const std::string args = "simulate --lambda 1 --theta 1 --dist exp:rate=1 --deliveries 1000000 --seed 7";
    const Outcome a = aoi(args);
    REQUIRE(a.code == 0);
    CHECK(aoi(args).out == a.out);
    const json j = json::parse(a.out);
    CHECK(key_paths(j) == golden("simulate.keys"));
    const double v = j["results"]["avg_aoi"];
    const double se = j["results"]["se"]["avg_aoi"];
    CHECK(std::abs(v - 2.0) <= 3.0 * se);

    const auto dump = scratch("trace.csv");
    const Outcome d = aoi("simulate --lambda 1 --theta 0.5 --dist det:value=1 --deliveries 5000 --warmup 200 "
                          "--reps 2 --dump " + dump.string());
    REQUIRE(d.code == 0);
    const auto rows = lines(slurp(dump));
    CHECK(rows.front() == "i,gen_time,deliver_time,T,Y,A,V");
    CHECK(rows.size() == 1 + 2 * 4800);

    const Outcome c = aoi("simulate --lambda 1 --theta 1 --dist exp:rate=1 --deliveries 5000 --csv");
    CHECK(lines(c.out).front() == "quantity,value");
    CHECK(c.out.find("se.avg_aoi,") != std::string::npos);
}

TEST_CASE("echoed configuration reproduces the results") {
    const Outcome a = aoi("analyze --lambda 0.7 --theta 0.3 --dist gamma:shape=2,rate=2 --moments 1");
    const json j = json::parse(a.out);
    const json& c = j["config"];
    const Outcome b = aoi("analyze --lambda " + c["lambda"].dump() + " --theta " + c["theta"].dump() +
                          " --dist " + c["dist"].get<std::string>() + " --moments " + c["moments"].dump());
    CHECK(json::parse(b.out)["results"] == j["results"]);

    const Outcome s = aoi("simulate --lambda 2 --theta 0.5 --dist uniform:a=0,b=1 --deliveries 3000 --seed 5");
    const json sj = json::parse(s.out);
    const json& sc = sj["config"];
    const Outcome t = aoi("simulate --lambda " + sc["lambda"].dump() + " --theta " + sc["theta"].dump() +
                          " --dist " + sc["dist"].get<std::string>() + " --deliveries " +
                          sc["deliveries"].dump() + " --warmup " + sc["warmup_deliveries"].dump() + " --seed " +
                          sc["seed"].dump() + " --reps " + sc["replications"].dump());
    CHECK(t.out == s.out);
}

TEST_CASE("sweep") {
    const auto file = scratch("sweep.csv");
    Outcome r = aoi("sweep --lambda 1 --dist " + kLogNormal + " --grid 2 -o " + file.string());
    REQUIRE(r.code == 0);
    const auto two = lines(slurp(file));
    REQUIRE(two.size() == 3);
    CHECK(two[0] == "theta,avg_aoi,avg_paoi");
    CHECK(two[1].starts_with("0,"));
    CHECK(two[2].starts_with("1,"));

    r = aoi("sweep --lambda 1 --dist " + kLogNormal + " --grid 101");
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    REQUIRE(rows.size() == 102);
    double best = 1e300, arg = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double theta = 0.0, d = 0.0;
        std::sscanf(rows[i].c_str(), "%lf,%lf", &theta, &d);
        if (d < best) best = d, arg = theta;
    }
    CHECK(std::abs(arg - 0.34) <= 0.01 + 1e-12);

    r = aoi("sweep --lambda 1 --dist exp:rate=1 --grid 3 --with-sim --sim-deliveries 20000");
    CHECK(lines(r.out).front() == "theta,avg_aoi,avg_paoi,sim_avg_aoi,sim_avg_paoi,sim_se_aoi,sim_se_paoi");
}

TEST_CASE("optimize") {
    Outcome r = aoi("optimize --lambda 0.2 --dist " + kLogNormal + " --objective aoi");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["results"]["theta_star"].get<double>() == 1.0);
    CHECK(key_paths(j) == golden("optimize.keys"));
    r = aoi("optimize --lambda 1 --dist " + kLogNormal + " --objective paoi");
    const double t = json::parse(r.out)["results"]["theta_star"];
    CHECK(t > 0.0);
    CHECK(t < 1.0);
    CHECK(aoi("optimize --lambda 1 --dist exp:rate=1 --objective peak").code == 2);
}

TEST_CASE("validate") {
    const auto start = std::chrono::steady_clock::now();
    const Outcome ok = aoi("validate --level quick");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(ok.code == 0);
    CHECK(secs < 60.0);
    CHECK(ok.out.find("[PASS]") != std::string::npos);
    CHECK(ok.out.find("[FAIL]") == std::string::npos);

    const Outcome bad = aoi("validate --level quick --tolerance-scale 1e-12");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("first failure") != std::string::npos);
}
