#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <string>

#include <json.hpp>

#ifndef SMP_CLI_PATH
#error "SMP_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(SMP_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
    const int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string strip_timestamp(std::string s) {
    return std::regex_replace(s, std::regex("\"generated_at\":[^,}\\n]*,?\\n?"), "");
}

} // namespace

TEST_CASE("classify subcommand") {
    auto pos = run("classify --kind pos --dim 3");
    REQUIRE(pos.exit_code == 0);
    auto j = nlohmann::json::parse(pos.out);
    REQUIRE(j["case"] == "Borderline");

    auto sub = run("classify --kind subaffine --dim 3");
    REQUIRE(sub.exit_code == 0);
    j = nlohmann::json::parse(sub.out);
    REQUIRE(j["case"] == "Counterexample");
    REQUIRE(j.contains("witness"));

    auto hs = run("classify --kind halfspace --c 1 --dim 2");
    REQUIRE(hs.exit_code == 0);
    REQUIRE(nlohmann::json::parse(hs.out)["case"] == "Generic");
}

TEST_CASE("charfn subcommand writes a table") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "smp_cli_charfn";
    fs::remove_all(dir);

    auto r = run("--out " + dir.string() +
                 " charfn --kind sigma-psi-k --a 0.3333333 --k 1 --dim 3 --grid-min 0.01 "
                 "--grid-max 10 --grid-points 50");
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(dir / "charfn.csv"));
    REQUIRE(fs::exists(dir / "charfn.meta.json"));

    std::ifstream is(dir / "charfn.csv");
    std::string header;
    std::getline(is, header);
    REQUIRE(header == "lambda,f_value");
    double best = 1e9;
    std::string line;
    while (std::getline(is, line)) {
        const auto comma = line.find(',');
        const double lam = std::stod(line.substr(0, comma));
        const double val = std::stod(line.substr(comma + 1));
        if (std::abs(lam - 1.0) < 0.05) best = std::min(best, std::abs(val - 8.0 * lam));
    }
    REQUIRE(best < 1e-4);
    fs::remove_all(dir);
}

TEST_CASE("charfn to stdout: pos has a zero column") {
    auto r = run("charfn --kind pos --dim 2 --grid-min 0.1 --grid-max 1 --grid-points 5");
    REQUIRE(r.exit_code == 0);
    std::istringstream is(r.out);
    std::string line;
    std::getline(is, line);
    REQUIRE(line == "lambda,f_value");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const double val = std::stod(line.substr(line.find(',') + 1));
        REQUIRE(std::abs(val) < 1e-8);
    }
}

TEST_CASE("smp subcommand carries a rationale chain") {
    auto r = run("smp --kind minmax-f --f sqrt --dim 3");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["verdict"] == "Fails");
    REQUIRE(j.contains("classification"));
    REQUIRE(j.contains("lower_integral"));
}

TEST_CASE("counterexample subcommand: build, refuse, barrier") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "smp_cli_ctr";
    fs::remove_all(dir);

    auto ok = run("--out " + dir.string() + " counterexample --f sqrt --m 0 --points 512");
    REQUIRE(ok.exit_code == 0);
    auto j = nlohmann::json::parse(ok.out);
    REQUIRE(j["smp_witness"] == true);
    REQUIRE(j["max_residual"].get<double>() <= 1e-6);
    REQUIRE(fs::exists(dir / "psi.csv"));
    REQUIRE(fs::exists(dir / "s_of_y.csv"));
    REQUIRE(fs::exists(dir / "meta.json"));
    fs::remove_all(dir);

    auto refused = run("counterexample --f linear");
    REQUIRE(refused.exit_code == 3);

    auto hopf = run("--out " + dir.string() + " counterexample --f hopf --beta 10 --R 1 --points 512");
    REQUIRE(hopf.exit_code == 0);
    j = nlohmann::json::parse(hopf.out);
    REQUIRE(j["max_residual"].get<double>() <= 1e-8);
    fs::remove_all(dir);
}

TEST_CASE("scp subcommand") {
    auto hold = run("scp --g log-inverse:2:0.5 --dim 2");
    REQUIRE(hold.exit_code == 0);
    REQUIRE(nlohmann::json::parse(hold.out)["scp"] == "Holds");

    auto unknown = run("scp --g neg-ratio --dim 2");
    REQUIRE(unknown.exit_code == 0);
    auto j = nlohmann::json::parse(unknown.out);
    REQUIRE(j["scp"] == "Unknown");
    REQUIRE(j["additivity"]["passed"] == false);
}

TEST_CASE("exit codes for bad input and precondition refusals") {
    REQUIRE(run("classify --kind not-a-kind --dim 2").exit_code == 2);
    REQUIRE(run("classify --dim 2").exit_code == 2);
    REQUIRE(run("cone --kind halfspace --c 1 --dim 2").exit_code == 3); // not a cone
}

TEST_CASE("determinism: identical config and seed give identical bytes") {
    const std::string cmd = "smp --kind pos --dim 3 --seed 42";
    const auto a = run(cmd);
    const auto b = run(cmd);
    REQUIRE(a.exit_code == 0);
    REQUIRE(strip_timestamp(a.out) == strip_timestamp(b.out));

    const std::string csv = "charfn --kind minmax-cone --alpha 0.5 --dim 3 --grid-points 40";
    REQUIRE(run(csv).out == run(csv).out);
}

TEST_CASE("spec file loading") {
    namespace fs = std::filesystem;
    const auto file = fs::temp_directory_path() / "smp_cli_spec.json";
    {
        std::ofstream os(file);
        os << R"({"kind":"minmax-cone","dim":3,"params":{"alpha":0.5}})";
    }
    auto r = run("classify --spec " + file.string());
    REQUIRE(r.exit_code == 0);
    REQUIRE(nlohmann::json::parse(r.out)["case"] == "Borderline");
    fs::remove(file);
}
