#include "creepdiv/cli.hpp"
#include "creepdiv/errors.hpp"
#include "creepdiv/model_io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace creepdiv;
namespace fs = std::filesystem;

#ifndef CREEPDIV_SOURCE_DIR
#error "CREEPDIV_SOURCE_DIR must point at the project root"
#endif

namespace {

const std::string kConfig = std::string(CREEPDIV_SOURCE_DIR) + "/configs/reference.cfg";
const std::string kGolden = std::string(CREEPDIV_SOURCE_DIR) + "/configs/reference.golden.json";

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "creepdiv");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path temp_file(const std::string& name, const std::string& content = "") {
    const fs::path p = fs::temp_directory_path() / ("creepdiv_test_" + name);
    if (!content.empty()) std::ofstream(p) << content;
    return p;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

// Numbers compared to 1e-9 relative, everything else exactly.
void expect_json_close(const nlohmann::ordered_json& got, const nlohmann::ordered_json& want, const std::string& path) {
    if (want.is_number() && got.is_number()) {
        const double a = got.get<double>();
        const double b = want.get<double>();
        EXPECT_LE(std::abs(a - b), 1e-9 * std::max(1.0, std::abs(b))) << path;
        return;
    }
    ASSERT_EQ(got.type(), want.type()) << path;
    if (want.is_object()) {
        ASSERT_EQ(got.size(), want.size()) << path;
        for (auto it = want.begin(); it != want.end(); ++it) {
            ASSERT_TRUE(got.contains(it.key())) << path << "/" << it.key();
            expect_json_close(got.at(it.key()), it.value(), path + "/" + it.key());
        }
    } else if (want.is_array()) {
        ASSERT_EQ(got.size(), want.size()) << path;
        for (std::size_t i = 0; i < want.size(); ++i) expect_json_close(got[i], want[i], path + "/" + std::to_string(i));
    } else {
        EXPECT_EQ(got, want) << path;
    }
}

}  // namespace

TEST(ModelIo, KeyValueAndJsonAgree) {
    const LevyModel a = load_model(kConfig);
    const LevyModel b = parse_model(R"({"c": 2, "sigma": 1, "q": 4, "delta": 1.8, "S": 0.05,
                                        "jumps": [{"lambda": 1, "p": 0.5}]})");
    EXPECT_EQ(model_to_json(a), model_to_json(b));
    EXPECT_EQ(model_to_json(model_from_json(model_to_json(a))), model_to_json(a));
}

TEST(ModelIo, SyntaxErrors) {
    EXPECT_THROW(parse_model("c = 2\nsigma = 1\nq = 4\ndelta = 1.8\n"), InvalidConfig);
    EXPECT_THROW(parse_model("c = two\nsigma = 1\nq = 4\ndelta = 1.8\nS = 0.1\n"), InvalidConfig);
    EXPECT_THROW(parse_model("c = 2\nc = 3\nsigma = 1\nq = 4\ndelta = 1.8\nS = 0.1\n"), InvalidConfig);
    EXPECT_THROW(parse_model("c = 2\nsigma = 1\nq = 4\ndelta = 1.8\nS = 0.1\n[jump]\nlambda = 1\n"), InvalidConfig);
    EXPECT_THROW(parse_model("c = 2\nsigma = 1\nq = 4\ndelta = 1.8\nS = 0.1\nmu = 3\n"), InvalidConfig);
    EXPECT_THROW(parse_model("c 2\n"), InvalidConfig);
    EXPECT_THROW(parse_model("{\"c\": 2"), InvalidConfig);
    EXPECT_THROW(parse_model("c = 2\nsigma = 1\nq = -4\ndelta = 1.8\nS = 0.1\n"), InvalidModel);
    EXPECT_THROW(load_model("/nonexistent/model.cfg"), InvalidConfig);
}

TEST(ModelIo, CommentsAndMultiplePhases) {
    const LevyModel m = parse_model(
        "# two phases\nc = 3  # drift\nsigma = 0.8\nq = 2\ndelta = 2\nS = 0.01\n"
        "[jump]\nlambda = 0.5\np = 3\n[jump]\np = 1\nlambda = 0.2\n");
    ASSERT_EQ(m.jumps().size(), 2u);
    EXPECT_EQ(m.jumps()[0].decay, 1.0);
    EXPECT_EQ(m.jumps()[0].arrival_rate, 0.2);
}

TEST(Format, NineSignificantDigits) {
    EXPECT_EQ(format9(0.019285008316175342), "0.0192850083");
    EXPECT_EQ(round9(2.9221443851123796), 2.92214439);
    EXPECT_EQ(format9(std::nan("")), "nan");
}

TEST(Cli, SolveMatchesGoldenFile) {
    const CliRun r = run({"solve", "--config", kConfig});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(kGolden);
    ASSERT_TRUE(in.good());
    const auto golden = nlohmann::ordered_json::parse(in);
    expect_json_close(nlohmann::ordered_json::parse(r.out), golden, "");
}

TEST(Cli, SolveThenCheckRoundTrip) {
    const fs::path out = temp_file("solution.json");
    ASSERT_EQ(run({"solve", "--config", kConfig, "--out", out.string()}).code, 0);
    const CliRun ok = run({"check", "--solution", out.string()});
    EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
    EXPECT_NE(ok.out.find("OK"), std::string::npos);

    std::ifstream in(out);
    auto doc = nlohmann::ordered_json::parse(in);
    const CheckResult cr = check_solution(doc);
    EXPECT_LE(std::abs(cr.stored_b_star - cr.recomputed_b_star), 1e-10);
    doc["b_star"] = doc["b_star"].get<double>() + 1e-6;
    const fs::path tampered = temp_file("tampered.json", doc.dump());
    EXPECT_EQ(run({"check", "--solution", tampered.string()}).code, 2);
    EXPECT_EQ(run({"check", "--solution", temp_file("garbage.json", "{}").string()}).code, 1);
}

TEST(Cli, ScanCurvesCrossAtMaximum) {
    const CliRun r = run({"scan", "--config", kConfig, "--b-min", "0", "--b-max", "0.5", "--steps", "200"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(r.out);
    ASSERT_EQ(rows.size(), 201u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"b", "A_S", "theta_S", "g_S", "r_S"}));
    std::size_t peak = 1;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (std::stod(rows[i][1]) > std::stod(rows[peak][1])) peak = i;
    }
    // A_S - theta_S changes sign within one step of the A_S peak
    const auto gap = [&](std::size_t i) { return std::stod(rows[i][1]) - std::stod(rows[i][2]); };
    bool crossed = false;
    for (std::size_t i = std::max<std::size_t>(peak, 2) - 1; i <= std::min(peak + 1, rows.size() - 1); ++i) {
        if (i > 1 && (gap(i - 1) > 0) != (gap(i) > 0)) crossed = true;
    }
    EXPECT_TRUE(crossed) << "peak row " << peak;
    EXPECT_EQ(run({"scan", "--config", kConfig, "--steps", "1"}).code, 1);
}

TEST(Cli, VerifyPassesAtOptimumAndFailsOtherwise) {
    const CliRun ok = run({"verify", "--config", kConfig, "--points", "100"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    const auto rows = read_csv(ok.out);
    ASSERT_EQ(rows.size(), 101u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "V", "V1", "V2", "hjb_residual"}));
    EXPECT_NE(ok.err.find("PASS"), std::string::npos);

    const CliRun bad = run({"verify", "--config", kConfig, "--points", "100", "--b", "0.52"});
    EXPECT_EQ(bad.code, 1);
    EXPECT_NE(bad.err.find("HJB"), std::string::npos);
}

TEST(Cli, RejectsZeroVolatility) {
    const fs::path cfg = temp_file("flat.cfg", "c = 2\nsigma = 0\nq = 4\ndelta = 1.8\nS = 0.05\n[jump]\nlambda = 1\np = 0.5\n");
    const CliRun r = run({"solve", "--config", cfg.string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("sigma"), std::string::npos);
}

TEST(Cli, InputErrorsExitOne) {
    EXPECT_EQ(run({"solve", "--config", "/nonexistent.cfg"}).code, 1);
    EXPECT_EQ(run({"solve"}).code, 1);
    EXPECT_EQ(run({"bogus"}).code, 1);
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"simulate", "--config", kConfig, "--dt", "0.5"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, SimulateAndCompareEmitJson) {
    const fs::path dump = temp_file("paths.csv");
    const CliRun s = run({"simulate", "--config", kConfig, "--paths", "200", "--dt", "5e-3", "--seed", "3", "--paths-csv",
                       dump.string()});
    ASSERT_EQ(s.code, 0) << s.err;
    const auto j = nlohmann::ordered_json::parse(s.out);
    EXPECT_EQ(j["outcome"]["n_paths"], 200);
    EXPECT_TRUE(j.contains("analytic_value"));
    std::ifstream in(dump);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "path_id,ruin_time,class,discounted_dividends");

    const CliRun c = run({"compare", "--config", kConfig, "--paths", "200", "--dt", "5e-3", "--thresholds", "0,0.5"});
    ASSERT_EQ(c.code, 0) << c.err;
    const auto cj = nlohmann::ordered_json::parse(c.out);
    EXPECT_EQ(cj["strategies"].size(), 3u);  // b* is added as the reference
    EXPECT_NEAR(cj["reference_b"].get<double>(), 0.0192850083, 1e-10);
}
