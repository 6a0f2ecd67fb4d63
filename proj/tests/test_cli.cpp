#include "mcpope/cli.hpp"
#include "mcpope/config.hpp"
#include "mcpope/io.hpp"
#include "mcpope/optimizer.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mcpope;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("mcpope_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }

    fs::path write(const std::string& name, const std::string& content) const
    {
        const fs::path p = path_ / name;
        std::ofstream(p) << content;
        return p;
    }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string>& args)
{
    std::ostringstream out;
    std::ostringstream err;
    const int code = main_entry(args, out, err);
    return {code, out.str(), err.str()};
}

constexpr const char* kCovariance = "0.16,0,0\n0,0.04,0\n0,0,0.09\n";

} // namespace

TEST_CASE("parse sample flags")
{
    const RunConfig c = parse_config({"sample", "--method", "gap", "-n", "4", "-k", "250", "--seed", "9"});
    CHECK(c.command == Command::Sample);
    CHECK(c.method == SamplingMethod::Gap);
    CHECK(c.n_assets == 4);
    CHECK(c.base_samples == 250);
    CHECK(c.seed == 9);
    CHECK(c.workers == 1);
    CHECK(c.bias_depth == 5);
}

TEST_CASE("parse optimize flags")
{
    TempDir dir;
    const fs::path data = dir.write("x.csv", "1,2\n3,4\n");
    const RunConfig c = parse_config({"optimize", "--scenarios", data.string(), "--risk", "cvar:0.05",
                                      "--workers", "4", "--bias-depth", "3", "--no-baseline"});
    CHECK(c.command == Command::Optimize);
    CHECK(c.scenarios_path == data);
    CHECK(std::get<ConditionalValueAtRisk>(*c.risk).tail == 0.05);
    CHECK(c.workers == 4);
    CHECK(c.bias_depth == 3);
    CHECK_FALSE(c.include_equal_weight_baseline);
}

TEST_CASE("parse errors are usage errors")
{
    CHECK_THROWS_WITH_AS(parse_config({"optimize", "--scenarios", "x.csv", "--risk", "omega:"}),
                         doctest::Contains("field 'b'"), std::exception);
    CHECK_THROWS_AS(parse_config({"sample", "--bogus"}), UsageError);
    CHECK_THROWS_AS(parse_config({"frobnicate"}), UsageError);
    CHECK_THROWS_AS(parse_config({}), UsageError);
    CHECK_THROWS_AS(parse_config({"sample", "-n", "three"}), UsageError);
    CHECK_THROWS_AS(parse_config({"optimize", "--risk", "cvar:0.05"}), UsageError);
    CHECK_THROWS_AS(parse_config({"reproduce", "table7"}), std::exception);
}

TEST_CASE("config document values yield to flags")
{
    TempDir dir;
    dir.write("x.csv", "1,2\n3,4\n-1,0\n");
    const fs::path cfg = dir.write("run.cfg", "# run settings\n"
                                              "command = optimize\n"
                                              "scenarios = x.csv\n"
                                              "risk = var:0.1\n"
                                              "seed = 5\n"
                                              "workers = 3\n");
    const RunConfig from_file = parse_config({"optimize", "--config", cfg.string()});
    CHECK(from_file.seed == 5);
    CHECK(from_file.workers == 3);
    CHECK(from_file.scenarios_path == dir / "x.csv");
    CHECK(std::get<ValueAtRisk>(*from_file.risk).tail == 0.1);

    const RunConfig overridden = parse_config({"optimize", "--config", cfg.string(), "--seed", "8"});
    CHECK(overridden.seed == 8);
    CHECK(overridden.workers == 3);

    const fs::path bad = dir.write("bad.cfg", "sede = 5\n");
    CHECK_THROWS_AS(parse_config({"optimize", "--config", bad.string()}), UsageError);
}

TEST_CASE("constraint and distribution documents")
{
    std::istringstream text("lower = 0.2, 0, 0\n"
                            "upper = 1, 0.5, 1\n"
                            "linear = 0, 1, 1.1 >= 0.5\n"
                            "linear = 1, 1, 0 <= 0.9\n");
    const ConstraintSet c = parse_constraints(ConfigDocument::parse(text));
    CHECK(*c.lower_bounds == Eigen::Vector3d(0.2, 0, 0));
    CHECK(*c.upper_bounds == Eigen::Vector3d(1, 0.5, 1));
    REQUIRE(c.linear_inequalities.size() == 2);
    CHECK(c.linear_inequalities[1].coefficients == Eigen::Vector3d(-1, -1, 0));
    CHECK(c.linear_inequalities[1].bound == -0.9);

    std::istringstream broken("linear = 1, 2, 3\n");
    CHECK_THROWS_AS(parse_constraints(ConfigDocument::parse(broken)), FormatError);

    TempDir dir;
    dir.write("cov.csv", kCovariance);
    const fs::path d = dir.write("dist.cfg", "kind = gaussian\nmean = 0.1, 0.2, 0.3\ncovariance = cov.csv\n");
    const auto spec = parse_distribution(ConfigDocument::load(d));
    const auto& g = std::get<GaussianModel>(spec);
    CHECK(g.mean == Eigen::Vector3d(0.1, 0.2, 0.3));
    CHECK(g.covariance(0, 0) == 0.16);

    std::istringstream unknown("kind = cauchy\n");
    CHECK_THROWS_AS(parse_distribution(ConfigDocument::parse(unknown)), FormatError);
}

TEST_CASE("sample is byte-for-byte deterministic")
{
    TempDir dir;
    const auto a = invoke({"sample", "-n", "5", "-k", "300", "--seed", "42", "-o", (dir / "a.csv").string()});
    const auto b = invoke({"sample", "-n", "5", "-k", "300", "--seed", "42", "-o", (dir / "b.csv").string()});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    const Eigen::MatrixXd w = read_csv_matrix(dir / "a.csv");
    CHECK(w.rows() == 300 * 6);
    CHECK(w.cols() == 5);

    const auto c = invoke({"sample", "-n", "5", "-k", "300", "--seed", "43"});
    CHECK(c.code == 0);
    CHECK(c.out != slurp(dir / "a.csv"));
}

TEST_CASE("simulate then optimize over the saved scenarios")
{
    TempDir dir;
    dir.write("cov.csv", kCovariance);
    const fs::path dist = dir.write("dist.cfg", "kind = gaussian\nmean = 0, 0, 0\ncovariance = cov.csv\n");
    const fs::path scenarios = dir / "scen.csv";
    REQUIRE(invoke({"simulate", "--distribution", dist.string(), "--count", "2000", "--seed", "3", "-o",
                    scenarios.string()})
                .code == 0);
    CHECK(read_csv_matrix(scenarios).rows() == 2000);

    const fs::path result = dir / "result.json";
    const auto run = invoke({"optimize", "--scenarios", scenarios.string(), "--risk", "variance", "-k",
                             "400", "--workers", "2", "-o", result.string()});
    REQUIRE(run.code == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(result));
    const auto w = j["weights"].get<std::vector<double>>();
    REQUIRE(w.size() == 3);

    const auto loaded = std::make_shared<const ScenarioMatrix>(load_scenarios(scenarios));
    SamplerConfig sampler;
    sampler.n_assets = 3;
    const OptimizationProblem problem{Distributional{loaded, VarianceOnly{}}, {}, sampler};
    const Weights parsed = Eigen::Map<const Eigen::VectorXd>(w.data(), 3);
    CHECK(std::abs(objective_value(problem, parsed) - j["risk"].get<double>()) <= 1e-12);
    CHECK(j["worker_count"] == 2);
    CHECK(j["risk_spec"] == "variance");
}

TEST_CASE("optimize on an analytic covariance")
{
    TempDir dir;
    const fs::path cov = dir.write("cov.csv", kCovariance);
    const auto run = invoke({"optimize", "--covariance", cov.string(), "-k", "5000"});
    REQUIRE(run.code == 0);
    const nlohmann::json j = nlohmann::json::parse(run.out);
    const auto w = j["weights"].get<std::vector<double>>();
    // Inverse-variance weights are proportional to 1/0.16, 1/0.04, 1/0.09.
    const double total = 1 / 0.16 + 1 / 0.04 + 1 / 0.09;
    CHECK(std::abs(w[1] - (1 / 0.04) / total) < 0.01);
}

TEST_CASE("diagnose writes the stability report")
{
    TempDir dir;
    dir.write("cov.csv", kCovariance);
    const fs::path dist = dir.write("dist.cfg", "kind = gaussian\nmean = 0, 0, 0\ncovariance = cov.csv\n");
    const auto run = invoke({"diagnose", "--distribution", dist.string(), "--count", "5000", "-k", "500"});
    REQUIRE(run.code == 0);
    const nlohmann::json j = nlohmann::json::parse(run.out);
    CHECK(j["computations"].size() == 5);
    CHECK(j.contains("covariance_delta"));
    CHECK(j["degenerate_scenarios"] == false);
}

TEST_CASE("exit codes")
{
    CHECK(invoke({"sample", "-n", "3", "-k", "5"}).code == 0);
    const auto usage = invoke({"sample", "--bogus"});
    CHECK(usage.code == 2);
    CHECK_FALSE(usage.err.empty());
    CHECK(invoke({"optimize", "--scenarios", "/nonexistent/x.csv", "--risk", "variance"}).code == 2);
    CHECK(invoke({"--help"}).code == 0);

    TempDir dir;
    const fs::path c = dir.write("c.cfg", "lower = 0.6, 0.6, 0\n");
    const auto infeasible = invoke({"sample", "-n", "3", "-k", "50", "--constraints", c.string()});
    CHECK(infeasible.code == 2);
}

TEST_CASE("reproduce reports rows and a failing row gives exit code one")
{
    TempDir dir;
    const auto ok = invoke({"reproduce", "pathological6", "--json", (dir / "p.json").string()});
    CHECK(ok.code == 0);
    CHECK(ok.out.rfind("quantity,paper_value,computed_value,abs_diff,tolerance,pass\n", 0) == 0);
    const nlohmann::json results = nlohmann::json::parse(slurp(dir / "p.json"));
    CHECK(results.is_array());
    CHECK(results.at(0).contains("weights"));

    const auto starved = invoke({"reproduce", "table1", "-k", "3", "--bias-depth", "0", "--workers", "1"});
    CHECK(starved.code == 1);
    CHECK(starved.out.find(",false") != std::string::npos);
}

TEST_CASE("installed executable")
{
    const char* exe = std::getenv("MCPOPE_CLI");
    if (!exe)
        return;
    TempDir dir;
    const fs::path out = dir / "w.csv";
    const std::string command = std::string(exe) + " sample -n 3 -k 20 --seed 1 -o " + out.string();
    CHECK(std::system(command.c_str()) == 0);
    CHECK(read_csv_matrix(out).rows() == 120);
    CHECK(std::system((std::string(exe) + " sample --bogus 2>/dev/null").c_str()) != 0);
}
