#include "mcpope/cli.hpp"

#include "mcpope/config.hpp"
#include "mcpope/io.hpp"
#include "mcpope/optimizer.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace mcpope {

namespace {

struct HelpRequested {
    std::string text;
};

/// Raw text of one setting and where it came from, so messages can name the source.
struct Setting {
    std::string value;
    std::string source;
};

class Settings {
public:
    void add_flag_value(const std::string& key, const std::optional<std::string>& value,
                        const std::string& flag)
    {
        if (value)
            values_[key] = {*value, flag};
    }

    void add_document(const ConfigDocument& document, const std::string& name)
    {
        document_ = &document;
        for (const auto& [key, value] : document.entries())
            if (!flagged(key))
                values_[key] = {value, name + ": " + key};
    }

    bool flagged(const std::string& key) const
    {
        auto it = values_.find(key);
        return it != values_.end() && it->second.source.rfind("--", 0) == 0;
    }

    const Setting* find(const std::string& key) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    /// Paths given in a config document resolve against the document's directory.
    std::filesystem::path path(const Setting& s) const
    {
        if (document_ && s.source.rfind("--", 0) != 0)
            return document_->resolve(s.value);
        return s.value;
    }

    std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const
    {
        std::vector<std::string> unknown;
        for (const auto& [key, s] : values_)
            if (std::find(known.begin(), known.end(), key) == known.end())
                unknown.push_back(s.source);
        return unknown;
    }

private:
    std::map<std::string, Setting> values_;
    const ConfigDocument* document_ = nullptr;
};

template <typename T>
T parse_integer(const Setting& s)
{
    T value{};
    const char* first = s.value.data();
    const char* last = first + s.value.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw UsageError(s.source + ": expected an integer, got '" + s.value + "'");
    return value;
}

double parse_number(const Setting& s)
{
    try {
        return parse_double(s.value);
    } catch (const std::exception&) {
        throw UsageError(s.source + ": expected a number, got '" + s.value + "'");
    }
}

bool parse_bool(const Setting& s)
{
    if (s.value == "true" || s.value == "1" || s.value == "yes")
        return true;
    if (s.value == "false" || s.value == "0" || s.value == "no")
        return false;
    throw UsageError(s.source + ": expected true or false, got '" + s.value + "'");
}

Command parse_command(const std::string& name)
{
    if (name == "sample")
        return Command::Sample;
    if (name == "simulate")
        return Command::Simulate;
    if (name == "optimize")
        return Command::Optimize;
    if (name == "diagnose")
        return Command::Diagnose;
    if (name == "reproduce")
        return Command::Reproduce;
    throw UsageError("unknown command '" + name +
                     "' (expected sample, simulate, optimize, diagnose or reproduce)");
}

const std::vector<std::string> kKnownKeys{
    "command",  "case",      "seed",       "workers",     "base_samples", "bias_depth",
    "risk",     "scenarios", "distribution", "constraints", "output",     "json",
    "header",   "method",    "n_assets",   "count",       "quantile",     "covariance",
    "returns",  "baseline",  "even_pool",
};

void apply(RunConfig& config, const Settings& settings)
{
    auto get = [&](const std::string& key) { return settings.find(key); };

    if (auto s = get("seed"))
        config.seed = parse_integer<std::uint64_t>(*s);
    if (auto s = get("workers")) {
        config.workers = parse_integer<int>(*s);
        config.workers_given = true;
        if (config.workers < 1)
            throw UsageError(s->source + ": workers must be >= 1");
    }
    if (auto s = get("base_samples")) {
        config.base_samples = parse_integer<Index>(*s);
        config.base_samples_given = true;
        if (config.base_samples < 1)
            throw UsageError(s->source + ": base samples must be >= 1");
    }
    if (auto s = get("bias_depth")) {
        config.bias_depth = parse_integer<int>(*s);
        config.bias_depth_given = true;
        if (config.bias_depth < 0 || config.bias_depth > kMaxBiasDepth)
            throw UsageError(s->source + ": bias depth must be in [0, " +
                             std::to_string(kMaxBiasDepth) + "]");
    }
    if (auto s = get("count")) {
        config.scenario_count = parse_integer<Index>(*s);
        config.scenario_count_given = true;
        if (config.scenario_count < 2)
            throw UsageError(s->source + ": scenario count must be >= 2");
    }
    if (auto s = get("n_assets")) {
        config.n_assets = parse_integer<Index>(*s);
        if (config.n_assets < 1)
            throw UsageError(s->source + ": asset count must be >= 1");
    }
    if (auto s = get("method")) {
        try {
            config.method = parse_sampling_method(s->value);
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
    if (auto s = get("risk")) {
        try {
            config.risk = parse_risk_spec(s->value);
            validate(*config.risk);
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
    if (auto s = get("quantile")) {
        config.quantile = parse_number(*s);
        if (!(*config.quantile > 0.0 && *config.quantile < 1.0))
            throw UsageError(s->source + ": quantile must be in (0, 1)");
    }
    if (auto s = get("returns")) {
        try {
            config.expected_returns = parse_vector(s->value);
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
    if (auto s = get("header"))
        config.header = parse_bool(*s);
    if (auto s = get("baseline"))
        config.include_equal_weight_baseline = parse_bool(*s);
    if (auto s = get("even_pool"))
        config.include_even_pool = parse_bool(*s);

    if (auto s = get("scenarios"))
        config.scenarios_path = settings.path(*s);
    if (auto s = get("covariance"))
        config.covariance_path = settings.path(*s);
    if (auto s = get("output"))
        config.output_path = settings.path(*s);
    if (auto s = get("json"))
        config.json_path = settings.path(*s);
    if (auto s = get("distribution")) {
        try {
            config.distribution = parse_distribution(ConfigDocument::load(settings.path(*s)));
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
    if (auto s = get("constraints")) {
        try {
            config.constraints = parse_constraints(ConfigDocument::load(settings.path(*s)));
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
    if (auto s = get("case")) {
        try {
            config.reproduce_case = parse_reproduce_case(s->value);
        } catch (const std::exception& e) {
            throw UsageError(s->source + ": " + e.what());
        }
    }
}

void check_required(const RunConfig& config)
{
    switch (config.command) {
    case Command::Sample:
        if (config.n_assets < 1)
            throw UsageError("sample: -n <assets> is required");
        break;
    case Command::Simulate:
        if (!config.distribution)
            throw UsageError("simulate: --distribution <cfg> is required");
        break;
    case Command::Optimize:
        if (!config.scenarios_path && !config.distribution && !config.covariance_path)
            throw UsageError(
                "optimize: one of --scenarios, --distribution or --covariance is required");
        if ((config.scenarios_path || config.distribution) && !config.risk)
            throw UsageError("optimize: --risk <spec> is required with scenarios");
        break;
    case Command::Diagnose:
        if (!config.scenarios_path && !config.distribution)
            throw UsageError("diagnose: --scenarios or --distribution is required");
        if (!config.covariance_path &&
            !(config.distribution && std::holds_alternative<GaussianModel>(*config.distribution)))
            throw UsageError(
                "diagnose: --covariance is required unless the distribution is gaussian");
        break;
    case Command::Reproduce:
        if (!config.reproduce_case)
            throw UsageError("reproduce: a case name is required (table1, constrained3, "
                             "pathological6, ru-cvar or omega-admn)");
        break;
    }
}

// ---------------------------------------------------------------------------

class OutputTarget {
public:
    OutputTarget(const std::optional<std::filesystem::path>& path, std::ostream& fallback)
    {
        if (path) {
            file_.open(*path, std::ios::binary);
            if (!file_)
                throw std::runtime_error("cannot write '" + path->string() + "'");
        }
        stream_ = path ? static_cast<std::ostream*>(&file_) : &fallback;
    }
    std::ostream& stream() { return *stream_; }
    void finish()
    {
        stream_->flush();
        if (!*stream_)
            throw std::runtime_error("write failed");
    }

private:
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

void write_matrix(const RunConfig& config, const Eigen::MatrixXd& matrix, std::ostream& out)
{
    OutputTarget target(config.output_path, out);
    write_csv_matrix(target.stream(), matrix,
                     config.header ? asset_labels(matrix.cols()) : std::vector<std::string>{});
    target.finish();
}

void write_json(const std::optional<std::filesystem::path>& path, const nlohmann::json& document,
                std::ostream& out)
{
    OutputTarget target(path, out);
    target.stream() << document.dump(2) << '\n';
    target.finish();
}

std::shared_ptr<const ScenarioMatrix> scenarios_for(const RunConfig& config)
{
    if (config.scenarios_path)
        return std::make_shared<const ScenarioMatrix>(load_scenarios(*config.scenarios_path));
    return std::make_shared<const ScenarioMatrix>(
        realize(*config.distribution, config.scenario_count, config.seed));
}

SamplerConfig sampler_for(const RunConfig& config, Index n_assets)
{
    SamplerConfig sampler;
    sampler.n_assets = n_assets;
    sampler.base_count = config.base_samples;
    sampler.bias_depth = config.bias_depth;
    sampler.seed = config.seed;
    sampler.validate();
    return sampler;
}

/// lambda and R of a variance-type risk spec; other specs are rejected.
std::pair<double, std::optional<Weights>> quadratic_terms(const RunConfig& config)
{
    double lambda = 0.0;
    std::optional<Weights> returns = config.expected_returns;
    if (config.risk) {
        if (const auto* mv = std::get_if<MeanVariance>(&*config.risk)) {
            lambda = mv->lambda;
            if (!returns)
                returns = mv->expected_returns;
        } else if (!std::holds_alternative<VarianceOnly>(*config.risk)) {
            throw std::invalid_argument("--covariance supports only mv:<lambda> or variance risk");
        }
    }
    if (lambda != 0.0 && !returns)
        throw std::invalid_argument("mv with nonzero lambda needs --returns");
    return {lambda, returns};
}

Eigen::MatrixXd load_covariance(const std::filesystem::path& path)
{
    return read_csv_matrix(path);
}

int run_sample(const RunConfig& config, std::ostream& out)
{
    const SamplerConfig sampler = sampler_for(config, config.n_assets);
    WeightBatch batch = sample(config.method, sampler);
    if (!config.constraints.empty())
        batch = filter_constraints(batch, config.constraints).accepted;
    write_matrix(config, batch, out);
    return 0;
}

int run_simulate(const RunConfig& config, std::ostream& out)
{
    const ScenarioMatrix scenarios = realize(*config.distribution, config.scenario_count, config.seed);
    write_matrix(config, scenarios.returns(), out);
    return 0;
}

int run_optimize(const RunConfig& config, std::ostream& out)
{
    std::optional<ObjectiveSource> objective;
    Index n_assets = 0;
    if (config.scenarios_path || config.distribution) {
        auto scenarios = scenarios_for(config);
        n_assets = scenarios->asset_count();
        RiskSpec risk = *config.risk;
        if (auto* mv = std::get_if<MeanVariance>(&risk); mv && config.expected_returns)
            mv->expected_returns = config.expected_returns;
        objective = Distributional{std::move(scenarios), std::move(risk)};
    } else {
        CovarianceSpec covariance(load_covariance(*config.covariance_path));
        n_assets = covariance.size();
        auto [lambda, returns] = quadratic_terms(config);
        objective = AnalyticQuadratic{std::move(covariance), lambda, std::move(returns)};
    }
    OptimizationProblem problem{std::move(*objective), config.constraints,
                                sampler_for(config, n_assets)};
    problem.include_equal_weight_baseline = config.include_equal_weight_baseline;
    problem.include_even_pool = config.include_even_pool;
    const OptimizationResult result = run_workers(problem, config.workers, config.seed);
    write_json(config.output_path, to_json(result, risk_spec_text(problem)), out);
    return 0;
}

int run_diagnose(const RunConfig& config, std::ostream& out)
{
    Eigen::MatrixXd input;
    if (config.covariance_path)
        input = load_covariance(*config.covariance_path);
    else
        input = std::get<GaussianModel>(*config.distribution).covariance;
    const CovarianceSpec covariance(std::move(input));
    auto scenarios = scenarios_for(config);
    auto [lambda, returns] = quadratic_terms(config);

    StabilityOptions options;
    options.workers = config.workers;
    options.master_seed = config.seed;
    options.include_equal_weight_baseline = config.include_equal_weight_baseline;
    const StabilityReport report =
        stability_diagnostics(covariance, lambda, returns, std::move(scenarios),
                              sampler_for(config, covariance.size()), config.constraints, options);
    write_json(config.output_path, to_json(report), out);
    return 0;
}

int run_reproduce(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    ReproduceOptions options;
    options.seed = config.seed;
    if (config.workers_given)
        options.workers = config.workers;
    if (config.base_samples_given)
        options.base_samples = config.base_samples;
    if (config.bias_depth_given)
        options.bias_depth = config.bias_depth;
    if (config.scenario_count_given)
        options.scenario_count = config.scenario_count;
    options.quantile = config.quantile;

    const ReproduceOutcome outcome = reproduce(*config.reproduce_case, options);
    {
        OutputTarget target(config.output_path, out);
        write_comparison_csv(target.stream(), outcome.rows);
        target.finish();
    }
    if (config.json_path)
        write_json(config.json_path, outcome.results, out);

    std::size_t passed = 0;
    for (const auto& row : outcome.rows)
        passed += row.pass() ? 1 : 0;
    err << to_string(*config.reproduce_case) << ": " << passed << "/" << outcome.rows.size()
        << " rows within tolerance\n";
    return outcome.all_pass() ? 0 : 1;
}

} // namespace

std::string_view to_string(Command command)
{
    switch (command) {
    case Command::Sample:
        return "sample";
    case Command::Simulate:
        return "simulate";
    case Command::Optimize:
        return "optimize";
    case Command::Diagnose:
        return "diagnose";
    case Command::Reproduce:
        return "reproduce";
    }
    return "unknown";
}

RunConfig parse_config(const std::vector<std::string>& args)
{
    CLI::App app{"Monte Carlo portfolio optimization over the long-only simplex", "mcpope"};
    app.require_subcommand(0, 1);

    std::map<std::string, std::optional<std::string>> raw;
    std::vector<std::pair<std::string, std::string>> flag_names;
    auto value = [&](CLI::App* sub, const std::string& names, const std::string& key,
                     const std::string& description) {
        auto* option = sub->add_option(names, raw[key], description);
        flag_names.emplace_back(key, option->get_name());
    };
    bool header = false;
    bool no_baseline = false;
    bool even_pool = false;
    std::optional<std::string> config_path;
    std::optional<std::string> case_name;

    auto add_common = [&](CLI::App* sub) {
        value(sub, "--seed", "seed", "Master seed (default 0)");
        value(sub, "--workers", "workers", "Independent searches (default 1)");
        value(sub, "-k,--base-samples", "base_samples", "Base candidates per search (default 10000)");
        value(sub, "--bias-depth", "bias_depth", "Edge-vertex bias depth P (default 5)");
        value(sub, "--output,-o", "output", "Output path (default stdout)");
        sub->add_option("--config", config_path, "key = value document supplying defaults");
    };
    auto add_inputs = [&](CLI::App* sub) {
        value(sub, "--risk", "risk",
              "mv:<lambda>, variance, var:<u>, cvar:<u>, sharpe:<b>, omega:<b>, phi:<b>,<p>,<q>");
        value(sub, "--scenarios", "scenarios", "Scenario matrix CSV (J x N)");
        value(sub, "--distribution", "distribution", "Distribution config document");
        value(sub, "--count,--scenarios-count", "count", "Scenarios to simulate (default 10000)");
        value(sub, "--covariance", "covariance", "Covariance CSV");
        value(sub, "--returns", "returns", "Expected returns, comma separated");
        value(sub, "--constraints", "constraints", "Constraint config document");
        sub->add_flag("--no-baseline", no_baseline, "Do not add the equal-weight portfolio");
        sub->add_flag("--even-pool", even_pool, "Add an unbiased pool of base_samples candidates");
    };

    auto* sample_cmd = app.add_subcommand("sample", "Write random portfolios as CSV");
    add_common(sample_cmd);
    value(sample_cmd, "--method", "method", "uniform-ratio, gap, order-statistics, exponential, ev");
    value(sample_cmd, "-n,--assets", "n_assets", "Number of assets");
    value(sample_cmd, "--constraints", "constraints", "Constraint config document");
    sample_cmd->add_flag("--header", header, "Write a header row");

    auto* simulate_cmd = app.add_subcommand("simulate", "Write a simulated scenario matrix as CSV");
    add_common(simulate_cmd);
    value(simulate_cmd, "--distribution", "distribution", "Distribution config document");
    value(simulate_cmd, "--count,--scenarios-count", "count", "Scenarios (default 10000)");
    simulate_cmd->add_flag("--header", header, "Write a header row");

    auto* optimize_cmd = app.add_subcommand("optimize", "Minimize a risk functional");
    add_common(optimize_cmd);
    add_inputs(optimize_cmd);

    auto* diagnose_cmd =
        app.add_subcommand("diagnose", "Compare analytic and Monte Carlo computations");
    add_common(diagnose_cmd);
    add_inputs(diagnose_cmd);

    auto* reproduce_cmd = app.add_subcommand("reproduce", "Re-run a reference experiment");
    add_common(reproduce_cmd);
    reproduce_cmd->add_option("case", case_name,
                              "table1, constrained3, pathological6, ru-cvar or omega-admn");
    value(reproduce_cmd, "--quantile", "quantile", "ru-cvar: run a single tail level");
    value(reproduce_cmd, "--count,--scenarios-count", "count", "Override the scenario count");
    value(reproduce_cmd, "--json", "json", "Also write the optimizer results as JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const auto subs = app.get_subcommands();
        throw HelpRequested{subs.empty() ? app.help() : subs.front()->help()};
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested{app.help("", CLI::AppFormatMode::All)};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    Settings settings;
    for (const auto& [key, name] : flag_names)
        settings.add_flag_value(key, raw[key], name);
    if (case_name)
        settings.add_flag_value("case", case_name, "--case");
    if (header)
        settings.add_flag_value("header", std::string("true"), "--header");
    if (no_baseline)
        settings.add_flag_value("baseline", std::string("false"), "--no-baseline");
    if (even_pool)
        settings.add_flag_value("even_pool", std::string("true"), "--even-pool");

    std::optional<ConfigDocument> document;
    if (config_path) {
        try {
            document = ConfigDocument::load(*config_path);
        } catch (const std::exception& e) {
            throw UsageError("--config: " + std::string(e.what()));
        }
        settings.add_document(*document, *config_path);
        if (auto unknown = settings.unknown_keys(kKnownKeys); !unknown.empty())
            throw UsageError(unknown.front() + ": unknown key");
    }

    RunConfig config;
    const auto subs = app.get_subcommands();
    if (!subs.empty())
        config.command = parse_command(subs.front()->get_name());
    else if (auto s = settings.find("command"))
        config.command = parse_command(s->value);
    else
        throw UsageError("a command is required (sample, simulate, optimize, diagnose or reproduce)");

    apply(config, settings);
    check_required(config);
    return config;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    switch (config.command) {
    case Command::Sample:
        return run_sample(config, out);
    case Command::Simulate:
        return run_simulate(config, out);
    case Command::Optimize:
        return run_optimize(config, out);
    case Command::Diagnose:
        return run_diagnose(config, out);
    case Command::Reproduce:
        return run_reproduce(config, out, err);
    }
    return 2;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    try {
        return run(parse_config(args), out, err);
    } catch (const HelpRequested& help) {
        out << help.text;
        return 0;
    } catch (const std::exception& e) {
        err << "mcpope: " << e.what() << '\n';
        return 2;
    }
}

} // namespace mcpope
