// Command-line front end: Monte Carlo error tables, convergence studies,
// operational-matrix dumps and Brownian path dumps. All output is CSV.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsvie/wsvie.hpp"

namespace fs = std::filesystem;
using namespace wsvie;

namespace {

struct RunConfig {
    std::optional<int> example;
    std::optional<std::string> problem_file;
    std::size_t m = 16;
    std::size_t trials = 50;
    std::uint64_t seed = 42;
    std::string out = ".";
    bool oracle = false;
    bool dump_paths = false;
    unsigned threads = 0;
    std::vector<std::size_t> resolutions{8, 16, 32, 64, 128};
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WSVIE_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::invalid_argument(std::string("WSVIE_SEED is not an integer: '") + env + "'");
        }
    }
    return 42;
}

void check_resolution(std::size_t m) {
    if (m < 2 || m > 4096 || (m & (m - 1)) != 0)
        throw std::invalid_argument("--m must be a power of two in [2, 4096], got " +
                                    std::to_string(m));
}

ProblemSpec load_problem(const RunConfig& cfg) {
    if (cfg.example.has_value() == cfg.problem_file.has_value())
        throw std::invalid_argument("exactly one of --example and --problem is required");
    if (cfg.example) return builtin_example(*cfg.example);
    return parse_problem_file(*cfg.problem_file);
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    std::cout << "wrote " << path.string() << '\n';
    return out;
}

std::string stem(const ProblemSpec& p, std::size_t m) {
    return p.label + "_m" + std::to_string(m);
}

void write_path(const fs::path& file, const BrownianPath& path) {
    auto out = open_output(file);
    static constexpr std::string_view cols[] = {"t", "B"};
    csv::header(out, cols);
    const auto b = path.values();
    for (std::size_t j = 0; j < b.size(); ++j) {
        const double r[] = {path.time(j), b[j]};
        csv::row(out, r);
    }
}

int cmd_run(const RunConfig& rc) {
    check_resolution(rc.m);
    const ProblemSpec problem = load_problem(rc);
    if (!problem.exact)
        throw std::invalid_argument("problem '" + problem.label +
                                    "' has no exact solution; `run` needs one");
    const auto cfg = BasisConfig::from_resolution(rc.m);
    fs::create_directories(rc.out);
    const fs::path dir(rc.out);

    ExperimentOptions opts;
    opts.threads = rc.threads;
    const MonteCarloReport report = monte_carlo(problem, cfg, rc.trials, rc.seed, opts);
    for (const auto& msg : report.failure_messages) std::cerr << "warning: " << msg << '\n';

    {
        auto out = open_output(dir / ("stats_" + stem(problem, rc.m) + ".csv"));
        static constexpr std::string_view cols[] = {"t",        "mean",        "sd",      "ci_lower",
                                                    "ci_upper", "n_effective", "failures"};
        csv::header(out, cols);
        for (const auto& s : report.stats) {
            out << csv::number(s.t) << ',' << csv::number(s.mean) << ',' << csv::number(s.sd) << ','
                << csv::number(s.ci_lower) << ',' << csv::number(s.ci_upper) << ',' << s.n << ','
                << report.failures << '\n';
        }
    }

    // Per-trial solutions: the first successful trial gets a full solution
    // table, every successful trial contributes its coefficient error norm.
    auto coef = open_output(dir / ("coefnorm_" + stem(problem, rc.m) + ".csv"));
    coef << "trial,coef_err_inf\n";
    bool solution_written = false;
    for (std::size_t trial = 1; trial <= rc.trials; ++trial) {
        const BrownianPath path = sample_trial_path(cfg, rc.seed, trial);
        if (rc.dump_paths)
            write_path(dir / ("path_" + stem(problem, rc.m) + "_trial" + std::to_string(trial) +
                              ".csv"),
                       path);
        SolveResult result;
        try {
            result = solve(problem, path, cfg, opts.solver);
        } catch (const NonConvergence&) {
            continue;
        } catch (const NonFiniteIterate&) {
            continue;
        }
        coef << trial << ',' << csv::number(solution_coefficient_error(result, problem, path, cfg))
             << '\n';
        if (solution_written) continue;
        solution_written = true;

        auto out = open_output(dir / ("solution_" + stem(problem, rc.m) + ".csv"));
        std::vector<std::string_view> cols{"t", "x_m", "exact"};
        std::optional<OracleResult> em;
        if (rc.oracle) {
            cols.push_back("em_oracle");
            em = euler_maruyama(problem, path, cfg);
        }
        csv::header(out, cols);
        for (std::size_t j = 0; j < rc.m; ++j) {
            const double t = cfg.midpoint(j);
            std::vector<double> r{t, result.x_colloc[j], (*problem.exact)(t, path.at_midpoint(j))};
            if (em) r.push_back(em->midpoint_values[j]);
            csv::row(out, r);
        }
    }
    return 0;
}

int cmd_converge(const RunConfig& rc) {
    for (auto m : rc.resolutions) check_resolution(m);
    const ProblemSpec problem = load_problem(rc);
    ExperimentOptions opts;
    opts.threads = rc.threads;
    const auto report = convergence_study(problem, rc.resolutions, rc.trials, rc.seed, opts);

    fs::create_directories(rc.out);
    const fs::path dir(rc.out);
    {
        auto out = open_output(dir / ("converge_" + problem.label + ".csv"));
        out << "m,h,rms_error,n_effective,failures\n";
        for (std::size_t i = 0; i < report.resolutions.size(); ++i) {
            const auto m = report.resolutions[i];
            out << m << ',' << csv::number(1.0 / static_cast<double>(m)) << ','
                << csv::number(report.rms_errors[i]) << ',' << report.effective_trials[i] << ','
                << report.failures[i] << '\n';
        }
    }
    auto out = open_output(dir / ("converge_" + problem.label + "_order.csv"));
    out << "estimated_order\n";
    if (report.estimated_order) {
        out << csv::number(*report.estimated_order) << '\n';
        std::cout << "estimated order: " << csv::number(*report.estimated_order) << '\n';
    } else {
        out << "undefined\n";
        std::cout << "estimated order: undefined (errors at solver tolerance)\n";
    }
    return 0;
}

int cmd_matrices(const RunConfig& rc) {
    check_resolution(rc.m);
    const auto cfg = BasisConfig::from_resolution(rc.m);
    const WalshMatrix tw(cfg);
    const BrownianPath path = sample_trial_path(cfg, rc.seed, 1);
    const Matrix P = IntegrationMatrix(cfg).to_matrix();
    const Matrix PS = StochasticMatrix(path, cfg).to_matrix();
    const std::pair<const char*, Matrix> blocks[] = {
        {"T_W", tw.to_matrix()},
        {"P", P},
        {"P_S", PS},
        {"Lambda", walsh_domain(P, tw)},
        {"Lambda_S", walsh_domain(PS, tw)},
    };
    if (rc.out.empty()) {
        for (const auto& [name, M] : blocks) {
            std::cout << "# " << name << '\n';
            csv::matrix(std::cout, M);
        }
        return 0;
    }
    fs::create_directories(rc.out);
    for (const auto& [name, M] : blocks) {
        auto out = open_output(fs::path(rc.out) / (std::string(name) + "_m" + std::to_string(rc.m) +
                                                   ".csv"));
        csv::matrix(out, M);
    }
    return 0;
}

int cmd_paths(const RunConfig& rc) {
    check_resolution(rc.m);
    const auto cfg = BasisConfig::from_resolution(rc.m);
    fs::create_directories(rc.out);
    for (std::size_t trial = 1; trial <= rc.trials; ++trial)
        write_path(fs::path(rc.out) / ("path_m" + std::to_string(rc.m) + "_trial" +
                                       std::to_string(trial) + ".csv"),
                   sample_trial_path(cfg, rc.seed, trial));
    return 0;
}

void add_problem_options(CLI::App* cmd, RunConfig& rc) {
    auto* ex = cmd->add_option("--example", rc.example, "built-in example id (1 or 2)");
    auto* pf = cmd->add_option("--problem", rc.problem_file, "problem definition file")
                   ->check(CLI::ExistingFile);
    ex->excludes(pf);
    pf->excludes(ex);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Walsh collocation solver for nonlinear stochastic Volterra integral equations"};
    app.require_subcommand(1);
    RunConfig rc;
    try {
        rc.seed = default_seed();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    auto* run = app.add_subcommand("run", "Monte Carlo error statistics for one resolution");
    add_problem_options(run, rc);
    run->add_option("--m", rc.m, "resolution (power of two, 2..4096)");
    run->add_option("--trials", rc.trials, "number of Brownian paths");
    run->add_option("--seed", rc.seed, "base seed (default: $WSVIE_SEED or 42)");
    run->add_option("--out", rc.out, "output directory");
    run->add_flag("--oracle", rc.oracle, "add Euler-Maruyama column to the solution CSV");
    run->add_flag("--dump-paths", rc.dump_paths, "write every trial's Brownian path");
    run->add_option("--threads", rc.threads, "worker threads (0: all cores)");

    auto* converge = app.add_subcommand("converge", "RMS error against resolution");
    add_problem_options(converge, rc);
    converge->add_option("--resolutions", rc.resolutions, "resolutions, increasing")->delimiter(',');
    converge->add_option("--trials", rc.trials, "paths per resolution");
    converge->add_option("--seed", rc.seed, "base seed (default: $WSVIE_SEED or 42)");
    converge->add_option("--out", rc.out, "output directory");
    converge->add_option("--threads", rc.threads, "worker threads (0: all cores)");

    auto* matrices = app.add_subcommand("matrices", "dump T_W, P, P_S, Lambda, Lambda_S");
    matrices->add_option("--m", rc.m, "resolution (power of two, 2..4096)");
    matrices->add_option("--seed", rc.seed, "seed of the path behind P_S");
    matrices->add_option("--out", rc.out, "output directory (default: stdout)");

    auto* paths = app.add_subcommand("paths", "dump Brownian paths");
    paths->add_option("--m", rc.m, "resolution (power of two, 2..4096)");
    paths->add_option("--trials", rc.trials, "number of paths (default 1)");
    paths->add_option("--seed", rc.seed, "base seed (default: $WSVIE_SEED or 42)");
    paths->add_option("--out", rc.out, "output directory");

    // matrices prints to stdout unless --out is given
    matrices->preparse_callback([&rc](std::size_t) { rc.out.clear(); });
    paths->preparse_callback([&rc](std::size_t) { rc.trials = 1; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(rc);
        if (converge->parsed()) return cmd_converge(rc);
        if (matrices->parsed()) return cmd_matrices(rc);
        if (paths->parsed()) return cmd_paths(rc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
