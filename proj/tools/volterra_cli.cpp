#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "volterra/runner.hpp"
#include "volterra/verify.hpp"

using namespace volterra;

namespace {

int cmd_verify(const VerifyOptions& o, const std::string& out_path) {
    std::printf("verify: seed %llu, %s\n", static_cast<unsigned long long>(o.seed), o.parallel ? "parallel" : "serial");
    const auto results = run_verify(o, [](const CriterionResult& r) {
        std::printf("%s\n", criterion_line(r).c_str());
        std::fflush(stdout);
    });
    const Json report = verify_report(o, results);
    if (!out_path.empty()) {
        const std::filesystem::path p(out_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream(p) << dump_report(report);
    }
    std::size_t failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra/Picard solver: scenarios, acceptance checks, Fresnel and Poisson tables"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "Run a scenario from a JSON config; writes report.json into output_dir");
    std::string config_path;
    bool solve_parallel = false, solve_serial = false;
    solve->add_option("config", config_path, "Path to the config file")->required();
    auto* sp = solve->add_flag("--parallel", solve_parallel, "Parallelize the Volterra operator over time nodes");
    solve->add_flag("--serial", solve_serial, "Force serial evaluation")->excludes(sp);

    auto* verify = app.add_subcommand("verify", "Run every acceptance criterion and print a pass/fail table");
    VerifyOptions vopt;
    bool v_parallel = false, v_serial = false;
    std::string v_out = "verify_report.json";
    auto* vp = verify->add_flag("--parallel", v_parallel, "Parallel evaluation");
    verify->add_flag("--serial", v_serial, "Serial evaluation (default)")->excludes(vp);
    verify->add_option("--seed", vopt.seed, "Seed for all random kernels");
    verify->add_option("--out", v_out, "Where to write the timing-free JSON report (empty to skip)");
    verify->add_flag("--inject-majorant-violation", vopt.inject_majorant_violation,
                     "Test hook: declare half the true kernel bound; the run must fail");

    auto* fresnel = app.add_subcommand("fresnel", "CSV of Abel-regularized Fresnel quadratures and their alpha -> 0 limit");
    int fresnel_n = 1;
    std::size_t schedule = 13;
    fresnel->add_option("--n", fresnel_n, "Dimension n")->check(CLI::Range(1, 64));
    fresnel->add_option("--schedule", schedule, "Schedule length; alpha_k = 2^-k")->check(CLI::Range(1, 30));

    auto* poisson = app.add_subcommand("poisson", "CSV of sup |u(t) - f| for the Gaussian initial datum");
    std::vector<double> t_list{0.1, 0.05, 0.025, 1e-3};
    std::size_t points = 1024;
    double sigma = 1.0;
    poisson->add_option("--t-list", t_list, "Positive, strictly decreasing times");
    poisson->add_option("--points", points, "Grid points on [-20, 20] (power of two)");
    poisson->add_option("--sigma", sigma, "Gaussian width");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve) {
            std::optional<bool> parallel;
            if (solve_parallel) parallel = true;
            if (solve_serial) parallel = false;
            std::string message;
            const int code = run_config_file(config_path, parallel, message);
            (code == kExitConfig ? std::cerr : std::cout) << message << "\n";
            return code;
        }
        if (*verify) {
            vopt.parallel = v_parallel && !v_serial;
            return cmd_verify(vopt, v_out);
        }
        if (*fresnel) {
            std::cout << fresnel_table(fresnel_n, schedule);
            return kExitOk;
        }
        if (*poisson) {
            RunConfig c;
            c.spatial = {-20.0, 20.0, points};
            c.sigma = sigma;
            c.t_list = t_list;
            std::cout << sweep_table(t_list, gaussian_sweep(c));
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
