// Command-line front end: runs verification suites and writes report.json and
// report.csv. Exit status 0 iff every pass criterion holds, 1 if a criterion
// fails, 2 on usage or configuration errors.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "r13/datasets.hpp"
#include "r13/report.hpp"
#include "r13/saddle_point.hpp"

namespace {

struct Overrides {
    std::string config;
    std::optional<double> kn, epsilon_w;
    std::optional<int> degree;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("--config", o.config, "RunConfig JSON file");
    app->add_option("--kn", o.kn, "Knudsen number override");
    app->add_option("--epsilon-w", o.epsilon_w, "velocity prescription strength override");
    app->add_option("--degree", o.degree, "polynomial degree override");
    app->add_option("--seed", o.seed, "seed override");
    app->add_option("--output-dir", o.output_dir, "output directory (default $R13_OUTPUT_DIR or r13_output)");
}

r13::RunConfig make_config(const Overrides& o, const std::vector<r13::Suite>* suites)
{
    r13::RunConfig c = o.config.empty() ? r13::RunConfig{} : r13::load_config(o.config);
    if (o.kn)
        c.kn = *o.kn;
    if (o.epsilon_w)
        c.epsilon_w = *o.epsilon_w;
    if (o.degree)
        c.degree = *o.degree;
    if (o.seed)
        c.seed = *o.seed;
    if (o.output_dir)
        c.output_dir = *o.output_dir;
    if (suites != nullptr)
        c.suites = *suites;
    c.validate();
    return c;
}

// Matrices and fields of the smooth data set at the configured discretization.
void export_solution(const r13::RunConfig& c)
{
    const r13::ModelParams prm = c.params();
    const r13::DiscreteSpaces sp = r13::build_spaces(c.degree, c.subdivisions, r13::pressure_mode_for(prm));
    const r13::ProblemData data = r13::smooth_limit_data();
    const r13::MixedSystem sys = r13::assemble_system(sp, prm, data.sources, data.boundary);
    const r13::MixedSolution sol = r13::solve_mixed(sys);
    const std::filesystem::path dir(c.output_dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out)
            throw std::runtime_error("cannot write " + (dir / name).string());
        out.precision(17);
        return out;
    };
    {
        auto out = open("A.coo");
        r13::export_coo(out, sys.A);
    }
    {
        auto out = open("B.coo");
        r13::export_coo(out, sys.B);
    }
    {
        auto out = open("fields.csv");
        r13::export_fields_csv(out, sp, sol.U, sol.P);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"R13 well-posedness verification toolkit"};
    app.require_subcommand(1);
    Overrides o;
    auto* ell = app.add_subcommand("verify-ellipticity", "symbol ellipticity verdicts and prefactors");
    auto* est = app.add_subcommand("estimate-constants", "Korn constants, right inverses and Brezzi constants");
    auto* sol = app.add_subcommand("solve", "mixed solves, stability bounds, limit and boundary checks");
    auto* rep = app.add_subcommand("report", "run the suites listed in the configuration");
    for (auto* s : {ell, est, sol, rep})
        add_common(s, o);
    CLI11_PARSE(app, argc, argv);

    using r13::Suite;
    const std::vector<Suite> ell_suites{Suite::ellipticity};
    const std::vector<Suite> est_suites{Suite::korn, Suite::constants};
    const std::vector<Suite> sol_suites{Suite::solve, Suite::limit, Suite::bc};
    const std::vector<Suite>* suites = nullptr;
    if (ell->parsed())
        suites = &ell_suites;
    else if (est->parsed())
        suites = &est_suites;
    else if (sol->parsed())
        suites = &sol_suites;

    r13::RunConfig config;
    try {
        config = make_config(o, suites);
    } catch (const r13::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        const r13::VerificationReport report = r13::run(config);
        const std::string json_path = r13::export_report(report, r13::ExportFormat::json, config.output_dir);
        const std::string csv_path = r13::export_report(report, r13::ExportFormat::csv, config.output_dir);
        if (sol->parsed())
            export_solution(config);
        std::cout << "wrote " << json_path << " and " << csv_path << " (" << report.scalar_count() << " results)\n";
        if (!report.passed()) {
            for (const auto& f : report.failures())
                std::cerr << "FAIL " << f << '\n';
            return 1;
        }
        std::cout << "all criteria pass\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
