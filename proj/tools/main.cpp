// envtiming: command-line front end for the adoption-boundary solver.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "envtiming/checks.hpp"
#include "envtiming/config.hpp"
#include "envtiming/io.hpp"
#include "envtiming/policy.hpp"
#include "envtiming/solver.hpp"

namespace fs = std::filesystem;
using namespace envtiming;

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kCheckFailed = 2, kIo = 3 };

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    bool quiet = false;
};

class Runner {
public:
    Runner(RunConfig cfg, bool quiet) : cfg_(std::move(cfg)), quiet_(quiet), model_(cfg_.model) {}

    int solve()
    {
        const PathEngine engine(model_, cfg_.sim);
        const Boundary b = solve_with_progress(engine);
        note("residual profile with " + std::to_string(cfg_.effective_residual_paths()) + " paths per node");
        const auto rows = residual_profile(b, engine, cfg_.effective_residual_paths(), cfg_.seed,
                                           cfg_.residual_stride);
        const fs::path out = cfg_.output_dir / "boundary.csv";
        write_text_file(out, boundary_csv(b, rows));

        const double floor = cfg_.solver.tol_resid_factor * cfg_.model.r * cfg_.model.i_cost;
        std::size_t within = 0;
        double worst = 0.0;
        for (const auto& r : rows) {
            if (std::abs(r.residual) <= std::max(3.0 * r.residual_se, floor)) ++within;
            worst = std::max(worst, std::abs(r.residual));
        }
        auto meta = run_meta(cfg_, "solve");
        meta["solve"] = solve_info_json(b.info);
        meta["residual"] = {{"nodes", rows.size()},
                            {"within_tolerance", within},
                            {"max_abs", worst},
                            {"floor", floor},
                            {"units", "r * E[c](z), the scale of q"}};
        write_run_meta(out, meta);
        if (!quiet_)
            std::printf("boundary: %zu nodes, converged=%s after %zu sweeps; residual within tolerance at %zu/%zu nodes\n",
                        b.size(), b.info.converged ? "yes" : "no", b.info.iterations, within,
                        rows.size());
        return kOk;
    }

    int simulate()
    {
        const PathEngine engine(model_, cfg_.sim);
        const Boundary b = boundary_for(engine);
        const PolicyStats s = simulate_policy(b, cfg_.state, cfg_.horizon, engine);
        const fs::path out = cfg_.output_dir / "stats.csv";
        write_text_file(out, stats_csv(cfg_.state, s, model_));
        auto meta = run_meta(cfg_, "simulate");
        meta["solve"] = solve_info_json(b.info);
        meta["warning"] = s.warning;
        write_run_meta(out, meta);

        std::printf("state            x=%g p=%g pi=%g\n", cfg_.state.x, cfg_.state.p, cfg_.state.pi);
        std::printf("paths            %zu (horizon %g)\n", s.n_paths, s.horizon);
        std::printf("prob_stop        %.6f\n", s.prob_stop);
        std::printf("E[tau | stop]    %.6f  (se %.6f)\n", s.e_tau, s.se_tau);
        std::printf("E[P_tau | stop]  %.6f  (se %.6f)\n", s.e_p_tau, s.se_p_tau);
        std::printf("U                %.6f  (se %.6f)\n", s.u_hat, s.se_u);
        std::printf("V                %.6f  (se %.6f)\n", s.v_hat, s.se_v);
        std::printf("V never / now    %.6f / %.6f\n", model_.value_never(cfg_.state),
                    model_.value_now(cfg_.state));
        if (!s.warning.empty()) std::fprintf(stderr, "warning: %s\n", s.warning.c_str());
        return kOk;
    }

    int sweep()
    {
        if (!cfg_.sweep) throw ValidationError("sweep: config needs a [sweep] section with param and values");
        SweepSettings settings{cfg_.solver, cfg_.sim, cfg_.horizon};
        const auto rows = envtiming::sweep(cfg_.sweep->param, cfg_.sweep->values, cfg_.model,
                                           cfg_.state, settings, progress());
        const fs::path out = cfg_.output_dir / "sweep.csv";
        write_text_file(out, sweep_csv(rows));

        auto meta = run_meta(cfg_, "sweep");
        meta["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : rows) {
            nlohmann::ordered_json row{{"param", r.param}, {"value", r.value}};
            if (r.boundary) {
                const fs::path bfile =
                    cfg_.output_dir / ("boundary_" + r.param + "_" + format_shortest(r.value) + ".csv");
                write_text_file(bfile, boundary_csv(*r.boundary, {}));
                row["boundary_file"] = bfile.filename().string();
                row["solve"] = solve_info_json(r.boundary->info);
                row["warning"] = r.stats->warning;
            } else {
                row["error"] = r.error;
                std::fprintf(stderr, "skipped %s=%g: %s\n", r.param.c_str(), r.value, r.error.c_str());
            }
            meta["rows"].push_back(row);
        }
        write_run_meta(out, meta);
        if (!quiet_) std::printf("sweep: %zu rows written to %s\n", rows.size(), out.string().c_str());
        return kOk;
    }

    int surface()
    {
        const PathEngine engine(model_, cfg_.sim);
        const Boundary b = boundary_for(engine);
        const auto rows = value_surface(b, cfg_.surface.x_values, cfg_.state.p,
                                        cfg_.surface.pi_values, cfg_.horizon, engine);
        const fs::path out = cfg_.output_dir / "value_surface.csv";
        write_text_file(out, surface_csv(rows));
        auto meta = run_meta(cfg_, "surface");
        meta["solve"] = solve_info_json(b.info);
        write_run_meta(out, meta);
        if (!quiet_) std::printf("surface: %zu points written to %s\n", rows.size(), out.string().c_str());
        return kOk;
    }

    int check()
    {
        bool all = true;
        for (const auto& r : run_fast_checks(cfg_)) {
            std::printf("%s  %-24s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
            all = all && r.passed;
        }
        return all ? kOk : kCheckFailed;
    }

private:
    void note(const std::string& msg) const
    {
        if (!quiet_) std::fprintf(stderr, "%s\n", msg.c_str());
    }

    SolveProgress progress() const
    {
        if (quiet_) return {};
        return [](std::size_t it, double change, double normalized) {
            std::fprintf(stderr, "sweep %3zu  sup|dc| %.3e  normalized %.3e\n", it, change, normalized);
        };
    }

    Boundary solve_with_progress(const PathEngine& engine) const
    {
        note("solving boundary on " + std::to_string(cfg_.solver.grid.n) + " nodes");
        Boundary b = solve_boundary(cfg_.solver, engine, progress());
        if (!b.info.converged)
            std::fprintf(stderr, "warning: boundary not converged after %zu sweeps\n", b.info.iterations);
        return b;
    }

    Boundary boundary_for(const PathEngine& engine) const
    {
        if (cfg_.boundary_file.empty()) return solve_with_progress(engine);
        note("using boundary from " + cfg_.boundary_file);
        return read_boundary_csv(cfg_.boundary_file, model_);
    }

    RunConfig cfg_;
    bool quiet_;
    Model model_;
};

int run(const std::string& command, const Options& opt)
{
    RunConfig cfg = opt.config_path.empty() ? parse_config("") : load_config(opt.config_path);
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.seed) cfg.apply_seed(*opt.seed);
    if (opt.paths) {
        cfg.solver.n_paths_op = *opt.paths;
        cfg.sim.n_paths = *opt.paths;
    }
    cfg.validate();

    if (command != "check") {
        std::error_code ec;
        fs::create_directories(cfg.output_dir, ec);
        if (ec || !fs::is_directory(cfg.output_dir))
            throw IoError("cannot create output directory '" + cfg.output_dir.string() + "'");
    }

    Runner runner(cfg, opt.quiet);
    if (command == "solve") return runner.solve();
    if (command == "simulate") return runner.simulate();
    if (command == "sweep") return runner.sweep();
    if (command == "surface") return runner.surface();
    return runner.check();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal adoption boundary solver and policy evaluator"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "INI configuration file");
        sub->add_option("--out", opt.out_dir, "output directory (overrides [output] dir)");
        sub->add_option("--seed", seed, "master seed (overrides the config)");
        sub->add_option("--paths", paths, "paths per node and per policy evaluation")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opt.quiet, "suppress progress output");
    };

    const std::pair<const char*, const char*> commands[] = {
        {"solve", "solve the free boundary and write boundary.csv"},
        {"simulate", "evaluate the policy at the configured state and write stats.csv"},
        {"sweep", "re-solve and evaluate over the [sweep] parameter values"},
        {"surface", "estimate V over the [surface] grid"},
        {"check", "run the fast invariant suite"},
    };
    std::string chosen;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        sub->callback([&chosen, name = std::string(name)] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    for (CLI::App* sub : app.get_subcommands()) {
        if (sub->count("--seed")) opt.seed = seed;
        if (sub->count("--paths")) opt.paths = paths;
    }

    try {
        return run(chosen, opt);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return kIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    }
}
