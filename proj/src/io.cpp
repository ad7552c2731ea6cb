#include "envtiming/io.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <fstream>
#include <limits>
#include <sstream>

namespace envtiming {

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) out.push_back(item);
    return out;
}

double parse_field(const std::string& s, const std::filesystem::path& path, int line)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    std::ostringstream os;
    os << path.string() << " line " << line << ": bad number '" << s << "'";
    throw ValidationError(os.str());
}

} // namespace

const char* version() { return ENVTIMING_VERSION; }

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string boundary_csv(const Boundary& c, const std::vector<ResidualRow>& residuals)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream os;
    os << "z,m,c,residual,residual_se\n";
    std::size_t k = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        const double z = c.grid().node(j);
        double res = nan;
        double se = nan;
        if (k < residuals.size() && residuals[k].z == z) {
            res = residuals[k].residual;
            se = residuals[k].residual_se;
            ++k;
        }
        os << format_significant(z, 10) << ',' << format_significant(c.m_values()[j], 10) << ','
           << format_significant(c.c_values()[j], 10) << ',' << format_significant(res, 10) << ','
           << format_significant(se, 10) << '\n';
    }
    return os.str();
}

Boundary read_boundary_csv(const std::filesystem::path& path, const Model& model)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read boundary file '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("z,m,c", 0) != 0)
        throw ValidationError(path.string() + ": expected header starting with 'z,m,c'");
    std::vector<double> z, c;
    int no = 1;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() < 3) throw ValidationError(path.string() + ": short row at line " + std::to_string(no));
        z.push_back(parse_field(f[0], path, no));
        c.push_back(parse_field(f[2], path, no));
    }
    if (z.size() < 2) throw ValidationError(path.string() + ": need at least two rows");
    ZGrid grid{z.front(), z.back(), z.size()};
    grid.validate();
    for (std::size_t j = 0; j < z.size(); ++j)
        if (std::abs(grid.node(j) - z[j]) > 1e-8 * (1.0 + std::abs(z[j])))
            throw ValidationError(path.string() + ": z column is not a uniform grid");
    // m is recomputed for the current model; c is clamped into the admissible band
    Boundary reference = Boundary::from_lower_threshold(model, grid);
    std::vector<double> m = reference.m_values();
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = std::clamp(c[j], m[j], 1.0 - kClipEps);
    Boundary b(grid, std::move(c), std::move(m));
    b.check_invariants();
    return b;
}

std::string stats_csv(const StatePoint& sp, const PolicyStats& s, const Model& model)
{
    std::ostringstream os;
    os << "x,p,pi,horizon,n_paths,prob_stop,e_tau,se_tau,e_p_tau,se_p_tau,u_hat,se_u,v_hat,se_v,"
          "value_never,value_now\n";
    const double fields[] = {sp.x,       sp.p,       sp.pi,       s.horizon,
                             static_cast<double>(s.n_paths), s.prob_stop, s.e_tau,
                             s.se_tau,   s.e_p_tau,  s.se_p_tau,  s.u_hat,
                             s.se_u,     s.v_hat,    s.se_v,      model.value_never(sp),
                             model.value_now(sp)};
    for (std::size_t i = 0; i < std::size(fields); ++i)
        os << (i ? "," : "") << format_shortest(fields[i]);
    os << '\n';
    return os.str();
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::ostringstream os;
    os << "param,value,prob_stop,e_tau,se_tau,e_p_tau,se_p_tau,u_hat,se_u,v_hat,se_v\n";
    for (const auto& r : rows) {
        if (!r.stats) continue; // flagged rows are reported in run_meta
        const PolicyStats& s = *r.stats;
        os << r.param << ',' << format_shortest(r.value);
        for (double v : {s.prob_stop, s.e_tau, s.se_tau, s.e_p_tau, s.se_p_tau, s.u_hat, s.se_u,
                         s.v_hat, s.se_v})
            os << ',' << format_shortest(v);
        os << '\n';
    }
    return os.str();
}

std::string surface_csv(const std::vector<SurfaceRow>& rows)
{
    std::ostringstream os;
    os << "x,p,pi,v_hat,se_v\n";
    for (const auto& r : rows)
        os << format_shortest(r.x) << ',' << format_shortest(r.p) << ',' << format_shortest(r.pi)
           << ',' << format_shortest(r.v_hat) << ',' << format_shortest(r.se_v) << '\n';
    return os.str();
}

nlohmann::ordered_json run_meta(const RunConfig& cfg, const std::string& command)
{
    nlohmann::ordered_json meta;
    meta["version"] = version();
    meta["command"] = command;
    meta["seed"] = cfg.seed;
    meta["config_ini"] = dump_config(cfg);

    nlohmann::ordered_json model;
    for (const char* k : {"sigma", "E", "beta", "delta", "I", "r", "alpha"}) model[k] = cfg.model.get(k);
    meta["config"]["model"] = model;
    const DerivedConstants dc = derive_constants(cfg.model);
    meta["derived"] = {{"theta", dc.theta},   {"theta0", dc.theta0}, {"rho", dc.rho},
                       {"rho0", dc.rho0},     {"coef_a", dc.coef_a}, {"coef_b", dc.coef_b},
                       {"exp_ratio", dc.exp_ratio}};
    meta["config"]["solver"] = {{"z_min", cfg.solver.grid.z_min},
                                {"z_max", cfg.solver.grid.z_max},
                                {"n_nodes", cfg.solver.grid.n},
                                {"n_paths", cfg.solver.n_paths_op},
                                {"max_iter", cfg.solver.max_iter},
                                {"tol_c", cfg.solver.tol_c},
                                {"patience", cfg.solver.patience},
                                {"relaxation", cfg.solver.relaxation},
                                {"tol_resid_factor", cfg.solver.tol_resid_factor},
                                {"residual_paths", cfg.effective_residual_paths()},
                                {"residual_stride", cfg.residual_stride},
                                {"stopping_rule", "sup |dc| / lambda(z) < tol_c for patience sweeps"}};
    meta["config"]["sim"] = {
        {"dt", cfg.sim.dt},
        {"n_paths", cfg.sim.n_paths},
        {"t_max", cfg.sim.t_max > 0.0 ? cfg.sim.t_max : default_exp_time_cap(cfg.model.r)},
        {"threads", cfg.sim.threads},
        {"scheme", "Euler-Maruyama on logit(pi)"}};
    meta["config"]["policy"] = {{"horizon", cfg.horizon}, {"boundary_file", cfg.boundary_file}};
    meta["config"]["state"] = {{"x", cfg.state.x}, {"p", cfg.state.p}, {"pi", cfg.state.pi}};
    if (cfg.sweep)
        meta["config"]["sweep"] = {{"param", cfg.sweep->param}, {"values", cfg.sweep->values}};
    meta["config"]["surface"] = {{"x_values", cfg.surface.x_values},
                                 {"pi_values", cfg.surface.pi_values}};
    return meta;
}

nlohmann::ordered_json solve_info_json(const SolveInfo& info)
{
    return {{"converged", info.converged},
            {"iterations", info.iterations},
            {"final_change", info.final_change},
            {"final_normalized_change", info.final_normalized_change},
            {"min_relaxation", info.min_relaxation},
            {"change_history", info.change_history}};
}

void write_run_meta(const std::filesystem::path& output_file, const nlohmann::ordered_json& meta)
{
    std::filesystem::path p = output_file;
    p.replace_extension(".run_meta.json");
    write_text_file(p, meta.dump(2) + "\n");
}

} // namespace envtiming
