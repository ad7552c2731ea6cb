#include "envtiming/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace envtiming {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// Where each "section.key" was defined, for error messages.
std::map<std::string, int> key_lines(std::string_view text)
{
    std::map<std::string, int> lines;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == ';' || t[0] == '#') continue;
        if (t[0] == '[') {
            section = trim(t.substr(1, t.find(']') - 1));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(t.substr(0, eq));
        lines.emplace(section.empty() ? key : section + "." + key, no);
    }
    return lines;
}

class Reader {
public:
    explicit Reader(std::string_view text) : lines_(key_lines(text)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const
    {
        std::ostringstream os;
        os << "config";
        if (auto it = lines_.find(path); it != lines_.end()) os << " line " << it->second;
        os << ": '" << path << "' " << what;
        throw ValidationError(os.str());
    }

    double number(const std::string& path, const std::string& raw) const
    {
        const std::string s = trim(raw);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
            fail(path, "expects a number, got '" + raw + "'");
        return v;
    }

    std::uint64_t unsigned_int(const std::string& path, const std::string& raw) const
    {
        const std::string s = trim(raw);
        std::uint64_t v = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
            fail(path, "expects a non-negative integer, got '" + raw + "'");
        return v;
    }

    std::vector<double> list(const std::string& path, const std::string& raw) const
    {
        std::vector<double> out;
        std::string item;
        std::istringstream in(raw);
        while (std::getline(in, item, ',')) out.push_back(number(path, item));
        if (out.empty()) fail(path, "expects a comma-separated list of numbers");
        return out;
    }

private:
    std::map<std::string, int> lines_;
};

using Setter = std::function<void(RunConfig&, const Reader&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto model_key = [&t](const std::string& name) {
            t["model." + name] = [name](RunConfig& c, const Reader& r, const std::string& path,
                                       const std::string& v) {
                c.model.set(name, r.number(path, v));
            };
        };
        for (const char* k : {"sigma", "E", "e_rate", "beta", "delta", "I", "i_cost", "r", "alpha"})
            model_key(k);

        auto size_key = [&t](const std::string& path, std::size_t RunConfig::*field) {
            t[path] = [field](RunConfig& c, const Reader& r, const std::string& p,
                              const std::string& v) {
                c.*field = static_cast<std::size_t>(r.unsigned_int(p, v));
            };
        };

        t["seed"] = [](RunConfig& c, const Reader& r, const std::string& p, const std::string& v) {
            c.apply_seed(r.unsigned_int(p, v));
        };
        t["solver.z_min"] = [](RunConfig& c, const Reader& r, const std::string& p,
                               const std::string& v) { c.solver.grid.z_min = r.number(p, v); };
        t["solver.z_max"] = [](RunConfig& c, const Reader& r, const std::string& p,
                               const std::string& v) { c.solver.grid.z_max = r.number(p, v); };
        t["solver.n_nodes"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                 const std::string& v) { c.solver.grid.n = r.unsigned_int(p, v); };
        t["solver.n_paths"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                 const std::string& v) { c.solver.n_paths_op = r.unsigned_int(p, v); };
        t["solver.max_iter"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                  const std::string& v) { c.solver.max_iter = r.unsigned_int(p, v); };
        t["solver.tol_c"] = [](RunConfig& c, const Reader& r, const std::string& p,
                               const std::string& v) { c.solver.tol_c = r.number(p, v); };
        t["solver.patience"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                  const std::string& v) { c.solver.patience = r.unsigned_int(p, v); };
        t["solver.relaxation"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                    const std::string& v) { c.solver.relaxation = r.number(p, v); };
        t["solver.tol_resid_factor"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                          const std::string& v) {
            c.solver.tol_resid_factor = r.number(p, v);
        };
        size_key("solver.residual_paths", &RunConfig::residual_paths);
        size_key("solver.residual_stride", &RunConfig::residual_stride);

        t["sim.dt"] = [](RunConfig& c, const Reader& r, const std::string& p,
                         const std::string& v) { c.sim.dt = r.number(p, v); };
        t["sim.n_paths"] = [](RunConfig& c, const Reader& r, const std::string& p,
                              const std::string& v) { c.sim.n_paths = r.unsigned_int(p, v); };
        t["sim.t_max"] = [](RunConfig& c, const Reader& r, const std::string& p,
                            const std::string& v) { c.sim.t_max = r.number(p, v); };
        t["sim.threads"] = [](RunConfig& c, const Reader& r, const std::string& p,
                              const std::string& v) {
            c.sim.threads = static_cast<unsigned>(r.unsigned_int(p, v));
        };

        t["policy.horizon"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                 const std::string& v) { c.horizon = r.number(p, v); };
        t["policy.boundary_file"] = [](RunConfig& c, const Reader&, const std::string&,
                                       const std::string& v) { c.boundary_file = trim(v); };

        t["state.x"] = [](RunConfig& c, const Reader& r, const std::string& p,
                          const std::string& v) { c.state.x = r.number(p, v); };
        t["state.p"] = [](RunConfig& c, const Reader& r, const std::string& p,
                          const std::string& v) { c.state.p = r.number(p, v); };
        t["state.pi"] = [](RunConfig& c, const Reader& r, const std::string& p,
                           const std::string& v) { c.state.pi = r.number(p, v); };

        t["sweep.param"] = [](RunConfig& c, const Reader&, const std::string&,
                              const std::string& v) {
            if (!c.sweep) c.sweep.emplace();
            c.sweep->param = trim(v);
        };
        t["sweep.values"] = [](RunConfig& c, const Reader& r, const std::string& p,
                               const std::string& v) {
            if (!c.sweep) c.sweep.emplace();
            c.sweep->values = r.list(p, v);
        };
        t["surface.x_values"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                   const std::string& v) { c.surface.x_values = r.list(p, v); };
        t["surface.pi_values"] = [](RunConfig& c, const Reader& r, const std::string& p,
                                    const std::string& v) { c.surface.pi_values = r.list(p, v); };
        t["output.dir"] = [](RunConfig& c, const Reader&, const std::string&,
                             const std::string& v) { c.output_dir = trim(v); };
        return t;
    }();
    return table;
}

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_shortest(v[i]);
    }
    return out;
}

} // namespace

void RunConfig::apply_seed(std::uint64_t s)
{
    seed = s;
    solver.seed = s;
    sim.seed = s;
}

std::size_t RunConfig::effective_residual_paths() const
{
    return residual_paths > 0 ? residual_paths : 10 * solver.n_paths_op;
}

void RunConfig::validate() const
{
    model.validate();
    solver.validate();
    sim.validate();
    state.validate();
    if (!(horizon >= sim.dt)) throw ValidationError("policy: horizon must be at least sim.dt");
    if (residual_stride < 1) throw ValidationError("solver: residual_stride must be at least 1");
    if (effective_residual_paths() < 2)
        throw ValidationError("solver: residual_paths must be at least 2");
    if (sweep) {
        if (sweep->param.empty()) throw ValidationError("sweep: 'param' is required");
        model.get(sweep->param);
        if (sweep->values.empty()) throw ValidationError("sweep: 'values' is required");
    }
    if (surface.x_values.empty() || surface.pi_values.empty())
        throw ValidationError("surface: x_values and pi_values must be non-empty");
    for (double x : surface.x_values)
        if (!(std::isfinite(x) && x > 0.0)) throw ValidationError("surface: x values must be positive");
    for (double pi : surface.pi_values)
        if (!(pi > 0.0 && pi < 1.0)) throw ValidationError("surface: pi values must lie in (0, 1)");
}

RunConfig parse_config(std::string_view text)
{
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        std::ostringstream os;
        os << "config line " << e.line() << ": " << e.message();
        throw ValidationError(os.str());
    }

    const Reader reader(text);
    RunConfig cfg;
    cfg.apply_seed(kDefaultSeed);
    const auto& table = setters();

    auto apply = [&](const std::string& path, const std::string& value) {
        const auto it = table.find(path);
        if (it == table.end()) reader.fail(path, "is not a recognised setting");
        it->second(cfg, reader, path, value);
    };

    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            // top-level key: the seed, or a model parameter
            if (name == "seed") apply(name, node.data());
            else if (table.count("model." + name)) apply("model." + name, node.data());
            else apply(name, node.data());
            continue;
        }
        for (const auto& [key, leaf] : node) {
            if (!leaf.empty()) reader.fail(name + "." + key, "is nested too deeply");
            apply(name + "." + key, leaf.data());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading config file '" + path.string() + "'");
    return parse_config(buf.str());
}

std::string dump_config(const RunConfig& c)
{
    std::ostringstream os;
    auto kv = [&os](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [](double v) { return format_shortest(v); };
    auto count = [](std::uint64_t v) { return std::to_string(v); };

    kv("seed", count(c.seed));
    os << "\n[model]\n";
    kv("sigma", num(c.model.sigma));
    kv("E", num(c.model.e_rate));
    kv("beta", num(c.model.beta));
    kv("delta", num(c.model.delta));
    kv("I", num(c.model.i_cost));
    kv("r", num(c.model.r));
    kv("alpha", num(c.model.alpha));
    os << "\n[solver]\n";
    kv("z_min", num(c.solver.grid.z_min));
    kv("z_max", num(c.solver.grid.z_max));
    kv("n_nodes", count(c.solver.grid.n));
    kv("n_paths", count(c.solver.n_paths_op));
    kv("max_iter", count(c.solver.max_iter));
    kv("tol_c", num(c.solver.tol_c));
    kv("patience", count(c.solver.patience));
    kv("relaxation", num(c.solver.relaxation));
    kv("tol_resid_factor", num(c.solver.tol_resid_factor));
    kv("residual_paths", count(c.effective_residual_paths()));
    kv("residual_stride", count(c.residual_stride));
    os << "\n[sim]\n";
    kv("dt", num(c.sim.dt));
    kv("n_paths", count(c.sim.n_paths));
    kv("t_max", num(c.sim.t_max > 0.0 ? c.sim.t_max : default_exp_time_cap(c.model.r)));
    kv("threads", count(c.sim.threads));
    os << "\n[policy]\n";
    kv("horizon", num(c.horizon));
    if (!c.boundary_file.empty()) kv("boundary_file", c.boundary_file);
    os << "\n[state]\n";
    kv("x", num(c.state.x));
    kv("p", num(c.state.p));
    kv("pi", num(c.state.pi));
    if (c.sweep) {
        os << "\n[sweep]\n";
        kv("param", c.sweep->param);
        kv("values", join(c.sweep->values));
    }
    os << "\n[surface]\n";
    kv("x_values", join(c.surface.x_values));
    kv("pi_values", join(c.surface.pi_values));
    os << "\n[output]\n";
    kv("dir", c.output_dir.generic_string());
    return os.str();
}

std::string format_shortest(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_significant(double v, int digits)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    // scientific form fixes the rounded digits and exponent; then lay them out in fixed form
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, digits - 1);
    const std::string sci(buf, res.ptr);
    const auto epos = sci.find('e');
    const int exp10 = std::atoi(sci.c_str() + epos + 1);
    const bool neg = sci[0] == '-';
    std::string mant;
    for (std::size_t i = neg ? 1 : 0; i < epos; ++i)
        if (sci[i] != '.') mant += sci[i];

    std::string out = neg ? "-" : "";
    if (exp10 < 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-exp10 - 1), '0');
        out += mant;
    } else if (static_cast<std::size_t>(exp10) + 1 >= mant.size()) {
        out += mant;
        out.append(static_cast<std::size_t>(exp10) + 1 - mant.size(), '0');
    } else {
        out += mant.substr(0, static_cast<std::size_t>(exp10) + 1);
        out += '.';
        out += mant.substr(static_cast<std::size_t>(exp10) + 1);
    }
    return out;
}

} // namespace envtiming
