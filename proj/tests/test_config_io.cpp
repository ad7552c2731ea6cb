#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "envtiming/config.hpp"
#include "envtiming/io.hpp"
#include "fixtures.hpp"

using namespace envtiming;

namespace {

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& s)
{
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

} // namespace

TEST_CASE("empty document gives the reference calibration")
{
    const RunConfig c = parse_config("");
    CHECK(c.model.sigma == 0.2);
    CHECK(c.model.e_rate == 0.5);
    CHECK(c.model.beta == 0.4);
    CHECK(c.model.delta == 0.2);
    CHECK(c.model.i_cost == 10.0);
    CHECK(c.model.r == 0.1);
    CHECK(c.model.alpha == 0.05);
    CHECK(c.solver.grid.n == 57);
    CHECK(c.solver.grid.z_min == -8.0);
    CHECK(c.solver.grid.z_max == 6.0);
    CHECK(c.solver.n_paths_op == 20000);
    CHECK(c.solver.tol_c == 5e-3);
    CHECK(c.solver.patience == 3);
    CHECK(c.solver.max_iter == 200);
    CHECK(c.sim.dt == 0.01);
    CHECK(c.horizon == 150.0);
    CHECK(c.state.x == 1.0);
    CHECK(c.state.p == 1.0);
    CHECK(c.state.pi == 0.5);
    CHECK(c.seed == kDefaultSeed);
    CHECK(c.solver.seed == kDefaultSeed);
    CHECK(c.sim.seed == kDefaultSeed);
    CHECK(c.effective_residual_paths() == 200000);
    CHECK_FALSE(c.sweep.has_value());
}

TEST_CASE("partial overrides")
{
    const RunConfig top = parse_config("sigma = 0.3\n");
    CHECK(top.model.sigma == 0.3);
    CHECK(top.model.alpha == 0.05);
    CHECK(dump_config(top).find("sigma = 0.3\n") != std::string::npos);

    const RunConfig c = parse_config(
        "seed = 7\n[model]\nE = 0.6\nI = 12\n[solver]\nn_nodes = 29\nn_paths = 10000\n"
        "[sweep]\nparam = delta\nvalues = 0.1, 0.2,0.3\n[state]\npi = 0.7\n");
    CHECK(c.model.e_rate == 0.6);
    CHECK(c.model.i_cost == 12.0);
    CHECK(c.solver.grid.n == 29);
    CHECK(c.solver.n_paths_op == 10000);
    CHECK(c.seed == 7);
    CHECK(c.sim.seed == 7);
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->param == "delta");
    CHECK(c.sweep->values == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(c.state.pi == 0.7);
}

TEST_CASE("config errors")
{
    CHECK_THROWS_WITH_AS(parse_config("r = 0.04\nalpha = 0.05\n"),
                         doctest::Contains("discount-rate assumption"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\nsigma = 0.2\n[model\n"), doctest::Contains("line 3"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\n\nsigma = fast\n"), doctest::Contains("line 3"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config("[solver]\nwidth = 3\n"), doctest::Contains("not a recognised"),
                         ValidationError);
    CHECK_THROWS_AS(parse_config("[model]\nsigma = 0.2\nsigma = 0.3\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[sweep]\nparam = gamma\nvalues = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[state]\npi = 1.2\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[solver]\nn_paths = -3\n"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/cfg.ini"), IoError);
}

TEST_CASE("dumped config reads back unchanged")
{
    const RunConfig c = parse_config(
        "[model]\nsigma = 0.123456789012345\nalpha = 0.031\n[sweep]\nparam = alpha\n"
        "values = 0.03, 0.05, 0.08\n[sim]\ndt = 0.02\n[policy]\nhorizon = 99.5\n");
    const std::string once = dump_config(c);
    const RunConfig back = parse_config(once);
    CHECK(dump_config(back) == once);
    CHECK(back.model.sigma == c.model.sigma);
    CHECK(back.sim.dt == 0.02);
    CHECK(back.horizon == 99.5);
    CHECK(back.sweep->values == c.sweep->values);
}

TEST_CASE("number formatting")
{
    CHECK(format_shortest(0.1) == "0.1");
    CHECK(format_shortest(13.333333333333334) == "13.333333333333334");
    CHECK(format_shortest(std::nan("")) == "nan");
    CHECK(std::stod(format_shortest(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_significant(0.6880911688, 10) == "0.6880911688");
    CHECK(format_significant(0.68809116879467, 10) == "0.6880911688");
    CHECK(format_significant(-8.0, 10) == "-8.000000000");
    CHECK(format_significant(1e-9, 10) == "0.000000001000000000");
    CHECK(format_significant(123.456, 4) == "123.5");
    CHECK(format_significant(99999.99, 3) == "100000");
    CHECK(format_significant(0.0, 10) == "0");
    CHECK(format_significant(0.999999999, 10) == "0.9999999990");
}

TEST_CASE("boundary csv round trip")
{
    const Model model;
    const Boundary& b = envtiming::testing::coarse_solution();
    const std::string text = boundary_csv(b, {});
    CHECK(text.rfind("z,m,c,residual,residual_se\n", 0) == 0);
    CHECK(count_lines(text) == b.size() + 1);
    const auto dir = std::filesystem::temp_directory_path() / "envtiming_io_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "boundary.csv";
    write_text_file(file, text);
    const Boundary back = read_boundary_csv(file, model);
    REQUIRE(back.size() == b.size());
    for (std::size_t j = 0; j < b.size(); ++j)
        CHECK(back.c_values()[j] == doctest::Approx(b.c_values()[j]).epsilon(1e-9));
    CHECK_THROWS_AS(read_boundary_csv(dir / "missing.csv", model), IoError);
    CHECK_THROWS_AS(write_text_file("/nonexistent/dir/x.csv", "x"), IoError);
}

TEST_CASE("csv headers")
{
    const Model model;
    PolicyStats s;
    s.n_paths = 10;
    CHECK(stats_csv({1, 1, 0.5}, s, model).rfind("x,p,pi,horizon,n_paths,prob_stop,", 0) == 0);
    CHECK(sweep_csv({}) == "param,value,prob_stop,e_tau,se_tau,e_p_tau,se_p_tau,u_hat,se_u,v_hat,se_v\n");
    CHECK(surface_csv({{1, 1, 0.5, 2, 0.1, 3, 0.1}}) == "x,p,pi,v_hat,se_v\n1,1,0.5,3,0.1\n");

    SweepRow ok{"delta", 0.2, s, std::nullopt, ""};
    SweepRow bad{"delta", -1, std::nullopt, std::nullopt, "invalid"};
    CHECK(count_lines(sweep_csv({ok, bad, ok})) == 3);
}

TEST_CASE("run_meta carries the effective config")
{
    RunConfig c = parse_config("sigma = 0.25\n");
    const auto meta = run_meta(c, "solve");
    CHECK(meta["version"] == version());
    CHECK(meta["command"] == "solve");
    CHECK(meta["seed"] == kDefaultSeed);
    CHECK(meta["config"]["model"]["sigma"] == 0.25);
    CHECK(meta["config"]["state"]["pi"] == 0.5);
    CHECK(meta["config_ini"].get<std::string>() == dump_config(c));
    CHECK(parse_config(meta["config_ini"].get<std::string>()).model.sigma == 0.25);
}
