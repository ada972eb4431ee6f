#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdfc/commands.hpp"
#include "tdfc/config.hpp"
#include "tdfc/monodromy.hpp"

using namespace tdfc;

namespace {

const char* kConfigDir = TDFC_CONFIG_DIR;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "tdfc_test_out";
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("config: every bundled config round-trips") {
    for (const auto& entry : std::filesystem::directory_iterator(kConfigDir)) {
        if (entry.path().extension() != ".cfg") continue;
        const ExperimentConfig cfg = load_config(entry.path().string());
        const ExperimentConfig again = parse_config(serialize_config(cfg), cfg.label);
        CHECK(cfg == again);
        const ExperimentConfig thrice = parse_config(serialize_config(again), again.label);
        CHECK(again == thrice);
    }
}

TEST_CASE("config: diagnostics carry line numbers") {
    try {
        parse_config("system = chua\nbogus_key = 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("tau 0.1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("tau = x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("target.0 = zeta\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("target.x = zeta 0.4\n"), ConfigError);
}

TEST_CASE("config: system building and equilibrium resolution") {
    ExperimentConfig cfg = parse_config(slurp(std::string(kConfigDir) + "/rossler.cfg"));
    const SystemModel sys = build_system(cfg);
    CHECK(sys.name == "rossler");
    const Vector P = resolve_equilibrium(cfg, sys);
    CHECK(sys.rhs(P).norm() < 1e-9);

    cfg.equilibrium = std::vector<double>{P(0), P(1), P(2)};
    CHECK((resolve_equilibrium(cfg, sys) - P).norm() == 0.0);

    cfg.equilibrium = std::vector<double>{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(resolve_equilibrium(cfg, sys), ConfigError);
    cfg.equilibrium = 7;
    CHECK_THROWS_AS(resolve_equilibrium(cfg, sys), ConfigError);

    ExperimentConfig lin;
    lin.system = "linear";
    lin.dim = 2;
    lin.matrix = {-1.0, 0.0, 0.0, -2.0};
    CHECK(build_system(lin).dim == 2);
    lin.matrix = {1.0};
    CHECK_THROWS_AS(build_system(lin), ConfigError);
    lin.system = "unknown";
    CHECK_THROWS_AS(build_system(lin), ConfigError);
}

TEST_CASE("config: design JSON round-trip preserves the design") {
    const ExperimentConfig cfg =
        load_config(std::string(kConfigDir) + "/double_scroll_origin.cfg");
    const ControllerDesign design = design_from_config(cfg);
    const ControllerDesign loaded = design_from_json(design_to_json(design));
    CHECK(loaded.tau == design.tau);
    CHECK(loaded.K == design.K);
    CHECK(loaded.Ktilde == design.Ktilde);
    CHECK(loaded.blockForm.V == design.blockForm.V);
    CHECK(loaded.blockForm.D == design.blockForm.D);
    REQUIRE(loaded.targets.size() == design.targets.size());
    CHECK(loaded.targets[0].zeta == design.targets[0].zeta);
    CHECK(certify(loaded).certified);
}

TEST_CASE("cmd_design / cmd_certify on a bundled experiment") {
    const auto out_dir = temp_dir();
    CommandOptions opts;
    opts.out_dir = out_dir.string();
    std::ostringstream out, err;
    const int rc = cmd_design(std::string(kConfigDir) + "/double_scroll_origin.cfg", opts, out,
                              err);
    CHECK(rc == 0);
    CHECK(out.str().find("eigenvalues of A") != std::string::npos);
    CHECK(out.str().find("K =") != std::string::npos);

    const std::string design_path = (out_dir / "double_scroll_origin_design.json").string();
    std::ostringstream cert_out, cert_err;
    CHECK(cmd_certify(design_path, cert_out, cert_err) == 0);
    CHECK(cert_out.str().find("certified: yes") != std::string::npos);

    // a hand-edited gain entry must fail certification with exit code 2
    ControllerDesign tampered = design_from_json(slurp(design_path));
    tampered.K(0, 0) += 0.5;
    const std::string tampered_path = (out_dir / "tampered_design.json").string();
    std::ofstream(tampered_path) << design_to_json(tampered);
    std::ostringstream t_out, t_err;
    CHECK(cmd_certify(tampered_path, t_out, t_err) == 2);
    CHECK(t_out.str().find("certified: NO") != std::string::npos);

    std::ostringstream m_out, m_err;
    CHECK(cmd_certify((out_dir / "missing.json").string(), m_out, m_err) == 1);
}

TEST_CASE("cmd_design: stable system reports a zero gain") {
    const auto out_dir = temp_dir();
    const std::string cfg_path = (out_dir / "stable.cfg").string();
    std::ofstream(cfg_path) << "label = stable\nsystem = linear\ndim = 2\n"
                               "matrix = -1 0 0 -2\nequilibrium = 0\ntau = 0.2\n";
    CommandOptions opts;
    opts.out_dir = out_dir.string();
    std::ostringstream out, err;
    CHECK(cmd_design(cfg_path, opts, out, err) == 0);
    CHECK(out.str().find("gain is identically zero") != std::string::npos);
}

TEST_CASE("cmd_simulate: bitwise-identical reruns and exit codes") {
    const auto out_dir = temp_dir();
    CommandOptions opts;
    opts.out_dir = out_dir.string();
    opts.horizon = 12.0;
    opts.steps_per_delay = 40;
    const std::string cfg = std::string(kConfigDir) + "/double_scroll_origin.cfg";

    std::ostringstream out1, err1;
    const int rc1 = cmd_simulate(cfg, opts, out1, err1);
    CHECK(rc1 == 0);
    const std::string csv1 = slurp((out_dir / "double_scroll_origin_trajectory.csv").string());

    std::ostringstream out2, err2;
    CHECK(cmd_simulate(cfg, opts, out2, err2) == rc1);
    const std::string csv2 = slurp((out_dir / "double_scroll_origin_trajectory.csv").string());
    CHECK(csv1 == csv2);
    CHECK(slurp((out_dir / "double_scroll_origin_metrics.json").string())
              .find("\"converged\": true") != std::string::npos);
}

TEST_CASE("cmd_simulate: zero-length horizon exits gracefully") {
    const auto out_dir = temp_dir();
    CommandOptions opts;
    opts.out_dir = out_dir.string();
    opts.horizon = 0.0;
    opts.steps_per_delay = 40;
    std::ostringstream out, err;
    const int rc =
        cmd_simulate(std::string(kConfigDir) + "/double_scroll_origin.cfg", opts, out, err);
    CHECK(rc == 2); // nothing simulated, objective not met, but no crash
    const std::string csv = slurp((out_dir / "double_scroll_origin_trajectory.csv").string());
    CHECK(csv.find("t,x1,x2,x3,u1,u2,u3,active\n") == 0);
}

TEST_CASE("cmd_sweep: double hook table") {
    const auto out_dir = temp_dir();
    CommandOptions opts;
    opts.out_dir = out_dir.string();
    opts.horizon = 40.0;
    opts.steps_per_delay = 40;
    std::ostringstream out, err;
    const int rc = cmd_sweep(std::string(kConfigDir) + "/double_hook_sweep.cfg", opts, out, err);
    CHECK(rc == 0);
    const std::string table = slurp((out_dir / "double_hook_sweep_sweep.csv").string());
    CHECK(table.find("delta,wait_time,settling_time,max_control_norm,converged\n") == 0);
    CHECK(std::count(table.begin(), table.end(), '\n') == 3); // header + two rows

    std::ostringstream out2, err2;
    CHECK(cmd_sweep((out_dir / "nonexistent.cfg").string(), opts, out2, err2) == 1);
}
