#include "tdfc/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tdfc/monodromy.hpp"
#include "tdfc/strategy.hpp"

namespace tdfc {

namespace {

using json = nlohmann::json;

std::string join_path(const std::string& dir, const std::string& file) {
    if (dir.empty() || dir == ".") return file;
    return dir.back() == '/' ? dir + file : dir + "/" + file;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << content;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: missing required field: " + what);
}

void print_K(std::ostream& out, const Matrix& K) {
    char buf[32];
    for (Eigen::Index r = 0; r < K.rows(); ++r) {
        for (Eigen::Index c = 0; c < K.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%12.4f", K(r, c));
            out << buf;
        }
        out << "\n";
    }
}

json metrics_to_json(const RunMetrics& m) {
    json j;
    if (m.wait_time) j["wait_time"] = *m.wait_time;
    else j["wait_time"] = nullptr;
    j["converged"] = m.converged;
    if (m.settling_time) j["settling_time"] = *m.settling_time;
    else j["settling_time"] = nullptr;
    j["max_control_norm"] = m.max_control_norm;
    j["exited_ball_after_activation"] = m.exited_ball_after_activation;
    j["diverged"] = m.diverged;
    return j;
}

struct SimulationSetup {
    SystemModel system;
    StrategyConfig strategy;
    Vector initial;
    double h = 0.0;
    double T = 0.0;
};

SimulationSetup simulation_setup(const ExperimentConfig& cfg, const CommandOptions& opts) {
    SimulationSetup s{build_system(cfg), {}, {}, 0.0, 0.0};
    require(cfg.tau.has_value(), "tau");
    require(!cfg.initial.empty(), "initial");
    const double horizon = opts.horizon.value_or(cfg.horizon.value_or(-1.0));
    require(horizon >= 0.0, "horizon");
    const int m = opts.steps_per_delay.value_or(cfg.steps_per_delay.value_or(0));
    require(m >= 10, "steps_per_delay (>= 10)");

    s.strategy.design = design_from_config(cfg);
    s.strategy.target = resolve_equilibrium(cfg, s.system);
    s.strategy.max_wait = cfg.max_wait;
    s.strategy.settle_tol = cfg.settle_tol;
    if (cfg.initial.size() != static_cast<std::size_t>(s.system.dim))
        throw ConfigError("config: initial condition has wrong dimension");
    s.initial = Vector(s.system.dim);
    for (int i = 0; i < s.system.dim; ++i) s.initial(i) = cfg.initial[static_cast<std::size_t>(i)];
    s.h = *cfg.tau / m;
    // horizon rounded down to a grid multiple
    s.T = std::floor(horizon / s.h + 0.5) * s.h;
    return s;
}

} // namespace

ControllerDesign design_from_config(const ExperimentConfig& cfg) {
    require(!cfg.system.empty(), "system");
    require(cfg.tau.has_value(), "tau");
    const SystemModel system = build_system(cfg);
    const Vector xstar = resolve_equilibrium(cfg, system);
    const Matrix A = system.jacobian(xstar);
    return synthesize(A, *cfg.tau, mode_targets(cfg));
}

int cmd_design(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
               std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        const SystemModel system = build_system(cfg);
        const Vector xstar = resolve_equilibrium(cfg, system);
        const ControllerDesign design = design_from_config(cfg);

        out << "system: " << system.name << " (" << cfg.label << ")\n";
        out << "equilibrium:";
        char buf[32];
        for (Eigen::Index i = 0; i < xstar.size(); ++i) {
            std::snprintf(buf, sizeof buf, " %.10g", xstar(i));
            out << buf;
        }
        out << "\neigenvalues of A:\n";
        for (const Complex& z : design.blockForm.spectrum.values) {
            std::snprintf(buf, sizeof buf, "  %10.4f %+10.4fi\n", z.real(), z.imag());
            out << buf;
        }
        out << "Ktilde blocks:";
        for (std::size_t bi = 0; bi < design.blockForm.layout.size(); ++bi) {
            const Block& b = design.blockForm.layout[bi];
            const double re = design.blockForm.D(b.start, b.start);
            out << " [" << bi << ":" << (b.kind == BlockKind::Real ? "real" : "pair")
                << (re > 0.0 ? " gained]" : " zero]");
        }
        out << "\nK =\n";
        print_K(out, design.K);
        if (design.K.isZero(0.0))
            out << "note: no unstable modes; gain is identically zero\n";

        const std::string path = join_path(opts.out_dir, cfg.label + "_design.json");
        write_file(path, design_to_json(design));
        out << "design written to " << path << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_certify(const std::string& design_path, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(design_path);
        if (!in) throw ConfigError("cannot open design '" + design_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        const ControllerDesign design = design_from_json(buf.str());
        const CertifyResult result = certify(design);
        out << summary(result);
        return result.certified ? 0 : 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_simulate(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
                 std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        require(cfg.delta.has_value(), "delta");
        SimulationSetup setup = simulation_setup(cfg, opts);
        setup.strategy.delta = *cfg.delta;

        const StrategyRun run = run_strategy(setup.system, setup.strategy, setup.initial,
                                             setup.h, setup.T);

        const std::string csv_path = join_path(opts.out_dir, cfg.label + "_trajectory.csv");
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write '" + csv_path + "'");
        write_csv(run.trajectory, csv);

        const json jm = metrics_to_json(run.metrics);
        const std::string metrics_path = join_path(opts.out_dir, cfg.label + "_metrics.json");
        write_file(metrics_path, jm.dump(2) + "\n");

        out << jm.dump(2) << "\n";
        out << "trajectory written to " << csv_path << "\n";
        if (run.metrics.diverged) {
            out << "trajectory diverged\n";
            return 2;
        }
        return run.metrics.converged ? 0 : 2;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

int cmd_sweep(const std::string& config_path, const CommandOptions& opts, std::ostream& out,
              std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config_path);
        require(!cfg.delta_grid.empty(), "delta_grid");
        SimulationSetup setup = simulation_setup(cfg, opts);

        const auto rows = delta_sweep(setup.system, setup.strategy, cfg.delta_grid,
                                      setup.initial, setup.h, setup.T);

        std::ostringstream table;
        table << "delta,wait_time,settling_time,max_control_norm,converged\n";
        char buf[32];
        auto cell = [&](std::optional<double> v) {
            if (!v) return std::string("nan");
            std::snprintf(buf, sizeof buf, "%.15g", *v);
            return std::string(buf);
        };
        for (const SweepRow& row : rows) {
            std::snprintf(buf, sizeof buf, "%.15g", row.delta);
            table << buf << ',' << cell(row.metrics.wait_time) << ','
                  << cell(row.metrics.settling_time) << ',';
            std::snprintf(buf, sizeof buf, "%.15g", row.metrics.max_control_norm);
            table << buf << ',' << (row.metrics.converged ? 1 : 0) << "\n";
        }
        const std::string path = join_path(opts.out_dir, cfg.label + "_sweep.csv");
        write_file(path, table.str());
        out << table.str();
        out << "sweep written to " << path << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 1;
    }
}

} // namespace tdfc
