#include "tdfc/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace tdfc {

namespace {

using json = nlohmann::json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> tokens(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(int line, const std::string& message) {
    throw ConfigError("config: line " + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& tok, int line) {
    try {
        std::size_t used = 0;
        const double value = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return value;
    } catch (const std::exception&) {
        fail(line, "expected a number, got '" + tok + "'");
    }
}

bool looks_like_integer(const std::string& tok) {
    if (tok.empty()) return false;
    std::size_t i = (tok[0] == '-' || tok[0] == '+') ? 1 : 0;
    if (i == tok.size()) return false;
    for (; i < tok.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
    return true;
}

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& default_label) {
    ExperimentConfig cfg;
    cfg.label = default_label;

    std::map<int, std::pair<std::string, int>> target_lines; // mode -> (value, line)
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail(line_no, "empty key or value");
        const auto toks = tokens(value);

        auto one_number = [&]() {
            if (toks.size() != 1) fail(line_no, "'" + key + "' takes a single number");
            return parse_number(toks[0], line_no);
        };
        auto numbers = [&]() {
            std::vector<double> vals;
            for (const auto& t : toks) vals.push_back(parse_number(t, line_no));
            return vals;
        };

        if (key == "label") cfg.label = value;
        else if (key == "system") cfg.system = value;
        else if (key == "alpha") cfg.alpha = one_number();
        else if (key == "beta") cfg.beta = one_number();
        else if (key == "gamma") cfg.gamma = one_number();
        else if (key == "m0") cfg.m0 = one_number();
        else if (key == "m1") cfg.m1 = one_number();
        else if (key == "a") cfg.a = one_number();
        else if (key == "b") cfg.b = one_number();
        else if (key == "c") cfg.c = one_number();
        else if (key == "dim") cfg.dim = static_cast<int>(one_number());
        else if (key == "matrix") cfg.matrix = numbers();
        else if (key == "equilibrium") {
            if (toks.size() == 1 && looks_like_integer(toks[0]))
                cfg.equilibrium = static_cast<int>(parse_number(toks[0], line_no));
            else
                cfg.equilibrium = numbers();
        } else if (key == "tau") cfg.tau = one_number();
        else if (key.rfind("target.", 0) == 0) {
            const std::string idx = key.substr(7);
            if (!looks_like_integer(idx)) fail(line_no, "target index must be an integer");
            target_lines[std::stoi(idx)] = {value, line_no};
        } else if (key == "delta") cfg.delta = one_number();
        else if (key == "delta_grid") cfg.delta_grid = numbers();
        else if (key == "initial") cfg.initial = numbers();
        else if (key == "horizon") cfg.horizon = one_number();
        else if (key == "steps_per_delay") cfg.steps_per_delay = static_cast<int>(one_number());
        else if (key == "max_wait") cfg.max_wait = one_number();
        else if (key == "settle_tol") cfg.settle_tol = one_number();
        else fail(line_no, "unknown key '" + key + "'");
    }

    for (const auto& [mode, entry] : target_lines) {
        const auto& [value, at_line] = entry;
        const auto toks = tokens(value);
        TargetSpec spec;
        spec.mode = mode;
        if (toks.size() == 2 && toks[0] == "zeta") {
            spec.is_complex = false;
            spec.zeta = parse_number(toks[1], at_line);
        } else if (toks.size() == 4 && toks[0] == "rho" && toks[2] == "theta") {
            spec.is_complex = true;
            spec.rho = parse_number(toks[1], at_line);
            if (toks[3] == "auto") spec.theta_auto = true;
            else spec.theta = parse_number(toks[3], at_line);
        } else {
            fail(at_line, "target must be 'zeta <v>' or 'rho <v> theta <v|auto>'");
        }
        cfg.targets.push_back(spec);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string stem = path;
    const auto slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_config(buf.str(), stem);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    if (!cfg.label.empty()) out << "label = " << cfg.label << "\n";
    out << "system = " << cfg.system << "\n";
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) out << key << " = " << format_full(*v) << "\n";
    };
    put("alpha", cfg.alpha);
    put("beta", cfg.beta);
    put("gamma", cfg.gamma);
    put("m0", cfg.m0);
    put("m1", cfg.m1);
    put("a", cfg.a);
    put("b", cfg.b);
    put("c", cfg.c);
    if (cfg.dim) out << "dim = " << *cfg.dim << "\n";
    if (!cfg.matrix.empty()) {
        out << "matrix =";
        for (double v : cfg.matrix) out << " " << format_full(v);
        out << "\n";
    }
    if (std::holds_alternative<int>(cfg.equilibrium))
        out << "equilibrium = " << std::get<int>(cfg.equilibrium) << "\n";
    else if (std::holds_alternative<std::vector<double>>(cfg.equilibrium)) {
        out << "equilibrium =";
        for (double v : std::get<std::vector<double>>(cfg.equilibrium))
            out << " " << format_full(v);
        out << "\n";
    }
    put("tau", cfg.tau);
    for (const TargetSpec& t : cfg.targets) {
        out << "target." << t.mode << " = ";
        if (!t.is_complex) out << "zeta " << format_full(t.zeta);
        else {
            out << "rho " << format_full(t.rho) << " theta ";
            if (t.theta_auto) out << "auto";
            else out << format_full(t.theta);
        }
        out << "\n";
    }
    put("delta", cfg.delta);
    if (!cfg.delta_grid.empty()) {
        out << "delta_grid =";
        for (double v : cfg.delta_grid) out << " " << format_full(v);
        out << "\n";
    }
    if (!cfg.initial.empty()) {
        out << "initial =";
        for (double v : cfg.initial) out << " " << format_full(v);
        out << "\n";
    }
    put("horizon", cfg.horizon);
    if (cfg.steps_per_delay) out << "steps_per_delay = " << *cfg.steps_per_delay << "\n";
    out << "max_wait = " << format_full(cfg.max_wait) << "\n";
    out << "settle_tol = " << format_full(cfg.settle_tol) << "\n";
    return out.str();
}

SystemModel build_system(const ExperimentConfig& cfg) {
    if (cfg.system == "chua") {
        ChuaParams p;
        if (!cfg.alpha || !cfg.beta || !cfg.m0 || !cfg.m1)
            throw ConfigError("config: chua needs alpha, beta, m0, m1 (gamma defaults to 0)");
        p.alpha = *cfg.alpha;
        p.beta = *cfg.beta;
        p.gamma = cfg.gamma.value_or(0.0);
        p.m0 = *cfg.m0;
        p.m1 = *cfg.m1;
        return chua(p);
    }
    if (cfg.system == "rossler") {
        RosslerParams p;
        if (cfg.a) p.a = *cfg.a;
        if (cfg.b) p.b = *cfg.b;
        if (cfg.c) p.c = *cfg.c;
        return rossler(p);
    }
    if (cfg.system == "linear") {
        if (!cfg.dim || cfg.matrix.size() != static_cast<std::size_t>(*cfg.dim * *cfg.dim))
            throw ConfigError("config: linear needs dim and a dim*dim row-major matrix");
        Matrix A(*cfg.dim, *cfg.dim);
        for (int r = 0; r < *cfg.dim; ++r)
            for (int c = 0; c < *cfg.dim; ++c)
                A(r, c) = cfg.matrix[static_cast<std::size_t>(r * *cfg.dim + c)];
        return linear_system(A);
    }
    throw ConfigError("config: unknown system '" + cfg.system + "'");
}

Vector resolve_equilibrium(const ExperimentConfig& cfg, const SystemModel& system) {
    if (std::holds_alternative<int>(cfg.equilibrium)) {
        const int idx = std::get<int>(cfg.equilibrium);
        if (idx < 0 || idx >= static_cast<int>(system.equilibria.size()))
            throw ConfigError("config: equilibrium index " + std::to_string(idx) +
                              " out of range (system has " +
                              std::to_string(system.equilibria.size()) + ")");
        return system.equilibria[static_cast<std::size_t>(idx)];
    }
    if (std::holds_alternative<std::vector<double>>(cfg.equilibrium)) {
        const auto& vals = std::get<std::vector<double>>(cfg.equilibrium);
        if (vals.size() != static_cast<std::size_t>(system.dim))
            throw ConfigError("config: explicit equilibrium has wrong dimension");
        Vector x(system.dim);
        for (int i = 0; i < system.dim; ++i) x(i) = vals[static_cast<std::size_t>(i)];
        if (system.rhs(x).norm() > 1e-8)
            throw ConfigError("config: explicit point is not an equilibrium");
        return x;
    }
    throw ConfigError("config: missing equilibrium");
}

std::vector<ModeTarget> mode_targets(const ExperimentConfig& cfg) {
    std::vector<ModeTarget> out;
    for (const TargetSpec& spec : cfg.targets) {
        ModeTarget mt;
        mt.mode = spec.mode;
        if (spec.is_complex) {
            mt.kind = ModeTarget::Kind::Complex;
            mt.rho = spec.rho;
            if (!spec.theta_auto) mt.theta = spec.theta;
        } else {
            mt.kind = ModeTarget::Kind::Real;
            mt.zeta = spec.zeta;
        }
        out.push_back(mt);
    }
    return out;
}

namespace {

json matrix_to_json(const Matrix& M) {
    json j;
    j["rows"] = M.rows();
    j["cols"] = M.cols();
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(M.size()));
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) data.push_back(M(r, c));
    j["data"] = data;
    return j;
}

Matrix matrix_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ConfigError("design: matrix entry count mismatch");
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            M(r, c) = data[static_cast<std::size_t>(r * cols + c)];
    return M;
}

} // namespace

std::string design_to_json(const ControllerDesign& design) {
    json j;
    j["tau"] = design.tau;
    j["A"] = matrix_to_json(design.A);
    j["V"] = matrix_to_json(design.blockForm.V);
    j["D"] = matrix_to_json(design.blockForm.D);
    j["Ktilde"] = matrix_to_json(design.Ktilde);
    j["K"] = matrix_to_json(design.K);
    json layout = json::array();
    for (const Block& b : design.blockForm.layout)
        layout.push_back({{"kind", b.kind == BlockKind::Real ? "real" : "complex"},
                          {"start", b.start},
                          {"size", b.size}});
    j["layout"] = layout;
    json targets = json::array();
    for (const ModeTarget& t : design.targets) {
        json jt;
        jt["mode"] = t.mode;
        switch (t.kind) {
            case ModeTarget::Kind::Real: jt["kind"] = "real"; break;
            case ModeTarget::Kind::Complex: jt["kind"] = "complex"; break;
            case ModeTarget::Kind::Jordan: jt["kind"] = "jordan"; break;
        }
        if (t.kind == ModeTarget::Kind::Complex) {
            jt["rho"] = t.rho;
            if (t.theta) jt["theta"] = *t.theta;
        } else {
            jt["zeta"] = t.zeta;
        }
        targets.push_back(jt);
    }
    j["targets"] = targets;
    json spectrum = json::array();
    for (const Complex& z : design.blockForm.spectrum.values)
        spectrum.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["spectrum"] = spectrum;
    return j.dump(2) + "\n";
}

ControllerDesign design_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("design: invalid JSON: ") + e.what());
    }
    try {
        ControllerDesign d;
        d.tau = j.at("tau").get<double>();
        d.A = matrix_from_json(j.at("A"));
        d.blockForm.V = matrix_from_json(j.at("V"));
        d.blockForm.D = matrix_from_json(j.at("D"));
        d.Ktilde = matrix_from_json(j.at("Ktilde"));
        d.K = matrix_from_json(j.at("K"));
        for (const json& jb : j.at("layout")) {
            Block b;
            b.kind = jb.at("kind").get<std::string>() == "real" ? BlockKind::Real
                                                                : BlockKind::Complex;
            b.start = jb.at("start").get<int>();
            b.size = jb.at("size").get<int>();
            d.blockForm.layout.push_back(b);
        }
        for (const json& jt : j.at("targets")) {
            ModeTarget t;
            t.mode = jt.at("mode").get<int>();
            const std::string kind = jt.at("kind").get<std::string>();
            t.kind = kind == "real"      ? ModeTarget::Kind::Real
                     : kind == "complex" ? ModeTarget::Kind::Complex
                                         : ModeTarget::Kind::Jordan;
            if (t.kind == ModeTarget::Kind::Complex) {
                t.rho = jt.at("rho").get<double>();
                if (jt.contains("theta")) t.theta = jt.at("theta").get<double>();
            } else {
                t.zeta = jt.at("zeta").get<double>();
            }
            d.targets.push_back(t);
        }
        for (const json& jz : j.at("spectrum"))
            d.blockForm.spectrum.values.emplace_back(jz.at("re").get<double>(),
                                                     jz.at("im").get<double>());
        const int n = static_cast<int>(d.A.rows());
        d.blockForm.spectrum.pairing.assign(static_cast<std::size_t>(n), 0);
        for (const Block& b : d.blockForm.layout) {
            if (b.kind == BlockKind::Real) d.blockForm.spectrum.pairing[b.start] = b.start;
            else {
                d.blockForm.spectrum.pairing[b.start] = b.start + 1;
                d.blockForm.spectrum.pairing[b.start + 1] = b.start;
            }
        }
        d.blockForm.spectrum.multiplicities.assign(static_cast<std::size_t>(n), 1);
        return d;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("design: missing or malformed field: ") + e.what());
    }
}

} // namespace tdfc
