#include "tclsim/scenario.hpp"

#include "tclsim/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tclsim {

namespace {

bool same_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

class Parser {
public:
    explicit Parser(std::string_view source) : source_(source) {}

    [[noreturn]] void fail(const YAML::Node& n, const std::string& path, const std::string& msg) const
    {
        const YAML::Mark m = n.Mark();
        if (m.line >= 0)
            throw ConfigError(fmt::format("{}:{}: {}: {}", source_, m.line + 1, path, msg));
        throw ConfigError(fmt::format("{}: {}: {}", source_, path, msg));
    }

    void only_keys(const YAML::Node& n, const std::string& path, std::initializer_list<std::string_view> keys) const
    {
        if (!n.IsMap())
            fail(n, path, "expected a mapping");
        for (const auto& kv : n) {
            const std::string k = kv.first.as<std::string>();
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                fail(kv.first, path.empty() ? k : path + "." + k, "unknown key");
        }
    }

    double number(const YAML::Node& n, const std::string& path) const
    {
        if (!n.IsScalar())
            fail(n, path, "expected a number");
        try {
            const std::string s = n.as<std::string>();
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size())
                fail(n, path, "'" + s + "' is not a number");
            return v;
        } catch (const std::invalid_argument&) {
            fail(n, path, "'" + n.as<std::string>() + "' is not a number");
        } catch (const std::out_of_range&) {
            fail(n, path, "number out of range");
        }
    }

    std::uint64_t integer(const YAML::Node& n, const std::string& path) const
    {
        if (!n.IsScalar())
            fail(n, path, "expected a non-negative integer");
        const std::string s = n.as<std::string>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            fail(n, path, "'" + s + "' is not a non-negative integer");
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            fail(n, path, "integer out of range");
        }
    }

    bool boolean(const YAML::Node& n, const std::string& path) const
    {
        const std::string s = n.IsScalar() ? n.as<std::string>() : "";
        if (s == "true")
            return true;
        if (s == "false")
            return false;
        fail(n, path, "expected true or false");
    }

    std::string text(const YAML::Node& n, const std::string& path) const
    {
        if (!n.IsScalar())
            fail(n, path, "expected a string");
        return n.as<std::string>();
    }

    Range range(const YAML::Node& n, const std::string& path) const
    {
        if (!n.IsSequence() || n.size() != 2)
            fail(n, path, "expected [lo, hi]");
        return {number(n[0], path + "[0]"), number(n[1], path + "[1]")};
    }

    // Dense row-major block: a list of rows, or text with one row per line.
    Eigen::MatrixXd matrix(const YAML::Node& n, const std::string& path) const
    {
        std::vector<std::vector<double>> rows;
        if (n.IsSequence()) {
            for (std::size_t i = 0; i < n.size(); ++i) {
                const YAML::Node& row = n[i];
                const std::string rp = fmt::format("{}[{}]", path, i);
                if (!row.IsSequence())
                    fail(row, rp, "expected a row list");
                std::vector<double> r;
                for (std::size_t j = 0; j < row.size(); ++j)
                    r.push_back(number(row[j], fmt::format("{}[{}]", rp, j)));
                rows.push_back(std::move(r));
            }
        } else if (n.IsScalar()) {
            std::istringstream lines(n.as<std::string>());
            std::string line;
            while (std::getline(lines, line)) {
                if (line.find_first_not_of(" \t\r") == std::string::npos)
                    continue;
                std::istringstream cells(line);
                std::vector<double> r;
                std::string cell;
                while (cells >> cell) {
                    std::size_t used = 0;
                    double v = 0.0;
                    try {
                        v = std::stod(cell, &used);
                    } catch (const std::exception&) {
                        used = 0;
                    }
                    if (used != cell.size() || cell.empty())
                        fail(n, path, "'" + cell + "' is not a number");
                    r.push_back(v);
                }
                rows.push_back(std::move(r));
            }
        } else {
            fail(n, path, "expected a matrix block");
        }
        const std::size_t cols = rows.empty() ? 0 : rows.front().size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                fail(n, path, fmt::format("row {} has {} entries, expected {}", i, rows[i].size(), cols));
        }
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        return m;
    }

    void grid(const YAML::Node& n, GridConfig& g) const
    {
        only_keys(n, "grid", {"model", "M", "D", "governor", "matrices"});
        if (n["model"]) {
            const std::string m = text(n["model"], "grid.model");
            if (m == "governor")
                g.kind = GridConfig::Kind::Governor;
            else if (m == "inertia")
                g.kind = GridConfig::Kind::Inertia;
            else if (m == "matrices")
                g.kind = GridConfig::Kind::Matrices;
            else
                fail(n["model"], "grid.model", "expected governor, inertia or matrices");
        }
        if (n["M"])
            g.M = number(n["M"], "grid.M");
        if (n["D"])
            g.D = number(n["D"], "grid.D");
        if (const YAML::Node gov = n["governor"]) {
            only_keys(gov, "grid.governor", {"Tg", "Kp", "Ki"});
            if (gov["Tg"])
                g.Tg = number(gov["Tg"], "grid.governor.Tg");
            if (gov["Kp"])
                g.Kp = number(gov["Kp"], "grid.governor.Kp");
            if (gov["Ki"])
                g.Ki = number(gov["Ki"], "grid.governor.Ki");
        }
        if (const YAML::Node mat = n["matrices"]) {
            only_keys(mat, "grid.matrices", {"A_hat", "B_hat", "C_hat", "D_hat"});
            for (const char* k : {"A_hat", "B_hat", "C_hat", "D_hat"}) {
                if (!mat[k])
                    fail(mat, "grid.matrices", std::string("missing block ") + k);
            }
            g.matrices.A_hat = matrix(mat["A_hat"], "grid.matrices.A_hat");
            g.matrices.B_hat = matrix(mat["B_hat"], "grid.matrices.B_hat");
            g.matrices.C_hat = matrix(mat["C_hat"], "grid.matrices.C_hat");
            g.matrices.D_hat = number(mat["D_hat"], "grid.matrices.D_hat");
            const Eigen::Index k = g.matrices.A_hat.rows();
            if (g.matrices.A_hat.cols() != k)
                fail(mat["A_hat"], "grid.matrices.A_hat", "must be square");
            if (g.matrices.B_hat.rows() != k || g.matrices.B_hat.cols() != 1)
                fail(mat["B_hat"], "grid.matrices.B_hat", fmt::format("must be {}x1", k));
            if (g.matrices.C_hat.rows() != 1 || g.matrices.C_hat.cols() != k)
                fail(mat["C_hat"], "grid.matrices.C_hat", fmt::format("must be 1x{}", k));
        } else if (g.kind == GridConfig::Kind::Matrices && g.matrices.A_hat.size() == 0 &&
                   g.matrices.B_hat.rows() == 0) {
            fail(n, "grid.matrices", "model 'matrices' needs a matrices block");
        }
    }

    void population(const YAML::Node& n, ScenarioConfig& c) const
    {
        only_keys(n, "population", {"n_loads", "gamma", "ranges"});
        if (n["n_loads"])
            c.n_loads = integer(n["n_loads"], "population.n_loads");
        if (n["gamma"])
            c.gamma = number(n["gamma"], "population.gamma");
        if (const YAML::Node r = n["ranges"]) {
            only_keys(r, "population.ranges", {"T_amb", "T_hi", "T_lo", "k", "cop_load", "omega1", "eps"});
            auto set = [&](const char* key, Range& dst) {
                if (r[key])
                    dst = range(r[key], std::string("population.ranges.") + key);
            };
            set("T_amb", c.ranges.T_amb);
            set("T_hi", c.ranges.T_hi);
            set("T_lo", c.ranges.T_lo);
            set("k", c.ranges.k);
            set("cop_load", c.ranges.cop_load);
            set("omega1", c.ranges.omega1);
            set("eps", c.ranges.eps);
        }
    }

    void thresholds(const YAML::Node& n, ThresholdConfig& t) const
    {
        only_keys(n, "thresholds", {"mode", "delta", "margin", "range"});
        if (n["mode"]) {
            const std::string m = text(n["mode"], "thresholds.mode");
            if (m == "sampled")
                t.mode = ThresholdConfig::Mode::Sampled;
            else if (m == "allocate")
                t.mode = ThresholdConfig::Mode::Allocate;
            else
                fail(n["mode"], "thresholds.mode", "expected sampled or allocate");
        }
        if (n["delta"])
            t.delta = number(n["delta"], "thresholds.delta");
        if (n["margin"])
            t.margin = number(n["margin"], "thresholds.margin");
        if (n["range"])
            t.range = range(n["range"], "thresholds.range");
    }

    void scheme(const YAML::Node& n, SchemeKind& s) const
    {
        only_keys(n, "scheme", {"kind", "K_pi", "v_des"});
        if (n["kind"]) {
            try {
                s = parse_scheme_name(text(n["kind"], "scheme.kind"));
            } catch (const ConfigError& e) {
                fail(n["kind"], "scheme.kind", e.what());
            }
        }
        auto gains = [&](auto& r) {
            if (n["K_pi"])
                r.K_pi = number(n["K_pi"], "scheme.K_pi");
            if (n["v_des"])
                r.v_des = number(n["v_des"], "scheme.v_des");
        };
        if (auto* r = std::get_if<RandomizedFreq>(&s))
            gains(*r);
        else if (auto* r = std::get_if<RandomizedFreqHighGain>(&s))
            gains(*r);
        else if (n["K_pi"] || n["v_des"])
            fail(n, "scheme", "K_pi and v_des apply to randomized schemes only");
    }

    void disturbance(const YAML::Node& n, std::vector<DisturbanceStep>& d) const
    {
        if (!n.IsSequence() || n.size() == 0)
            fail(n, "disturbance", "expected a non-empty list of [time, level]");
        d.clear();
        for (std::size_t i = 0; i < n.size(); ++i) {
            const std::string p = fmt::format("disturbance[{}]", i);
            if (!n[i].IsSequence() || n[i].size() != 2)
                fail(n[i], p, "expected [time, level]");
            d.push_back({number(n[i][0], p), number(n[i][1], p)});
            if (i == 0 && d[0].time != 0.0)
                fail(n[i], p, "the profile must start at time 0");
            if (i > 0 && !(d[i].time > d[i - 1].time))
                fail(n[i], p, "times must be strictly increasing");
        }
    }

    void body(const YAML::Node& root, ScenarioConfig& c) const
    {
        only_keys(root, "", {"preset", "name", "seed", "horizon", "max_step", "event_tol", "offset_demand", "channel",
                             "threads", "output_dir", "grid", "population", "thresholds", "scheme", "disturbance",
                             "tolerances", "metrics", "stats"});
        if (root["name"])
            c.name = text(root["name"], "name");
        if (root["seed"])
            c.seed = integer(root["seed"], "seed");
        if (root["horizon"])
            c.horizon = number(root["horizon"], "horizon");
        if (root["max_step"])
            c.max_step = number(root["max_step"], "max_step");
        if (root["event_tol"])
            c.event_tol = number(root["event_tol"], "event_tol");
        if (root["offset_demand"])
            c.offset_demand = boolean(root["offset_demand"], "offset_demand");
        if (root["channel"]) {
            const std::string ch = text(root["channel"], "channel");
            if (ch == "coupled")
                c.channel = OmegaChannel::Coupled;
            else if (ch == "clamped")
                c.channel = OmegaChannel::Clamped;
            else if (ch == "open")
                c.channel = OmegaChannel::Open;
            else
                fail(root["channel"], "channel", "expected coupled, clamped or open");
        }
        if (root["threads"])
            c.threads = static_cast<unsigned>(integer(root["threads"], "threads"));
        if (root["output_dir"])
            c.output_dir = text(root["output_dir"], "output_dir");
        if (root["grid"])
            grid(root["grid"], c.grid);
        if (root["population"])
            population(root["population"], c);
        if (root["thresholds"])
            thresholds(root["thresholds"], c.thresholds);
        if (root["scheme"])
            scheme(root["scheme"], c.scheme);
        if (root["disturbance"])
            disturbance(root["disturbance"], c.disturbance);
        if (const YAML::Node t = root["tolerances"]) {
            only_keys(t, "tolerances", {"hurwitz", "one_norm"});
            if (t["hurwitz"])
                c.hurwitz_tol = number(t["hurwitz"], "tolerances.hurwitz");
            if (t["one_norm"])
                c.one_norm_tol = number(t["one_norm"], "tolerances.one_norm");
        }
        if (const YAML::Node m = root["metrics"]) {
            only_keys(m, "metrics", {"eps", "t_from"});
            if (m["eps"])
                c.metrics_eps = number(m["eps"], "metrics.eps");
            if (m["t_from"])
                c.metrics_t_from = number(m["t_from"], "metrics.t_from");
        }
        if (const YAML::Node s = root["stats"]) {
            only_keys(s, "stats", {"horizon", "pairs"});
            if (s["horizon"])
                c.stats_horizon = number(s["horizon"], "stats.horizon");
            if (s["pairs"])
                c.stats_pairs = integer(s["pairs"], "stats.pairs");
        }
    }

private:
    std::string source_;
};

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

std::string fmt_matrix(const Eigen::MatrixXd& m)
{
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += i ? ", [" : "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out += (j ? ", " : "") + fmt_double(m(i, j));
        out += "]";
    }
    return out + "]";
}

std::string fmt_range(const Range& r) { return fmt::format("[{}, {}]", fmt_double(r.lo), fmt_double(r.hi)); }

}  // namespace

bool GridConfig::operator==(const GridConfig& o) const
{
    return kind == o.kind && M == o.M && D == o.D && Tg == o.Tg && Kp == o.Kp && Ki == o.Ki &&
           same_matrix(matrices.A_hat, o.matrices.A_hat) && same_matrix(matrices.B_hat, o.matrices.B_hat) &&
           same_matrix(matrices.C_hat, o.matrices.C_hat) && matrices.D_hat == o.matrices.D_hat;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const
{
    return name == o.name && seed == o.seed && horizon == o.horizon && max_step == o.max_step &&
           event_tol == o.event_tol && offset_demand == o.offset_demand && channel == o.channel &&
           threads == o.threads && output_dir == o.output_dir && grid == o.grid && n_loads == o.n_loads &&
           gamma == o.gamma && ranges == o.ranges && thresholds == o.thresholds && scheme == o.scheme &&
           disturbance == o.disturbance && hurwitz_tol == o.hurwitz_tol && one_norm_tol == o.one_norm_tol &&
           metrics_eps == o.metrics_eps && metrics_t_from == o.metrics_t_from && stats_horizon == o.stats_horizon &&
           stats_pairs == o.stats_pairs;
}

std::vector<std::string> preset_names() { return {"paper-vi-desk", "free-running-200"}; }

ScenarioConfig preset(std::string_view name)
{
    ScenarioConfig c;
    if (name == "paper-vi-desk") {
        c.name = "paper-vi-desk";
        c.seed = 20190101;
        c.horizon = 600.0;
        c.max_step = 0.01;
        c.grid.kind = GridConfig::Kind::Governor;
        c.grid.M = 60.0;
        c.grid.D = 5.0;
        c.grid.Tg = 5.0;
        c.grid.Kp = 20.0;
        c.grid.Ki = 1.0;
        c.n_loads = 500;
        c.gamma = 25.0;
        c.thresholds.mode = ThresholdConfig::Mode::Allocate;
        c.thresholds.delta = 1e-3;
        c.thresholds.margin = 0.2;
        c.scheme = DeterministicFreq{};
        c.disturbance = {{0.0, 0.0}, {1.0, 10.0}};
        c.metrics_eps = 0.01;
        c.metrics_t_from = 1.0;
        c.stats_horizon = 2e5;
        return c;
    }
    if (name == "free-running-200") {
        c.name = "free-running-200";
        c.seed = 42;
        c.horizon = 2e5;
        c.max_step = 2e5;
        c.channel = OmegaChannel::Open;
        c.offset_demand = false;
        c.n_loads = 200;
        c.gamma = 10.0;
        c.scheme = Conventional{};
        c.stats_horizon = 2e5;
        return c;
    }
    throw ConfigError(fmt::format("unknown preset '{}'", name));
}

SchemeKind parse_scheme_name(std::string_view name)
{
    if (name == "conventional" || name == "i")
        return Conventional{};
    if (name == "deterministic" || name == "ii")
        return DeterministicFreq{};
    if (name == "randomized" || name == "iii")
        return RandomizedFreq{};
    if (name == "randomized-high-gain" || name == "iv")
        return RandomizedFreqHighGain{};
    throw ConfigError(fmt::format("unknown scheme '{}' (conventional, deterministic, randomized, "
                                  "randomized-high-gain)",
                                  name));
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view source)
{
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(fmt::format("{}:{}: malformed YAML: {}", source, e.mark.line + 1, e.msg));
    }
    Parser p(source);
    if (!root.IsMap())
        p.fail(root, "<root>", "expected a mapping at the top level");
    ScenarioConfig c;
    if (root["preset"]) {
        const std::string name = p.text(root["preset"], "preset");
        try {
            c = preset(name);
        } catch (const ConfigError& e) {
            p.fail(root["preset"], "preset", e.what());
        }
    }
    try {
        p.body(root, c);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("{}:{}: {}", source, e.mark.line + 1, e.msg));
    }
    return c;
}

ScenarioConfig load_scenario_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(fmt::format("cannot read scenario file '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string serialize_scenario(const ScenarioConfig& c)
{
    std::string o;
    auto line = [&](const std::string& s) { o += s + "\n"; };
    line(fmt::format("name: \"{}\"", c.name));
    line(fmt::format("seed: {}", c.seed));
    line("horizon: " + fmt_double(c.horizon));
    line("max_step: " + fmt_double(c.max_step));
    line("event_tol: " + fmt_double(c.event_tol));
    line(fmt::format("offset_demand: {}", c.offset_demand ? "true" : "false"));
    line(fmt::format("channel: {}", c.channel == OmegaChannel::Coupled   ? "coupled"
                                    : c.channel == OmegaChannel::Clamped ? "clamped"
                                                                         : "open"));
    line(fmt::format("threads: {}", c.threads));
    line(fmt::format("output_dir: \"{}\"", c.output_dir));
    line("grid:");
    line(fmt::format("  model: {}", c.grid.kind == GridConfig::Kind::Governor  ? "governor"
                                    : c.grid.kind == GridConfig::Kind::Inertia ? "inertia"
                                                                               : "matrices"));
    line("  M: " + fmt_double(c.grid.M));
    line("  D: " + fmt_double(c.grid.D));
    line("  governor:");
    line("    Tg: " + fmt_double(c.grid.Tg));
    line("    Kp: " + fmt_double(c.grid.Kp));
    line("    Ki: " + fmt_double(c.grid.Ki));
    if (c.grid.kind == GridConfig::Kind::Matrices) {
        line("  matrices:");
        line("    A_hat: " + fmt_matrix(c.grid.matrices.A_hat));
        line("    B_hat: " + fmt_matrix(c.grid.matrices.B_hat));
        line("    C_hat: " + fmt_matrix(c.grid.matrices.C_hat));
        line("    D_hat: " + fmt_double(c.grid.matrices.D_hat));
    }
    line("population:");
    line(fmt::format("  n_loads: {}", c.n_loads));
    line("  gamma: " + fmt_double(c.gamma));
    line("  ranges:");
    line("    T_amb: " + fmt_range(c.ranges.T_amb));
    line("    T_hi: " + fmt_range(c.ranges.T_hi));
    line("    T_lo: " + fmt_range(c.ranges.T_lo));
    line("    k: " + fmt_range(c.ranges.k));
    line("    cop_load: " + fmt_range(c.ranges.cop_load));
    line("    omega1: " + fmt_range(c.ranges.omega1));
    line("    eps: " + fmt_range(c.ranges.eps));
    line("thresholds:");
    line(fmt::format("  mode: {}", c.thresholds.mode == ThresholdConfig::Mode::Allocate ? "allocate" : "sampled"));
    line("  delta: " + fmt_double(c.thresholds.delta));
    line("  margin: " + fmt_double(c.thresholds.margin));
    line("  range: " + fmt_range(c.thresholds.range));
    line("scheme:");
    line("  kind: " + scheme_name(c.scheme));
    if (is_randomized(c.scheme)) {
        const auto [K, v] = randomized_gains(c.scheme);
        line("  K_pi: " + fmt_double(K));
        line("  v_des: " + fmt_double(v));
    }
    line("disturbance:");
    for (const auto& d : c.disturbance)
        line(fmt::format("  - [{}, {}]", fmt_double(d.time), fmt_double(d.level)));
    line("tolerances:");
    line("  hurwitz: " + fmt_double(c.hurwitz_tol));
    line("  one_norm: " + fmt_double(c.one_norm_tol));
    line("metrics:");
    line("  eps: " + fmt_double(c.metrics_eps));
    line("  t_from: " + fmt_double(c.metrics_t_from));
    line("stats:");
    line("  horizon: " + fmt_double(c.stats_horizon));
    line(fmt::format("  pairs: {}", c.stats_pairs));
    return o;
}

StateSpace build_grid(const GridConfig& g, double hurwitz_tol)
{
    GenDynamics gen;
    switch (g.kind) {
    case GridConfig::Kind::Governor: gen = GenDynamics::governor_with_secondary(g.Tg, g.Kp, g.Ki); break;
    case GridConfig::Kind::Inertia: gen = GenDynamics::none(); break;
    case GridConfig::Kind::Matrices: gen = g.matrices; break;
    }
    return certify_hurwitz(build_combined_system(gen, g.M, g.D), hurwitz_tol);
}

BuiltScenario build_scenario(const ScenarioConfig& c)
{
    BuiltScenario b;
    Scenario& s = b.sim;
    PopulationSpec spec;
    spec.n_loads = c.n_loads;
    spec.gamma = c.gamma;
    spec.ranges = c.ranges;
    spec.seed = c.seed;
    s.population = sample_population(spec);
    s.scheme = c.scheme;
    s.disturbance = c.disturbance;
    s.horizon = c.horizon;
    s.max_step = c.max_step;
    s.seed = c.seed;
    s.event_tol = c.event_tol;
    s.offset_demand = c.offset_demand;
    s.channel = c.channel;
    s.threads = c.threads;
    s.design_delta = c.thresholds.delta;
    if (c.channel != OmegaChannel::Open) {
        s.grid = build_grid(c.grid, c.hurwitz_tol);
        b.L_hat = one_norm(s.grid, c.one_norm_tol);
        if (c.thresholds.mode == ThresholdConfig::Mode::Allocate) {
            b.allocation = allocate_thresholds(s.population, b.L_hat, c.thresholds.delta, c.thresholds.margin,
                                               c.thresholds.range);
            s.population = b.allocation->population;
        }
    }
    s.validate();
    return b;
}

std::string sha256_hex(std::string_view data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", md[i]);
    return hex;
}

}  // namespace tclsim
