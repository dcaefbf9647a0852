// tclsim: run, compare, certify and stats front end.
//
// Exit codes: 0 success, 2 configuration error, 3 numeric or simulation
// error, 4 certification failure.

#include "tclsim/aggregate_stats.hpp"
#include "tclsim/error.hpp"
#include "tclsim/hybrid_sim.hpp"
#include "tclsim/scenario.hpp"
#include "tclsim/threshold_design.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace tclsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCertify = 4;

struct Overrides {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    std::optional<double> horizon;
    std::optional<unsigned> threads;
};

ScenarioConfig load(const Overrides& o)
{
    ScenarioConfig c = load_scenario_file(o.scenario);
    if (o.seed)
        c.seed = *o.seed;
    if (o.scheme)
        c.scheme = parse_scheme_name(*o.scheme);
    if (o.horizon)
        c.horizon = *o.horizon;
    if (o.threads)
        c.threads = *o.threads;
    return c;
}

fs::path out_dir(const Overrides& o, const ScenarioConfig& c)
{
    fs::path p = o.out.empty() ? fs::path(c.output_dir) : fs::path(o.out);
    fs::create_directories(p);
    return p;
}

class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content)
    {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f)
            throw ConfigError(fmt::format("cannot write '{}'", (dir_ / name).string()));
        f << content;
        files_.emplace_back(name, sha256_hex(content));
    }

    template <class F>
    void write_with(const std::string& name, F&& f)
    {
        std::ostringstream ss;
        f(ss);
        write(name, ss.str());
    }

    void manifest(const std::string& command, const ScenarioConfig& c)
    {
        const std::string canonical = serialize_scenario(c);
        std::string m;
        m += fmt::format("tool: tclsim {}\n", TCLSIM_VERSION);
        m += fmt::format("command: {}\n", command);
        m += fmt::format("eigen: {}.{}.{}\n", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
        m += fmt::format("seed: {}\n", c.seed);
        m += fmt::format("scenario_sha256: {}\n", sha256_hex(canonical));
        m += "files:\n";
        for (const auto& [name, hash] : files_)
            m += fmt::format("  {}: {}\n", name, hash);
        m += "scenario: |\n";
        std::istringstream lines(canonical);
        std::string line;
        while (std::getline(lines, line))
            m += "  " + line + "\n";
        std::ofstream f(dir_ / "manifest.yaml", std::ios::binary);
        f << m;
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

void print_warnings(const Trace& tr)
{
    for (const auto& w : tr.warnings)
        std::cerr << "warning: " << w << '\n';
}

int cmd_run(const Overrides& o)
{
    const ScenarioConfig c = load(o);
    const BuiltScenario b = build_scenario(c);
    const Trace tr = simulate(b.sim);
    print_warnings(tr);
    const FrequencyMetrics m = dwell_time_report(tr, c.metrics_eps, c.metrics_t_from);

    OutputSet out(out_dir(o, c));
    out.write_with("trace.csv", [&](std::ostream& os) { write_trace_csv(os, tr); });
    out.write_with("switch_events.csv", [&](std::ostream& os) { write_events_csv(os, tr); });
    out.write_with("metrics.yaml", [&](std::ostream& os) {
        os << fmt::format("scheme: {}\n", scheme_name(c.scheme));
        os << fmt::format("L_hat: {:.17g}\n", b.L_hat);
        os << fmt::format("jump_passes: {}\n", tr.jump_passes);
        os << fmt::format("storm_instants: {}\n", tr.storm_instants);
        os << fmt::format("frequency_events: {}\n", tr.frequency_events);
        write_metrics(os, m);
    });
    out.manifest("run", c);
    std::cout << fmt::format("peak |omega| = {:.6g} Hz at t = {:.6g} s, {} switches, min gap {:.6g} s\n",
                             m.peak_abs_omega, m.peak_time, m.total_switches, m.min_interswitch_gap);
    return kExitOk;
}

int cmd_compare(const Overrides& o)
{
    const ScenarioConfig c = load(o);
    const BuiltScenario b = build_scenario(c);
    const auto runs = compare_schemes(b.sim, c.metrics_eps, c.metrics_t_from);

    OutputSet out(out_dir(o, c));
    std::string table = "case,scheme,peak_abs_omega,peak_time,settle_time,longest_window,min_interswitch_gap,"
                        "total_switches\n";
    for (const auto& r : runs) {
        const std::string name = scheme_name(r.scheme);
        print_warnings(r.trace);
        table += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.label, name,
                             r.metrics.peak_abs_omega, r.metrics.peak_time, r.metrics.settle_time,
                             r.metrics.longest_window, r.metrics.min_interswitch_gap, r.metrics.total_switches);
        out.write_with("trace_" + name + ".csv", [&](std::ostream& os) { write_trace_csv(os, r.trace); });
        out.write_with("switch_events_" + name + ".csv", [&](std::ostream& os) { write_events_csv(os, r.trace); });
        out.write_with("omega_" + name + ".csv", [&](std::ostream& os) {
            os << "t,value\n";
            for (const auto& s : r.trace.samples)
                os << fmt::format("{:.17g},{:.17g}\n", s.t, s.omega);
        });
        out.write_with("on_fraction_" + name + ".csv", [&](std::ostream& os) {
            os << "t,value\n";
            for (const auto& s : r.trace.samples)
                os << fmt::format("{:.17g},{:.17g}\n", s.t, s.on_fraction);
        });
        std::cout << fmt::format("{:6} {:22} peak |omega| = {:.6g} Hz\n", r.label, name, r.metrics.peak_abs_omega);
    }
    out.write("compare.csv", table);
    out.manifest("compare", c);
    return kExitOk;
}

int cmd_certify(const Overrides& o, std::optional<double> delta, std::optional<double> margin, bool allocate)
{
    ScenarioConfig c = load(o);
    if (c.channel == OmegaChannel::Open)
        c.channel = OmegaChannel::Coupled;
    // The population (and any allocation the scenario asks for) is built with
    // the scenario's own settings; the flags only change what is verified.
    const BuiltScenario b = build_scenario(c);
    const double d = delta.value_or(c.thresholds.delta);
    std::vector<TclParams> pop = b.sim.population;
    std::optional<Allocation> alloc;
    if (allocate) {
        alloc = allocate_thresholds(pop, b.L_hat, d, margin.value_or(c.thresholds.margin), c.thresholds.range);
        pop = alloc->population;
    }
    const DesignReport rep = verify_design_condition(pop, b.L_hat, d);
    std::ostringstream ss;
    write_design_report(ss, rep);
    if (alloc)
        ss << fmt::format("allocated_inactive_loads: {}\n", alloc->inactive.size());
    std::cout << ss.str();
    if (!o.out.empty()) {
        OutputSet out(out_dir(o, c));
        out.write("design_report.yaml", ss.str());
        out.write_with("population.csv", [&](std::ostream& os) { write_population_csv(os, pop); });
        out.manifest("certify", c);
    }
    return rep.satisfied ? kExitOk : kExitCertify;
}

int cmd_stats(const Overrides& o, std::optional<std::size_t> pairs, std::optional<std::size_t> loads)
{
    ScenarioConfig c = load(o);
    if (pairs)
        c.stats_pairs = *pairs;
    if (loads)
        c.n_loads = *loads;
    if (o.horizon)
        c.stats_horizon = *o.horizon;
    c.scheme = Conventional{};
    c.channel = OmegaChannel::Open;
    const BuiltScenario b = build_scenario(c);
    const StatsReport r = population_stats(b.sim.population, c.stats_horizon, c.seed, c.stats_pairs, c.threads);
    std::ostringstream report;
    write_stats_report(report, r);
    std::ostringstream pairs_csv;
    write_cross_terms_csv(pairs_csv, r);
    std::cout << report.str() << pairs_csv.str();
    if (!o.out.empty()) {
        OutputSet out(out_dir(o, c));
        out.write("stats.yaml", report.str());
        out.write("cross_terms.csv", pairs_csv.str());
        out.manifest("stats", c);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"TCL population / grid frequency co-simulator"};
    app.require_subcommand(1);

    Overrides o;
    std::uint64_t seed = 0;
    std::string scheme;
    double horizon = 0.0;
    unsigned threads = 1;
    auto common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--scenario", o.scenario, "Scenario YAML file")->required()->check(CLI::ExistingFile);
        if (with_out)
            sub->add_option("--out", o.out, "Output directory (default: the scenario's output_dir)");
        sub->add_option("--seed", seed, "Override the scenario seed");
        sub->add_option("--horizon", horizon, "Override the horizon in seconds");
        sub->add_option("--threads", threads, "Worker threads for per-load kernels (0 = all cores)");
    };

    CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
    common(run, true);
    run->add_option("--scheme", scheme, "conventional | deterministic | randomized | randomized-high-gain");

    CLI::App* compare = app.add_subcommand("compare", "Run the four schemes on identical inputs");
    common(compare, true);
    compare->add_option("--scheme", scheme, "Source of randomized gains");

    double delta = 0.0;
    double margin = 0.0;
    bool allocate = false;
    CLI::App* certify = app.add_subcommand("certify", "Verify the threshold design condition");
    common(certify, true);
    certify->add_option("--delta", delta, "Design delta in Hz");
    certify->add_option("--margin", margin, "Allocation margin in [0, 1)");
    certify->add_flag("--allocate", allocate, "Allocate thresholds before verifying");

    std::size_t pairs = 0;
    std::size_t loads = 0;
    CLI::App* stats = app.add_subcommand("stats", "Free-running variance and cross-term statistics");
    common(stats, true);
    stats->add_option("--pairs", pairs, "Number of cross-term pairs");
    stats->add_option("--loads", loads, "Override the number of loads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
    CLI::App* active = app.get_subcommands().front();
    if (given(active, "--seed"))
        o.seed = seed;
    if (given(active, "--horizon"))
        o.horizon = horizon;
    if (given(active, "--threads"))
        o.threads = threads;
    if ((active == run || active == compare) && given(active, "--scheme"))
        o.scheme = scheme;

    try {
        if (active == run)
            return cmd_run(o);
        if (active == compare)
            return cmd_compare(o);
        if (active == certify)
            return cmd_certify(o, given(certify, "--delta") ? std::optional(delta) : std::nullopt,
                               given(certify, "--margin") ? std::optional(margin) : std::nullopt, allocate);
        return cmd_stats(o, given(stats, "--pairs") ? std::optional(pairs) : std::nullopt,
                         given(stats, "--loads") ? std::optional(loads) : std::nullopt);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ZenoError& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
