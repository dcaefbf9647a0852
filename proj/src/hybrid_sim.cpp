#include "tclsim/hybrid_sim.hpp"

#include "tclsim/error.hpp"
#include "tclsim/kernels.hpp"
#include "tclsim/threshold_design.hpp"
#include "worker_pool.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace tclsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMinChunk = 128;
constexpr double kRedrawRelChange = 0.01;

// Simulation draws use a seed domain disjoint from population sampling.
std::uint64_t sim_seed(std::uint64_t seed) { return splitmix64(seed ^ 0xA5F152C3D7E94B61ULL); }

double draw_exponential(std::uint64_t seed, std::size_t load, std::uint64_t& counter)
{
    return -std::log(counter_uniform(seed, static_cast<std::uint64_t>(load), counter++));
}

class Engine {
public:
    Engine(const Scenario& sc, Trace& tr)
        : sc_(sc), tr_(tr), kt_(kernels::active()), pool_(sc.threads), n_(sc.population.size()),
          seed_(sim_seed(sc.seed))
    {
        deterministic_ = std::holds_alternative<DeterministicFreq>(sc.scheme);
        randomized_ = is_randomized(sc.scheme);
        std::tie(K_pi_, v_des_) = randomized_gains(sc.scheme);
        grid_on_ = sc.channel != OmegaChannel::Open;
        zeno_max_ = sc.zeno_max > 0 ? sc.zeno_max : 10 * static_cast<long>(n_);

        sigma_.assign(n_, 0.0);
        t0_.assign(n_, 0.0);
        T0_.assign(n_, 0.0);
        target_.assign(n_, 0.0);
        k_.resize(n_);
        d_bar_.resize(n_);
        omega1_guard_.assign(n_, kInf);
        omega1_rate_.resize(n_);
        t_thermo_.assign(n_, kInf);
        t_guard_.assign(n_, kInf);
        t_random_.assign(n_, kInf);
        flags_.assign(n_, 0);
        counter_.assign(n_, 2);
        for (std::size_t j = 0; j < n_; ++j) {
            const TclParams& p = sc.population[j];
            k_[j] = p.k;
            d_bar_[j] = p.d_bar;
            omega1_rate_[j] = p.omega1;
            if (deterministic_)
                omega1_guard_[j] = p.omega1;
        }
        if (randomized_) {
            base_on_.resize(n_);
            base_off_.resize(n_);
            rate_on_.resize(n_);
            rate_off_.resize(n_);
            rate_drawn_.assign(n_, 0.0);
            for (std::size_t j = 0; j < n_; ++j) {
                const Durations d = on_off_durations(sc.population[j]);
                base_on_[j] = v_des_ / d.pi_off;
                base_off_[j] = v_des_ / d.pi_on;
            }
        }
        offset_ = 0.0;
        if (sc.offset_demand) {
            for (const auto& p : sc.population)
                offset_ += duty_cycle(p) * p.d_bar;
        }
        const std::size_t chunk_target = pool_.size() > 1 && n_ >= 2 * kMinChunk ? pool_.size() : 1;
        chunk_ = (n_ + chunk_target - 1) / chunk_target;
        chunk_ = (chunk_ + 3) / 4 * 4;
        chunks_ = chunk_ == 0 ? 0 : (n_ + chunk_ - 1) / chunk_;
    }

    void run();

private:
    kernels::EventView view(std::size_t lo, std::size_t hi) const
    {
        const std::size_t len = hi - lo;
        return {std::span<const double>(sigma_).subspan(lo, len), std::span<const double>(t_thermo_).subspan(lo, len),
                std::span<const double>(t_guard_).subspan(lo, len), std::span<const double>(t_random_).subspan(lo, len),
                std::span<const double>(omega1_guard_).subspan(lo, len)};
    }

    template <class F>
    void for_chunks(F&& f)
    {
        if (chunks_ <= 1) {
            f(std::size_t{0}, n_);
            return;
        }
        pool_.run(chunks_, [&](std::size_t c) { f(c * chunk_, std::min(n_, (c + 1) * chunk_)); });
    }

    kernels::MinResult next_event(double omega)
    {
        if (chunks_ <= 1)
            return kt_.next_event(view(0, n_), omega, deterministic_);
        std::vector<kernels::MinResult> part(chunks_);
        pool_.run(chunks_, [&](std::size_t c) {
            const std::size_t lo = c * chunk_;
            const std::size_t hi = std::min(n_, lo + chunk_);
            part[c] = kt_.next_event(view(lo, hi), omega, deterministic_);
            if (part[c].index != kernels::MinResult::npos)
                part[c].index += lo;
        });
        kernels::MinResult best{kInf, kernels::MinResult::npos};
        for (const auto& r : part) {
            if (r.time < best.time || (r.time == best.time && r.index < best.index))
                best = r;
        }
        return best;
    }

    void mark_due(double t, double omega)
    {
        for_chunks([&](std::size_t lo, std::size_t hi) {
            kt_.due(view(lo, hi), t, omega, deterministic_, std::span<std::uint8_t>(flags_).subspan(lo, hi - lo));
        });
    }

    void refresh_rates(double omega)
    {
        for_chunks([&](std::size_t lo, std::size_t hi) {
            const std::size_t len = hi - lo;
            kt_.rates(std::span<const double>(base_on_).subspan(lo, len),
                      std::span<const double>(base_off_).subspan(lo, len),
                      std::span<const double>(omega1_rate_).subspan(lo, len), K_pi_, omega, kDefaultMaxRate,
                      std::span<double>(rate_on_).subspan(lo, len), std::span<double>(rate_off_).subspan(lo, len));
        });
    }

    void draw_clock(std::size_t j, double t)
    {
        const double r = sigma_[j] != 0.0 ? rate_off_[j] : rate_on_[j];
        rate_drawn_[j] = r;
        t_random_[j] = r > 0.0 ? t + draw_exponential(seed_, j, counter_[j]) / r : kInf;
    }

    // Clocks are memoryless, so a clock can be re-sampled whenever its rate moves.
    void redraw_stale_clocks(double t)
    {
        for (std::size_t j = 0; j < n_; ++j) {
            const double r = sigma_[j] != 0.0 ? rate_off_[j] : rate_on_[j];
            const double r0 = rate_drawn_[j];
            if (std::abs(r - r0) > kRedrawRelChange * r0 || (r0 == 0.0 && r > 0.0)) {
                draw_clock(j, t);
                ++tr_.rate_redraws;
            }
        }
    }

    void anchor(std::size_t j, double t, double T, int s)
    {
        const TclParams& p = sc_.population[j];
        sigma_[j] = s;
        t0_[j] = t;
        T0_[j] = T;
        target_[j] = p.target(s);
        t_thermo_[j] = t + time_to_level(p, T, s, s ? p.T_lo : p.T_hi);
        if (deterministic_)
            t_guard_[j] = t + time_to_level(p, T, s, s ? p.T_hi - p.eps : p.T_lo + p.eps);
        tr_.min_T[j] = std::min(tr_.min_T[j], T);
        tr_.max_T[j] = std::max(tr_.max_T[j], T);
    }

    double temperature(std::size_t j, double t) const
    {
        return kernels::anchored_temperature(t0_[j], T0_[j], target_[j], k_[j], t);
    }

    void recompute_demand()
    {
        d_s_ = kt_.weighted_sum(d_bar_, sigma_);
        double on = 0.0;
        for (double s : sigma_)
            on += s;
        on_fraction_ = n_ ? on / static_cast<double>(n_) : 0.0;
    }

    void record(double t)
    {
        Sample s;
        s.t = t;
        s.jumps = jumps_;
        s.omega = grid_on_ ? x_(0) : 0.0;
        s.d_s = d_s_;
        s.on_fraction = on_fraction_;
        tr_.samples.push_back(s);
        for (std::size_t i = 0; i < tr_.x_hat_dim; ++i)
            tr_.x_hat.push_back(x_(static_cast<Eigen::Index>(i + 1)));
    }

    double omega_seen() const { return sc_.channel == OmegaChannel::Coupled ? x_(0) : 0.0; }

    void jump_passes(double t);
    Eigen::VectorXd advance(double dt, double u) const;
    double locate_crossing(double t, double t_next, double u, Eigen::VectorXd& x_next);

    const Scenario& sc_;
    Trace& tr_;
    const kernels::KernelTable& kt_;
    WorkerPool pool_;
    std::size_t n_;
    std::uint64_t seed_;
    bool deterministic_ = false;
    bool randomized_ = false;
    bool grid_on_ = true;
    double K_pi_ = 0.0;
    double v_des_ = 1.0;
    long zeno_max_ = 0;
    std::size_t chunk_ = 0;
    std::size_t chunks_ = 0;

    std::vector<double> sigma_, t0_, T0_, target_, k_, d_bar_, omega1_guard_, omega1_rate_;
    std::vector<double> t_thermo_, t_guard_, t_random_;
    std::vector<double> base_on_, base_off_, rate_on_, rate_off_, rate_drawn_;
    std::vector<std::uint8_t> flags_;
    std::vector<std::uint64_t> counter_;

    Eigen::VectorXd x_;
    Discretization disc_;
    double offset_ = 0.0;
    double d_s_ = 0.0;
    double on_fraction_ = 0.0;
    long jumps_ = 0;
};

Eigen::VectorXd Engine::advance(double dt, double u) const
{
    const double h = disc_.dt();
    if (std::abs(dt - h) <= 1e-12 * h)
        return disc_.step(x_, u);
    return propagate(sc_.grid, x_, u, dt);
}

// Earliest threshold crossing of omega on (t, t_next] among loads that could
// act on it; returns t_next when there is none.
double Engine::locate_crossing(double t, double t_next, double u, Eigen::VectorXd& x_next)
{
    const double wa = x_(0);
    const double wb = x_next(0);
    if (wa == wb)
        return t_next;
    const bool up = wb > wa;
    double thr = kInf;
    for (std::size_t j = 0; j < n_; ++j) {
        const double w1 = omega1_guard_[j];
        if (!std::isfinite(w1) || t_guard_[j] > t_next)
            continue;
        if (up && sigma_[j] == 0.0 && w1 > wa && w1 <= wb)
            thr = std::min(thr, w1);
        else if (!up && sigma_[j] != 0.0 && -w1 < wa && -w1 >= wb)
            thr = std::min(thr, w1);
    }
    if (!std::isfinite(thr))
        return t_next;

    auto crossed = [&](double w) { return up ? w >= thr : w <= -thr; };
    double lo = 0.0;
    double hi = t_next - t;
    Eigen::VectorXd x_hi = x_next;
    while (hi - lo > sc_.event_tol) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi))
            break;
        Eigen::VectorXd xm = propagate(sc_.grid, x_, u, mid);
        if (crossed(xm(0))) {
            hi = mid;
            x_hi = std::move(xm);
        } else {
            lo = mid;
        }
    }
    ++tr_.frequency_events;
    x_next = std::move(x_hi);
    return t + hi;
}

void Engine::jump_passes(double t)
{
    const double omega = omega_seen();
    long passes = 0;
    long switched_here = 0;
    for (;;) {
        mark_due(t, omega);
        bool any = false;
        for (std::size_t j = 0; j < n_; ++j) {
            if (!flags_[j])
                continue;
            const int s = sigma_[j] != 0.0 ? 1 : 0;
            SwitchCause cause;
            if (t >= t_thermo_[j])
                cause = s ? SwitchCause::ThermostatLo : SwitchCause::ThermostatHi;
            else if (t < t_random_[j])
                cause = s ? SwitchCause::FreqOff : SwitchCause::FreqOn;
            else
                cause = SwitchCause::Randomized;
            const double T = temperature(j, t);
            anchor(j, t, T, 1 - s);
            if (randomized_)
                draw_clock(j, t);
            tr_.switch_events.push_back({t, j, 1 - s, cause, T});
            any = true;
            ++switched_here;
        }
        if (!any)
            break;
        ++passes;
        ++jumps_;
        ++tr_.jump_passes;
        recompute_demand();
        record(t);
        if (switched_here > zeno_max_) {
            throw ZenoError(fmt::format("Zeno guard: {} switches at t = {:.17g} s (limit {}); last load {}",
                                        switched_here, t, zeno_max_, tr_.switch_events.back().load),
                            t, switched_here);
        }
    }
    tr_.max_passes_at_instant = std::max(tr_.max_passes_at_instant, passes);
    if (passes > 1)
        ++tr_.storm_instants;
}

void Engine::run()
{
    const std::size_t dim = grid_on_ ? sc_.grid.dim() : 1;
    x_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    tr_.x_hat_dim = grid_on_ ? sc_.grid.n : 0;
    if (grid_on_)
        disc_ = Discretization(sc_.grid, sc_.max_step);

    tr_.n_loads = n_;
    tr_.horizon = sc_.horizon;
    tr_.initial_T.resize(n_);
    tr_.initial_sigma.resize(n_);
    tr_.min_T.assign(n_, kInf);
    tr_.max_T.assign(n_, -kInf);

    for (std::size_t j = 0; j < n_; ++j) {
        const TclParams& p = sc_.population[j];
        const double T = p.T_lo + (p.T_hi - p.T_lo) * counter_uniform(seed_, j, 0);
        const int s = counter_uniform(seed_, j, 1) < duty_cycle(p) ? 1 : 0;
        tr_.initial_T[j] = T;
        tr_.initial_sigma[j] = s;
        anchor(j, 0.0, T, s);
    }
    if (randomized_) {
        refresh_rates(0.0);
        for (std::size_t j = 0; j < n_; ++j)
            draw_clock(j, 0.0);
    }
    recompute_demand();

    double t = 0.0;
    std::size_t dist_idx = 0;
    double p_L = 0.0;
    while (dist_idx < sc_.disturbance.size() && sc_.disturbance[dist_idx].time <= 0.0)
        p_L = sc_.disturbance[dist_idx++].level;
    long grid_idx = 0;

    record(t);
    jump_passes(t);

    while (t < sc_.horizon) {
        const double omega = omega_seen();
        const kernels::MinResult ev = next_event(omega);
        const double next_grid = std::min(sc_.horizon, static_cast<double>(grid_idx + 1) * sc_.max_step);
        const double next_dist = dist_idx < sc_.disturbance.size() ? sc_.disturbance[dist_idx].time : kInf;
        double t_next = std::min({ev.time, next_grid, next_dist, sc_.horizon});
        if (!(t_next > t))
            t_next = std::nextafter(t, kInf);

        if (grid_on_) {
            const double u = p_L + d_s_ - offset_;
            Eigen::VectorXd x_next = advance(t_next - t, u);
            if (deterministic_ && sc_.channel == OmegaChannel::Coupled)
                t_next = locate_crossing(t, t_next, u, x_next);
            if (!x_next.allFinite())
                throw NumericError(fmt::format("non-finite grid state at t = {:.17g} s", t_next));
            x_ = std::move(x_next);
        }
        t = t_next;
        if (t >= next_grid)
            ++grid_idx;
        while (dist_idx < sc_.disturbance.size() && sc_.disturbance[dist_idx].time <= t)
            p_L = sc_.disturbance[dist_idx++].level;

        record(t);
        jump_passes(t);
        if (randomized_) {
            refresh_rates(omega_seen());
            redraw_stale_clocks(t);
        }
    }

    tr_.final_T.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        tr_.final_T[j] = temperature(j, sc_.horizon);
        tr_.min_T[j] = std::min(tr_.min_T[j], tr_.final_T[j]);
        tr_.max_T[j] = std::max(tr_.max_T[j], tr_.final_T[j]);
    }
}

const char* channel_name(OmegaChannel c)
{
    switch (c) {
    case OmegaChannel::Coupled: return "coupled";
    case OmegaChannel::Clamped: return "clamped";
    default: return "open";
    }
}

}  // namespace

void Scenario::validate() const
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ConfigError("scenario: horizon must be positive and finite");
    if (!(max_step > 0.0))
        throw ConfigError("scenario: max_step must be positive");
    if (!(event_tol > 0.0))
        throw ConfigError("scenario: event_tol must be positive");
    if (population.empty())
        throw ConfigError("scenario: population is empty");
    for (std::size_t j = 0; j < population.size(); ++j) {
        if (auto msg = tclsim::validate(population[j]); !msg.empty())
            throw ConfigError(fmt::format("scenario: load {}: {}", j, msg));
    }
    if (disturbance.empty() || disturbance.front().time != 0.0)
        throw ConfigError("scenario: disturbance profile must start at t = 0");
    for (std::size_t i = 0; i < disturbance.size(); ++i) {
        if (!std::isfinite(disturbance[i].level))
            throw ConfigError(fmt::format("scenario: disturbance level {} is not finite", i));
        if (i > 0 && !(disturbance[i].time > disturbance[i - 1].time))
            throw ConfigError("scenario: disturbance times must be strictly increasing");
    }
    validate_scheme(scheme);
    if (channel != OmegaChannel::Open) {
        const auto m = static_cast<Eigen::Index>(grid.dim());
        if (grid.A.rows() != m || grid.A.cols() != m || grid.B.size() != m || grid.C.size() != m)
            throw ConfigError("scenario: grid matrices do not match the declared dimension");
    }
}

Trace simulate(const Scenario& sc)
{
    sc.validate();
    Trace tr;
    tr.metadata["scheme"] = scheme_name(sc.scheme);
    tr.metadata["channel"] = channel_name(sc.channel);
    if (sc.channel != OmegaChannel::Open) {
        if (!sc.grid.certified && !is_hurwitz(sc.grid))
            throw NumericError("simulate: grid model is not Hurwitz");
        if (std::holds_alternative<DeterministicFreq>(sc.scheme) && sc.channel == OmegaChannel::Coupled) {
            const DesignReport rep = verify_design_condition(sc.population, one_norm(sc.grid), sc.design_delta);
            if (!rep.satisfied)
                tr.warnings.push_back(fmt::format("design condition violated at {} breakpoint(s); worst at {:.6g} Hz",
                                                  rep.violations.size(), rep.worst_point.omega_bar));
        }
    }
    if (is_randomized(sc.scheme))
        tr.metadata["randomized_clock"] = "exponential clocks re-sampled when a rate moves by more than 1%";
    Engine(sc, tr).run();
    return tr;
}

const char* cause_name(SwitchCause c)
{
    switch (c) {
    case SwitchCause::ThermostatHi: return "thermostat-hi";
    case SwitchCause::ThermostatLo: return "thermostat-lo";
    case SwitchCause::FreqOn: return "freq-on";
    case SwitchCause::FreqOff: return "freq-off";
    default: return "randomized";
    }
}

std::string validate_time_domain(const Trace& tr)
{
    if (tr.samples.empty())
        return "trace has no samples";
    if (tr.samples.front().t != 0.0 || tr.samples.front().jumps != 0)
        return "trace does not start at (0, 0)";
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        const Sample& a = tr.samples[i - 1];
        const Sample& b = tr.samples[i];
        if (b.t < a.t)
            return fmt::format("sample {}: time decreases", i);
        if (b.jumps < a.jumps)
            return fmt::format("sample {}: jump count decreases", i);
        if (b.jumps > a.jumps + 1)
            return fmt::format("sample {}: jump count skips", i);
        if (b.jumps == a.jumps + 1 && b.t != a.t)
            return fmt::format("sample {}: jump without a jump instant", i);
    }
    return {};
}

std::string validate_temperatures(const Trace& tr, const std::vector<TclParams>& pop, double tol)
{
    const std::size_t n = pop.size();
    if (tr.initial_T.size() != n || tr.final_T.size() != n)
        return "trace does not match the population size";
    std::vector<double> t0(n, 0.0), T0(tr.initial_T), min_T(tr.initial_T), max_T(tr.initial_T);
    std::vector<int> s(tr.initial_sigma);
    for (std::size_t e = 0; e < tr.switch_events.size(); ++e) {
        const SwitchEvent& ev = tr.switch_events[e];
        const TclParams& p = pop[ev.load];
        const double T = kernels::anchored_temperature(t0[ev.load], T0[ev.load], p.target(s[ev.load]), p.k, ev.t);
        if (T != ev.T)
            return fmt::format("event {}: load {} jumps at T = {:.17g}, flow gives {:.17g}", e, ev.load, ev.T, T);
        if (ev.sigma == s[ev.load])
            return fmt::format("event {}: load {} self-loop", e, ev.load);
        t0[ev.load] = ev.t;
        T0[ev.load] = T;
        s[ev.load] = ev.sigma;
        min_T[ev.load] = std::min(min_T[ev.load], T);
        max_T[ev.load] = std::max(max_T[ev.load], T);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const TclParams& p = pop[j];
        const double T = kernels::anchored_temperature(t0[j], T0[j], p.target(s[j]), p.k, tr.horizon);
        if (T != tr.final_T[j])
            return fmt::format("load {}: final temperature mismatch", j);
        min_T[j] = std::min(min_T[j], T);
        max_T[j] = std::max(max_T[j], T);
        if (min_T[j] < p.T_lo - tol || max_T[j] > p.T_hi + tol)
            return fmt::format("load {}: temperature range [{:.17g}, {:.17g}] leaves [{}, {}]", j, min_T[j], max_T[j],
                               p.T_lo, p.T_hi);
    }
    return {};
}

const char* region_name(Region r)
{
    switch (r) {
    case Region::Flow: return "flow";
    case Region::Jump: return "jump";
    default: return "both";
    }
}

LoadRegion classify_load(const TclParams& p, double T, int sigma, double omega)
{
    const double w1 = p.omega1;
    const double lo = p.T_lo;
    const double hi = p.T_hi;
    const double e = p.eps;

    bool allow0 = false;
    bool allow1 = false;
    if (T > hi || (omega > w1 && T > lo + e)) {
        allow1 = true;
    } else if (T < lo || (omega < -w1 && T < hi - e)) {
        allow0 = true;
    } else if ((std::abs(omega) <= w1 && lo <= T && T <= hi) || (omega <= -w1 && T >= hi - e && T <= hi) ||
               (omega >= w1 && T >= lo && T <= lo + e)) {
        allow0 = allow1 = true;
    }

    bool edge1 = (omega >= -w1 && T == lo) || (omega == -w1 && T >= lo && T <= hi - e) ||
                 (omega <= -w1 && T == hi - e);
    bool edge0 = (omega <= w1 && T == hi) || (omega == w1 && T >= lo + e && T <= hi) ||
                 (omega >= w1 && T == lo + e);

    LoadRegion r;
    r.in_flow_set = sigma ? allow1 : allow0;
    const bool on_edge = sigma ? edge1 : edge0;
    r.in_jump_set = !r.in_flow_set || on_edge;

    int next = sigma;
    if (T >= hi || (omega >= w1 && T >= lo + e && T <= hi))
        next = 1;
    else if (T <= lo || (omega <= -w1 && T >= lo && T <= hi - e))
        next = 0;
    r.will_jump = next != sigma;

    if (r.in_jump_set && !r.in_flow_set)
        r.region = Region::Jump;
    else if (r.in_jump_set)
        r.region = Region::Both;
    else
        r.region = Region::Flow;
    return r;
}

RegionReport classify_region(const std::vector<TclParams>& pop, const std::vector<TclState>& states, double omega,
                             const SchemeKind& scheme)
{
    if (pop.size() != states.size())
        throw ConfigError("classify_region: population and state sizes differ");
    const bool freq = std::holds_alternative<DeterministicFreq>(scheme);
    RegionReport rep;
    rep.loads.reserve(pop.size());
    bool any_jump = false;
    bool any_both = false;
    for (std::size_t j = 0; j < pop.size(); ++j) {
        TclParams p = pop[j];
        if (!freq)
            p.omega1 = kInf;
        const LoadRegion r = classify_load(p, states[j].T, states[j].sigma, omega);
        any_jump = any_jump || r.region == Region::Jump;
        any_both = any_both || r.region == Region::Both;
        rep.loads.push_back(r);
    }
    rep.global = any_jump ? Region::Jump : (any_both ? Region::Both : Region::Flow);
    return rep;
}

double settle_time_into(const Trace& tr, double eps, double t_from)
{
    double settle = t_from;
    bool inside = true;
    for (const Sample& s : tr.samples) {
        if (s.t < t_from)
            continue;
        if (std::abs(s.omega) > eps) {
            inside = false;
            settle = kInf;
        } else if (!inside) {
            inside = true;
            settle = s.t;
        }
    }
    return settle;
}

std::pair<double, double> longest_window_within(const Trace& tr, double eps, double t_from)
{
    double best = 0.0;
    double best_start = t_from;
    bool open = false;
    double start = 0.0;
    for (const Sample& s : tr.samples) {
        if (s.t < t_from)
            continue;
        if (std::abs(s.omega) <= eps) {
            if (!open) {
                open = true;
                start = s.t;
            }
            if (s.t - start > best) {
                best = s.t - start;
                best_start = start;
            }
        } else {
            open = false;
        }
    }
    return {best, best_start};
}

FrequencyMetrics dwell_time_report(const Trace& tr, double eps, double t_from)
{
    FrequencyMetrics m;
    m.eps = eps;
    for (const Sample& s : tr.samples) {
        if (s.t >= t_from && std::abs(s.omega) > m.peak_abs_omega) {
            m.peak_abs_omega = std::abs(s.omega);
            m.peak_time = s.t;
        }
    }
    m.settle_time = settle_time_into(tr, eps, t_from);
    std::tie(m.longest_window, m.longest_window_start) = longest_window_within(tr, eps, t_from);

    const std::size_t n = tr.n_loads;
    std::vector<double> last(n, -kInf);
    std::vector<std::size_t> count(n, 0);
    m.per_load_min_gap.assign(n, kInf);
    m.min_interswitch_gap = kInf;
    for (const SwitchEvent& ev : tr.switch_events) {
        if (ev.load >= n)
            continue;
        if (count[ev.load] > 0) {
            const double gap = ev.t - last[ev.load];
            m.per_load_min_gap[ev.load] = std::min(m.per_load_min_gap[ev.load], gap);
            m.min_interswitch_gap = std::min(m.min_interswitch_gap, gap);
        }
        last[ev.load] = ev.t;
        ++count[ev.load];
    }
    for (std::size_t c : count)
        ++m.switches_per_load[c];
    m.total_switches = tr.switch_events.size();
    return m;
}

std::vector<SchemeRun> compare_schemes(const Scenario& base, double eps, double t_from)
{
    RandomizedFreq r3;
    RandomizedFreqHighGain r4;
    if (const auto* r = std::get_if<RandomizedFreq>(&base.scheme))
        r3 = *r;
    if (const auto* r = std::get_if<RandomizedFreqHighGain>(&base.scheme))
        r4 = *r;
    const std::vector<std::pair<SchemeKind, std::string>> variants{
        {Conventional{}, "(i)"}, {DeterministicFreq{}, "(ii)"}, {r3, "(iii)"}, {r4, "(iv)"}};

    std::vector<SchemeRun> out;
    for (const auto& [scheme, label] : variants) {
        Scenario sc = base;
        sc.scheme = scheme;
        SchemeRun run{scheme, label, simulate(sc), {}};
        run.metrics = dwell_time_report(run.trace, eps, t_from);
        out.push_back(std::move(run));
    }
    return out;
}

void write_trace_csv(std::ostream& os, const Trace& tr)
{
    os << "t,jumps,omega,d_s,on_fraction";
    for (std::size_t i = 0; i < tr.x_hat_dim; ++i)
        os << ",x_hat_" << i;
    os << '\n';
    fmt::memory_buffer buf;
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const Sample& s = tr.samples[i];
        buf.clear();
        fmt::format_to(std::back_inserter(buf), "{:.17g},{},{:.17g},{:.17g},{:.17g}", s.t, s.jumps, s.omega, s.d_s,
                       s.on_fraction);
        for (double v : tr.x_hat_at(i))
            fmt::format_to(std::back_inserter(buf), ",{:.17g}", v);
        buf.push_back('\n');
        os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

void write_events_csv(std::ostream& os, const Trace& tr)
{
    os << "t,load,sigma,cause,T\n";
    for (const SwitchEvent& e : tr.switch_events)
        os << fmt::format("{:.17g},{},{},{},{:.17g}\n", e.t, e.load, e.sigma, cause_name(e.cause), e.T);
}

void write_metrics(std::ostream& os, const FrequencyMetrics& m)
{
    os << fmt::format("peak_abs_omega: {:.17g}\n", m.peak_abs_omega);
    os << fmt::format("peak_time: {:.17g}\n", m.peak_time);
    os << fmt::format("eps: {:.17g}\n", m.eps);
    os << fmt::format("settle_time: {:.17g}\n", m.settle_time);
    os << fmt::format("longest_window: {:.17g}\n", m.longest_window);
    os << fmt::format("longest_window_start: {:.17g}\n", m.longest_window_start);
    os << fmt::format("min_interswitch_gap: {:.17g}\n", m.min_interswitch_gap);
    os << fmt::format("total_switches: {}\n", m.total_switches);
    os << "switches_per_load:\n";
    for (const auto& [count, loads] : m.switches_per_load)
        os << fmt::format("  {}: {}\n", count, loads);
}

}  // namespace tclsim
