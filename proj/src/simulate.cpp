#include "creepdiv/simulate.hpp"

#include "creepdiv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace creepdiv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, long path, std::uint64_t stream) {
    return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(path))) + stream);
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

struct PathContext {
    const LevyModel& m;
    const SimConfig& cfg;
    std::vector<double> phase_cdf;  // cumulative arrival-rate shares
    double total_rate = 0.0;
};

PathRecord run_path(const PathContext& ctx, long path) {
    const LevyModel& m = ctx.m;
    const SimConfig& cfg = ctx.cfg;
    const double c = m.c();
    const double sigma = m.sigma();
    const double q = m.q();
    const double delta = m.delta();
    const double b = cfg.b;
    const double t_max = cfg.t_max;

    std::mt19937_64 diffusion(stream_seed(cfg.seed, path, 1));
    std::mt19937_64 claims(stream_seed(cfg.seed, path, 2));
    const std::uint64_t bridge_key = stream_seed(cfg.seed, path, 3);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    std::exponential_distribution<double> unit_exp;

    PathRecord rec;
    rec.path_id = path;
    rec.ruin_time = kNaN;

    auto creep = [&](double tau) {
        rec.cls = PathClass::creeping;
        rec.ruin_time = tau;
        rec.discounted_creep = std::exp(-q * tau);
    };

    double u = cfg.x0;
    if (u == 0.0 && sigma > 0.0) {
        creep(0.0);
        return rec;
    }

    double next_jump = ctx.total_rate > 0.0 ? unit_exp(claims) / ctx.total_rate : kInf;
    double t = 0.0;
    double discount = 1.0;  // e^{-q t}
    std::uint64_t step = 0;
    const double full_decay = std::exp(-q * cfg.dt);
    const double sqrt_dt = std::sqrt(cfg.dt);
    const double horizon = t_max * (1.0 - 1e-14);

    while (t < horizon) {
        double h = std::min(cfg.dt, t_max - t);
        const bool jump_now = next_jump <= t + h;
        if (jump_now) h = std::max(next_jump - t, 0.0);
        const double decay = (h == cfg.dt) ? full_decay : std::exp(-q * h);
        const double sqrt_h = (h == cfg.dt) ? sqrt_dt : std::sqrt(h);

        const bool paying = u > b;
        const double z = normal(diffusion);
        const double u_next = u + (c - (paying ? delta : 0.0)) * h + sigma * sqrt_h * z;
        const std::uint64_t bridge_bits = splitmix64(bridge_key + step++);

        bool crept = u_next <= 0.0;
        if (!crept && cfg.bridge_correction && sigma > 0.0 && h > 0.0) {
            // exponents beyond 40 give probabilities under 1e-17
            const double a = 2.0 * u * u_next / (sigma * sigma * h);
            crept = a < 40.0 && unit_uniform(bridge_bits) < std::exp(-a);
        }
        if (crept) {
            const double tau = t + 0.5 * h;
            if (paying) rec.discounted_dividends += delta * discount * (1.0 - std::exp(-q * 0.5 * h)) / q;
            creep(tau);
            return rec;
        }
        if (paying) rec.discounted_dividends += delta * discount * (1.0 - decay) / q;

        t += h;
        discount *= decay;
        u = u_next;

        if (jump_now) {
            t = next_jump;
            discount = std::exp(-q * t);
            const double pick = uniform(claims);
            std::size_t phase = 0;
            while (phase + 1 < ctx.phase_cdf.size() && pick >= ctx.phase_cdf[phase]) ++phase;
            u -= unit_exp(claims) / m.jumps()[phase].decay;
            next_jump += unit_exp(claims) / ctx.total_rate;
            if (u < 0.0) {
                rec.cls = PathClass::brutal;
                rec.ruin_time = t;
                return rec;
            }
        }
    }
    return rec;
}

}  // namespace

double SimConfig::default_horizon(double q) { return std::ceil(18.5 / q); }

SimConfig validate_sim_config(const LevyModel& m, SimConfig cfg) {
    if (cfg.t_max == 0.0) cfg.t_max = SimConfig::default_horizon(m.q());
    std::ostringstream os;
    if (!std::isfinite(cfg.x0) || cfg.x0 < 0.0) os << "x0 must be finite and >= 0; ";
    if (!std::isfinite(cfg.b) || cfg.b < 0.0) os << "threshold b must be finite and >= 0; ";
    if (cfg.n_paths <= 0) os << "n_paths must be positive; ";
    if (!(cfg.dt > 0.0) || cfg.dt > 1e-2) os << "dt must lie in (0, 1e-2]; ";
    if (!std::isfinite(cfg.t_max) || !(std::exp(-m.q() * cfg.t_max) < 1e-8)) {
        os << "t_max must satisfy exp(-q t_max) < 1e-8; ";
    }
    const std::string problems = os.str();
    if (!problems.empty()) throw InvalidConfig("invalid simulation config: " + problems);
    return cfg;
}

SimOutcome simulate_batch(const LevyModel& m, const SimConfig& raw) {
    const SimConfig cfg = validate_sim_config(m, raw);

    PathContext ctx{m, cfg, {}, m.jump_mass()};
    double acc = 0.0;
    for (const auto& j : m.jumps()) {
        acc += j.arrival_rate;
        ctx.phase_cdf.push_back(acc / ctx.total_rate);
    }

    std::vector<PathRecord> records(static_cast<std::size_t>(cfg.n_paths));
    unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<long>(workers, cfg.n_paths));

    std::atomic<long> next{0};
    auto work = [&] {
        constexpr long chunk = 256;
        for (;;) {
            const long start = next.fetch_add(chunk);
            if (start >= cfg.n_paths) return;
            const long stop = std::min(start + chunk, cfg.n_paths);
            for (long i = start; i < stop; ++i) records[static_cast<std::size_t>(i)] = run_path(ctx, i);
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    SimOutcome out;
    out.n_paths = cfg.n_paths;
    const double n = static_cast<double>(cfg.n_paths);
    double sum = 0.0;
    double sum_sq = 0.0;
    double ruin_time_sum = 0.0;
    for (const auto& r : records) {
        const double v = r.discounted_dividends + m.S() * r.discounted_creep;
        sum += v;
        sum_sq += v * v;
        out.mean_dividends += r.discounted_dividends;
        out.discounted_creep_mass += r.discounted_creep;
        switch (r.cls) {
            case PathClass::survived: ++out.n_survived; break;
            case PathClass::creeping: ++out.n_creep; ruin_time_sum += r.ruin_time; break;
            case PathClass::brutal: ++out.n_brutal; ruin_time_sum += r.ruin_time; break;
        }
    }
    out.mean_value = sum / n;
    out.std_err = cfg.n_paths > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * out.mean_value * out.mean_value) / (n - 1.0)) / n)
                                  : 0.0;
    out.mean_dividends /= n;
    out.discounted_creep_mass /= n;
    out.creep_prob = static_cast<double>(out.n_creep) / n;
    out.brutal_prob = static_cast<double>(out.n_brutal) / n;
    const long ruined = out.n_creep + out.n_brutal;
    out.mean_ruin_time = ruined > 0 ? ruin_time_sum / static_cast<double>(ruined) : kNaN;
    if (cfg.record_paths) out.paths = std::move(records);
    return out;
}

std::vector<double> path_values(const LevyModel& m, const SimOutcome& outcome) {
    std::vector<double> v;
    v.reserve(outcome.paths.size());
    for (const auto& r : outcome.paths) v.push_back(r.discounted_dividends + m.S() * r.discounted_creep);
    return v;
}

bool StrategyComparison::reference_dominant() const {
    return std::none_of(beats_reference.begin(), beats_reference.end(), [](bool b) { return b; });
}

StrategyComparison compare_strategies(const LevyModel& m, double x0, const std::vector<double>& thresholds,
                                      SimConfig cfg, std::size_t reference_index) {
    if (thresholds.empty()) throw InvalidConfig("compare needs at least one threshold");
    if (reference_index >= thresholds.size()) throw InvalidConfig("reference index out of range");

    cfg.x0 = x0;
    cfg.record_paths = true;
    StrategyComparison cmp;
    cmp.thresholds = thresholds;
    cmp.reference_index = reference_index;
    std::vector<std::vector<double>> values;
    for (double b : thresholds) {
        cfg.b = b;
        cmp.outcomes.push_back(simulate_batch(m, cfg));
        values.push_back(path_values(m, cmp.outcomes.back()));
        cmp.outcomes.back().paths.clear();
        cmp.outcomes.back().paths.shrink_to_fit();
    }

    const auto& ref = values[reference_index];
    const double n = static_cast<double>(ref.size());
    for (const auto& v : values) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double d = v[i] - ref[i];
            sum += d;
            sum_sq += d * d;
        }
        const double mean = sum / n;
        const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        const double se = std::sqrt(var / n);
        cmp.diff_mean.push_back(mean);
        cmp.diff_se.push_back(se);
        cmp.beats_reference.push_back(mean > 3.0 * se && mean > 0.0);
    }
    return cmp;
}

}  // namespace creepdiv
