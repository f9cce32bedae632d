#include "creepdiv/cli.hpp"

#include "creepdiv/errors.hpp"
#include "creepdiv/model_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace creepdiv {

using nlohmann::ordered_json;

double round9(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string format9(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

ordered_json rounded(double v) { return std::isfinite(v) ? ordered_json(round9(v)) : ordered_json(nullptr); }

ordered_json full(const std::vector<double>& v) { return ordered_json(v); }

void require_assumptions(const LevyModel& m) {
    const AssumptionReport r = validate_assumptions(m);
    if (r.assumptions_hold()) return;
    std::ostringstream os;
    os << "standing assumption violated:";
    for (const auto& msg : r.messages) os << "\n  " << msg;
    throw InvalidModel(os.str());
}

ordered_json assumptions_json(const AssumptionReport& r) {
    ordered_json j;
    j["sigma_positive"] = r.sigma_positive;
    j["phi_bound"] = r.phi_bound;
    j["finite_mass"] = r.finite_mass;
    j["s_mass_bound"] = r.s_mass_bound;
    j["drift_positivity"] = r.drift_positivity;
    j["Phi_q"] = rounded(r.Phi_q);
    j["phi_q"] = rounded(r.phi_q);
    j["s_window_upper"] = rounded(r.s_window_upper);
    j["s_in_window"] = r.s_in_window;
    j["near_window_boundary"] = r.near_window_boundary;
    j["messages"] = r.messages;
    return j;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        return;
    }
    std::ofstream f(path);
    if (!f) throw InvalidConfig("cannot write output file " + path);
    f << content;
}

struct Solved {
    LevyModel model;
    ScalePair sp;
    ThresholdSolution sol;
};

Solved solve_model(const LevyModel& m) {
    require_assumptions(m);
    ScalePair sp = build_scale_pair(m);
    boundary_values(sp, m);
    ThresholdSolution sol = solve_threshold(sp, m);
    return {m, std::move(sp), std::move(sol)};
}

}  // namespace

ordered_json solve_report(const LevyModel& m) {
    const Solved s = solve_model(m);
    const ThresholdSolution& sol = s.sol;
    const BoundaryValues bv = boundary_values(s.sp, m);

    ordered_json j;
    j["model"] = model_to_json(m);
    j["assumptions"] = assumptions_json(validate_assumptions(m));
    j["scale"] = {{"roots_X", full(s.sp.roots_X)},
                  {"residues_X", full(s.sp.residues_X)},
                  {"roots_Y", full(s.sp.roots_Y)},
                  {"residues_Y", full(s.sp.residues_Y)}};
    j["boundary_values"] = {rounded(bv.W0), rounded(bv.W1), rounded(bv.W2), rounded(bv.W3)};
    j["a_star"] = rounded(sol.a_star);
    j["a_S_star"] = rounded(sol.a_S_star);
    j["b_star"] = sol.b_star;
    j["A_at_b"] = rounded(sol.A_at_b);
    j["theta_at_b"] = rounded(sol.theta_at_b);
    j["positive_threshold"] = sol.positive_threshold;
    j["diagnostics"] = {{"A_rise_then_fall", sol.diagnostics.A_rise_then_fall},
                        {"theta_unimodal", sol.diagnostics.theta_unimodal},
                        {"theta_grid_peak", rounded(sol.diagnostics.theta_grid_peak)},
                        {"ordering_holds", sol.diagnostics.ordering_holds}};

    const ValueFunction vf = build_value(s.sp, m, sol.b_star);
    std::vector<double> xs = {0.0, sol.b_star, 0.1, 0.5, 1.0, 2.0, 3.0, 5.0};
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    ordered_json samples = ordered_json::array();
    for (double x : xs) {
        samples.push_back({{"x", rounded(x)},
                           {"V", rounded(vf(x))},
                           {"V1", rounded(vf.derivative(x, 1))},
                           {"V2", rounded(vf.derivative(x, 2))}});
    }
    j["value_samples"] = samples;
    return j;
}

CheckResult check_solution(const ordered_json& solution) {
    try {
        const LevyModel m = model_from_json(solution.at("model"));
        const auto& sc = solution.at("scale");
        const ScalePair sp = scale_pair_from_roots(m, sc.at("roots_X").get<std::vector<double>>(),
                                                   sc.at("roots_Y").get<std::vector<double>>());
        CheckResult r;
        r.stored_b_star = solution.at("b_star").get<double>();
        r.recomputed_b_star = solve_threshold(sp, m).b_star;
        r.ok = std::abs(r.stored_b_star - r.recomputed_b_star) <= 1e-10;
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("malformed solution document: ") + e.what());
    }
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
    std::ostringstream os;
    os << "b,A_S,theta_S,g_S,r_S\n";
    for (const auto& r : rows) {
        os << format9(r.b) << ',' << format9(r.A) << ',' << format9(r.theta) << ',' << format9(r.g) << ','
           << format9(r.r) << '\n';
    }
    return os.str();
}

std::string verify_csv(const HjbReport& report) {
    std::ostringstream os;
    os << "x,V,V1,V2,hjb_residual\n";
    for (const auto& p : report.points) {
        os << format9(p.x) << ',' << format9(p.V) << ',' << format9(p.V1) << ',' << format9(p.V2) << ',';
        if (!std::isnan(p.residual)) os << format9(p.residual);
        os << '\n';
    }
    return os.str();
}

ordered_json outcome_json(const SimOutcome& o) {
    ordered_json j;
    j["mean_value"] = rounded(o.mean_value);
    j["std_err"] = rounded(o.std_err);
    j["creep_prob"] = rounded(o.creep_prob);
    j["brutal_prob"] = rounded(o.brutal_prob);
    j["discounted_creep_mass"] = rounded(o.discounted_creep_mass);
    j["mean_dividends"] = rounded(o.mean_dividends);
    j["mean_ruin_time"] = rounded(o.mean_ruin_time);
    j["n_survived"] = o.n_survived;
    j["n_creep"] = o.n_creep;
    j["n_brutal"] = o.n_brutal;
    j["n_paths"] = o.n_paths;
    return j;
}

ordered_json comparison_json(const StrategyComparison& c) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
        ordered_json r;
        r["b"] = rounded(c.thresholds[i]);
        r["outcome"] = outcome_json(c.outcomes[i]);
        r["diff_vs_reference"] = rounded(c.diff_mean[i]);
        r["diff_std_err"] = rounded(c.diff_se[i]);
        r["beats_reference"] = static_cast<bool>(c.beats_reference[i]);
        rows.push_back(r);
    }
    ordered_json j;
    j["reference_b"] = rounded(c.thresholds[c.reference_index]);
    j["reference_dominant"] = c.reference_dominant();
    j["strategies"] = rows;
    return j;
}

std::string paths_csv(const SimOutcome& o) {
    std::ostringstream os;
    os << "path_id,ruin_time,class,discounted_dividends\n";
    for (const auto& p : o.paths) {
        const char* cls = p.cls == PathClass::creeping ? "creeping" : p.cls == PathClass::brutal ? "brutal" : "survived";
        os << p.path_id << ',';
        if (!std::isnan(p.ruin_time)) os << format9(p.ruin_time);
        os << ',' << cls << ',' << format9(p.discounted_dividends) << '\n';
    }
    return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal dividends with a creeping terminal value: solver, verifier and simulator"};
    app.require_subcommand(1);

    std::string config;
    std::string out_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "model config (key = value or JSON)")->required();
        sub->add_option("--out", out_path, "output file (default: stdout)");
    };

    auto* solve = app.add_subcommand("solve", "solve for b* and emit a JSON solution");
    add_common(solve);

    double b_min = 0.0;
    double b_max = 0.5;
    int steps = 200;
    auto* scan = app.add_subcommand("scan", "tabulate A_S, theta_S, g_S, r_S over b as CSV");
    add_common(scan);
    scan->add_option("--b-min", b_min, "first b")->capture_default_str();
    scan->add_option("--b-max", b_max, "last b")->capture_default_str();
    scan->add_option("--steps", steps, "number of rows (>= 2)")->capture_default_str();

    double x_min = 1e-3;
    std::optional<double> x_max;
    int points = 400;
    std::optional<double> b_opt;
    auto* verify = app.add_subcommand("verify", "check the HJB inequalities on an x-grid, CSV output");
    add_common(verify);
    verify->add_option("--x-min", x_min, "first grid point")->capture_default_str();
    verify->add_option("--x-max", x_max, "last grid point (default b* + 10)");
    verify->add_option("--points", points, "grid size")->capture_default_str();
    verify->add_option("--b", b_opt, "threshold to verify (default b*)");

    SimConfig sim;
    bool no_bridge = false;
    std::string paths_csv_path;
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--x0", sim.x0, "initial surplus")->capture_default_str();
        sub->add_option("--paths", sim.n_paths, "number of paths")->capture_default_str();
        sub->add_option("--dt", sim.dt, "Euler step")->capture_default_str();
        sub->add_option("--seed", sim.seed, "master seed")->capture_default_str();
        sub->add_option("--t-max", sim.t_max, "horizon (default ceil(18.5/q))");
        sub->add_option("--workers", sim.workers, "threads (0: all cores)")->capture_default_str();
        sub->add_flag("--no-bridge", no_bridge, "disable the Brownian-bridge creeping correction");
    };
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo value of a threshold strategy");
    add_common(simulate);
    add_sim(simulate);
    simulate->add_option("--b", b_opt, "threshold (default b*)");
    simulate->add_option("--paths-csv", paths_csv_path, "per-path dump");

    std::vector<double> thresholds;
    auto* compare = app.add_subcommand("compare", "paired comparison of thresholds against b*");
    add_common(compare);
    add_sim(compare);
    compare->add_option("--thresholds", thresholds, "comma-separated thresholds")->delimiter(',');

    std::string solution_path;
    auto* check = app.add_subcommand("check", "recompute b* from a solution's stored roots");
    check->add_option("--solution", solution_path, "solution JSON written by solve")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) {
            std::ifstream in(solution_path);
            if (!in) throw InvalidConfig("cannot open solution file " + solution_path);
            ordered_json doc;
            try {
                doc = ordered_json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw InvalidConfig(std::string("malformed solution JSON: ") + e.what());
            }
            const CheckResult r = check_solution(doc);
            out << "stored b* = " << format9(r.stored_b_star) << ", recomputed b* = " << format9(r.recomputed_b_star)
                << (r.ok ? ": OK\n" : ": MISMATCH\n");
            return r.ok ? 0 : 2;
        }

        const LevyModel m = load_model(config);

        if (*solve) {
            emit(out_path, solve_report(m).dump(2) + "\n", out);
            return 0;
        }

        const Solved s = solve_model(m);

        if (*scan) {
            emit(out_path, scan_csv(scan_threshold(s.sp, m, b_min, b_max, steps)), out);
            return 0;
        }

        if (*verify) {
            const double b = b_opt.value_or(s.sol.b_star);
            const double hi = x_max.value_or(b + 10.0);
            if (!(x_min > 0.0) || !(hi > x_min) || points < 2) {
                throw InvalidConfig("verify needs 0 < x-min < x-max and at least 2 points");
            }
            std::vector<double> grid(points);
            for (int i = 0; i < points; ++i) grid[i] = x_min + (hi - x_min) * i / (points - 1);
            const ValueFunction vf = build_value(s.sp, m, b);
            const HjbReport report = hjb_verify(vf, grid);
            emit(out_path, verify_csv(report), out);
            err << "verify at b = " << format9(b) << ": " << (report.passed() ? "PASS" : "FAIL") << " ("
                << report.violations.size() << " of " << report.points.size() << " points violate)\n";
            require_hjb(report);
            return 0;
        }

        sim.bridge_correction = !no_bridge;

        if (*simulate) {
            sim.b = b_opt.value_or(s.sol.b_star);
            sim.record_paths = !paths_csv_path.empty();
            const SimOutcome o = simulate_batch(m, sim);
            ordered_json j;
            j["x0"] = rounded(sim.x0);
            j["b"] = rounded(sim.b);
            j["analytic_value"] = rounded(build_value(s.sp, m, sim.b)(sim.x0));
            j["outcome"] = outcome_json(o);
            emit(out_path, j.dump(2) + "\n", out);
            if (sim.record_paths) emit(paths_csv_path, paths_csv(o), out);
            return 0;
        }

        if (*compare) {
            const double bs = s.sol.b_star;
            if (thresholds.empty()) thresholds = {0.0, bs, bs + 0.5, bs + 2.0, 0.5 * bs};
            std::size_t ref = thresholds.size();
            for (std::size_t i = 0; i < thresholds.size(); ++i) {
                if (std::abs(thresholds[i] - bs) <= 1e-12 * std::max(1.0, bs)) {
                    ref = i;
                    break;
                }
            }
            if (ref == thresholds.size()) {
                thresholds.insert(thresholds.begin(), bs);
                ref = 0;
            }
            const StrategyComparison c = compare_strategies(m, sim.x0, thresholds, sim, ref);
            ordered_json j = comparison_json(c);
            j["x0"] = rounded(sim.x0);
            emit(out_path, j.dump(2) + "\n", out);
            return 0;
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace creepdiv
