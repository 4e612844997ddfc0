#include "rlp/dispatch.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rlp/optimizer.hpp"
#include "rlp/runio.hpp"

namespace rlp {

namespace {

using nlohmann::json;

struct GridSpec {
    double lo = 0, hi = 1;
    int n = 100;
};

GridSpec parse_grid(const std::string& s) {
    GridSpec g;
    char c1, c2;
    std::istringstream in(s);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.n) || c1 != ':' || c2 != ':' || g.n < 1)
        throw CLI::ValidationError("--grid/--range expects lo:hi:n");
    return g;
}

Policy parse_policy(const std::string& s, const ThetaBasis& basis) {
    if (s == "optimal") return optimize(basis).policy;
    double a, b;
    char c;
    std::istringstream in(s);
    if (!(in >> a >> c >> b) || c != ',') throw CLI::ValidationError("--policy expects c1,c2 or 'optimal'");
    return {a, b};
}

Estimator parse_estimator(const std::string& s) {
    if (s == "clock") return Estimator::clock;
    if (s == "killing") return Estimator::killing;
    throw CLI::ValidationError("--estimator expects clock|killing");
}

double grid_point(const GridSpec& g, int i) {
    return g.n == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / double(g.n - 1);
}

struct CommonArgs {
    std::string config, out = "-", grid, range, param, policy = "optimal";
    std::string process = "X", estimator = "killing", what = "value", derivs = "0,1,2";
    double q = -1, c1 = NAN, c2 = NAN, x0 = 0, a_origin = NAN, dt = 1e-3;
    std::uint64_t paths = 10000, seed = 1;
    bool quiet = false;
};

json args_json(const CommonArgs& a) {
    return json{{"config", a.config}, {"out", a.out},       {"grid", a.grid},
                {"range", a.range},   {"param", a.param},   {"policy", a.policy},
                {"process", a.process}, {"estimator", a.estimator}, {"what", a.what},
                {"derivs", a.derivs}, {"q", a.q},           {"c1", a.c1},
                {"c2", a.c2},         {"x0", a.x0},         {"a", a.a_origin},
                {"dt", a.dt},         {"paths", a.paths},   {"seed", a.seed}};
}

RunManifest manifest_for(const std::string& cmd, const ProblemSpec& spec, const CommonArgs& a) {
    RunManifest m;
    m.command = cmd;
    m.spec = spec_to_json(spec);
    m.args = args_json(a);
    if (a.out != "-") m.outputs = {a.out};
    return m;
}

int cmd_validate(const ProblemSpec& spec, const CommonArgs& a) {
    auto rep = validate(spec);
    if (rep.ok()) {
        if (!a.quiet) std::cout << "ok\n";
        return 0;
    }
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    return 1;
}

int cmd_scale_eval(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    double q = a.q >= 0 ? a.q : spec.econ.q;
    Process proc = a.process == "Y" ? Process::Y : Process::X;
    double origin = std::isnan(a.a_origin) ? -spec.econ.l : a.a_origin;
    auto basis = ScaleBasis::make(spec, q, proc);
    auto wref = RefractedScale::make(spec, q, origin);
    GridSpec g = parse_grid(a.grid);
    CsvWriter csv(a.out, manifest_for("scale-eval", spec, a),
                  {"x", "W", "Wprime", "wrefr", "wrefr_prime"});
    for (int i = 0; i < g.n; ++i) {
        double x = grid_point(g, i);
        double w1 = x > 0 ? basis.deriv(x) : (x == 0 ? basis.deriv0_plus() : 0.0);
        double wr = wref.value(x);
        double wr1 = x > origin ? wref.deriv(x, x == spec.refraction.b ? Side::right : Side::automatic) : 0.0;
        csv.row_numeric({x, basis.value(x), w1, wr, wr1});
    }
    return 0;
}

int cmd_theta_eval(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    GridSpec g = parse_grid(a.grid);
    bool want[3] = {false, false, false};
    for (char c : a.derivs)
        if (c >= '0' && c <= '2') want[c - '0'] = true;
    CsvWriter csv(a.out, manifest_for("theta-eval", spec, a),
                  {"x", "theta", "theta1", "theta2", "segment"});
    for (int i = 0; i < g.n; ++i) {
        double x = grid_point(g, i);
        if (x < -spec.econ.l) continue;
        double t0 = want[0] ? basis.value(x) : NAN;
        double t1 = want[1] && x > -spec.econ.l ? basis.deriv(x, Side::right) : NAN;
        double t2 = want[2] && x > -spec.econ.l ? basis.second(x, Side::right) : NAN;
        csv.row({fmt17(x), fmt17(t0), fmt17(t1), fmt17(t2), std::to_string(basis.segment_of(x))});
    }
    return 0;
}

int cmd_value(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    Policy p = (!std::isnan(a.c1) && !std::isnan(a.c2)) ? Policy{a.c1, a.c2}
                                                        : parse_policy(a.policy, basis);
    auto curve = make_value_curve(basis, p);
    GridSpec g = parse_grid(a.grid.empty() ? "-" + fmt17(spec.econ.l) + ":" +
                                                 fmt17(p.c2 + 2 * spec.econ.l) + ":200"
                                           : a.grid);
    CsvWriter csv(a.out, manifest_for("value", spec, a), {"x", "V"});
    for (int i = 0; i < g.n; ++i) {
        double x = grid_point(g, i);
        if (x < -spec.econ.l) continue;
        csv.row_numeric({x, curve.value(basis, x)});
    }
    return 0;
}

int cmd_optimize(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    auto res = optimize(basis);
    json out{{"c1", res.policy.c1},
             {"c2", res.policy.c2},
             {"case", to_string(res.kase)},
             {"H", res.h_value},
             {"residuals", res.first_order_residuals},
             {"box", {{"c1_max", res.box.c1_max}, {"c2_max", res.box.c2_max}}},
             {"near_b_flag", res.near_b_flag},
             {"tie_flag", res.tie_flag}};
    RunManifest m = manifest_for("optimize", spec, a);
    json doc{{"manifest", json::parse(m.to_line().substr(2))}, {"result", out}};
    if (a.out == "-") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(a.out);
        f << doc.dump(2) << "\n";
    }
    return 0;
}

int cmd_hjb_check(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    Policy p = parse_policy(a.policy, basis);
    auto curve = make_value_curve(basis, p);
    double l = spec.econ.l, b = spec.refraction.b;
    GridSpec g = a.grid.empty() ? GridSpec{-l, p.c2 + 3 * l, 400} : parse_grid(a.grid);
    CsvWriter csv(a.out, manifest_for("hjb-check", spec, a), {"x", "V", "residual", "region"});
    for (int i = 0; i < g.n; ++i) {
        double x = grid_point(g, i);
        if (x <= -l + 1e-9) continue;
        bool excluded = false;
        for (double k : {0.0, b, p.c2})
            if (std::abs(x - k) < 1e-3) excluded = true;
        if (excluded) continue;
        double r = hjb_residual(basis, curve, x);
        csv.row({fmt17(x), fmt17(curve.value(basis, x)), fmt17(r),
                 x < p.c2 ? "continuation" : "payout"});
    }
    return 0;
}

int cmd_simulate(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    Policy p = parse_policy(a.policy, basis);
    SimConfig cfg{a.paths, a.seed, a.dt, 0, parse_estimator(a.estimator)};
    auto est = estimate_value(spec, p, a.x0, cfg);
    RunManifest m = manifest_for("simulate", spec, a);
    json doc{{"manifest", json::parse(m.to_line().substr(2))},
             {"estimate",
              {{"mean", est.mean},
               {"stderr", est.stderr_},
               {"n_effective", est.n_effective},
               {"truncation_fraction", est.truncation_fraction},
               {"seed", est.seed},
               {"policy", {{"c1", p.c1}, {"c2", p.c2}}}}}};
    if (a.out == "-") {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream f(a.out);
        f << doc.dump(2) << "\n";
    }
    return 0;
}

int cmd_compare(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    auto basis = ThetaBasis::make(spec);
    SimConfig cfg{a.paths, a.seed, a.dt, 0, parse_estimator(a.estimator)};
    CsvWriter csv(a.out, manifest_for("compare", spec, a),
                  {"what", "x0", "c_or_c1", "c2", "analytic", "mc_mean", "mc_stderr", "z_score",
                   "truncation_fraction"});
    if (a.what == "exit") {
        for (const auto& pt : default_exit_points(spec)) {
            double analytic = exit_laplace(basis, pt.x0, pt.level);
            auto est = estimate_exit_laplace(spec, pt.x0, pt.level, cfg);
            double z = (est.mean - analytic) / (est.stderr_ > 0 ? est.stderr_ : 1.0);
            csv.row({"exit", fmt17(pt.x0), fmt17(pt.level), "", fmt17(analytic), fmt17(est.mean),
                     fmt17(est.stderr_), fmt17(z), fmt17(est.truncation_fraction)});
        }
        return 0;
    }
    auto opt = optimize(basis);
    for (const auto& pt : default_value_points(spec, opt.policy)) {
        double analytic = value_policy(basis, pt.policy, pt.x0);
        auto est = estimate_value(spec, pt.policy, pt.x0, cfg);
        double z = (est.mean - analytic) / (est.stderr_ > 0 ? est.stderr_ : 1.0);
        csv.row({"value", fmt17(pt.x0), fmt17(pt.policy.c1), fmt17(pt.policy.c2), fmt17(analytic),
                 fmt17(est.mean), fmt17(est.stderr_), fmt17(z), fmt17(est.truncation_fraction)});
    }
    return 0;
}

int cmd_sweep(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    GridSpec g = parse_grid(a.range);
    auto rows = sweep(spec, sweep_param_from_string(a.param), g.lo, g.hi, g.n);
    CsvWriter csv(a.out, manifest_for("sweep", spec, a),
                  {"param", "c1star", "c2star", "Hstar", "case"});
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            csv.row({fmt17(r.param_value), "nan", "nan", "nan", "error"});
        } else {
            csv.row({fmt17(r.param_value), fmt17(r.policy.c1), fmt17(r.policy.c2),
                     fmt17(r.h_value), to_string(r.kase)});
        }
    }
    return 0;
}

// Figure-analogue data: theta and theta' panels over one varied parameter,
// optimal-pair tables over swept parameters.
int cmd_figures(const ProblemSpec& spec, const CommonArgs& a) {
    require_valid(spec);
    std::string dir = a.out == "-" ? "." : a.out;
    auto vary = [&](SweepParam p, double v) {
        ProblemSpec s = spec;
        switch (p) {
            case SweepParam::m: s.econ.m = v; break;
            case SweepParam::delta: s.refraction.delta = v; break;
            case SweepParam::b: s.refraction.b = v; break;
            case SweepParam::l: s.econ.l = v; break;
            default: break;
        }
        return s;
    };
    struct Panel {
        SweepParam param;
        std::vector<double> values;
    };
    const std::vector<Panel> panels = {
        {SweepParam::m, {0.01, 0.05, 0.2}},
        {SweepParam::delta, {0.0, spec.refraction.delta, 2 * spec.refraction.delta + 0.05}},
        {SweepParam::b, {1.0, spec.refraction.b, spec.refraction.b + 2.0}},
        {SweepParam::l, {2.0, 4.0, spec.econ.l}},
    };
    for (const auto& panel : panels) {
        for (int order = 0; order <= 1; ++order) {
            std::string name = dir + "/fig_theta" + (order ? "1_" : "_") + to_string(panel.param) + ".csv";
            CommonArgs a2 = a;
            a2.out = name;
            CsvWriter csv(name, manifest_for("figures", spec, a2),
                          {"param", "x", "y", "note"});
            for (double v : panels[&panel - &panels[0]].values) {
                ProblemSpec s = vary(panel.param, v);
                if (!validate(s).ok()) continue;
                auto basis = ThetaBasis::make(s);
                double lo = -s.econ.l, hi = s.refraction.b + s.econ.l;
                const int n = 201;
                for (int i = 0; i < n; ++i) {
                    double x = lo + (hi - lo) * i / (n - 1);
                    if (order == 0) {
                        csv.row({fmt17(v), fmt17(x), fmt17(basis.value(x)), ""});
                    } else if (x > lo) {
                        bool kink = (x == 0.0 && basis.has_kink_at_zero()) ||
                                    (x == s.refraction.b && basis.has_kink_at_b());
                        if (kink) {
                            csv.row({fmt17(v), fmt17(x), fmt17(basis.deriv(x, Side::left)), "kink_left"});
                            csv.row({fmt17(v), fmt17(x), fmt17(basis.deriv(x, Side::right)), "kink_right"});
                        } else {
                            csv.row({fmt17(v), fmt17(x), fmt17(basis.deriv(x, Side::right)), ""});
                        }
                    }
                }
                if (order == 1 && s.econ.m > 0 && s.econ.q > 0) {
                    auto bp = breakpoints(basis);
                    csv.row({fmt17(v), fmt17(bp.eps1), fmt17(0.0), "eps1"});
                    csv.row({fmt17(v), fmt17(bp.eps2), fmt17(0.0), "eps2"});
                }
            }
        }
    }
    struct OptPanel {
        SweepParam param;
        double lo, hi;
    };
    const std::vector<OptPanel> opt_panels = {
        {SweepParam::beta, 0.05, 2.0},
        {SweepParam::delta, 0.0, spec.is_bounded_variation() ? 0.25 : 0.2},
        {SweepParam::b, 0.0, spec.refraction.b + 1.0},
        {SweepParam::l, 1.0, spec.econ.l},
    };
    for (const auto& p : opt_panels) {
        std::string name = dir + "/fig_opt_" + to_string(p.param) + ".csv";
        CommonArgs a2 = a;
        a2.out = name;
        a2.param = to_string(p.param);
        auto rows = sweep(spec, p.param, p.lo, p.hi, 25);
        CsvWriter csv(name, manifest_for("figures", spec, a2),
                      {"param", "c1star", "c2star", "Hstar", "case"});
        for (const auto& r : rows) {
            if (!r.error.empty())
                csv.row({fmt17(r.param_value), "nan", "nan", "nan", "error"});
            else
                csv.row({fmt17(r.param_value), fmt17(r.policy.c1), fmt17(r.policy.c2),
                         fmt17(r.h_value), to_string(r.kase)});
        }
    }
    return 0;
}

int cmd_rerun(const std::string& manifest_path);

int dispatch_parsed(const std::string& cmd, const CommonArgs& a) {
    if (cmd == "rerun") return cmd_rerun(a.config);
    ProblemSpec spec = load_problem(a.config);
    if (cmd == "validate") return cmd_validate(spec, a);
    require_valid(spec);
    if (cmd == "scale-eval") return cmd_scale_eval(spec, a);
    if (cmd == "theta-eval") return cmd_theta_eval(spec, a);
    if (cmd == "value") return cmd_value(spec, a);
    if (cmd == "optimize") return cmd_optimize(spec, a);
    if (cmd == "hjb-check") return cmd_hjb_check(spec, a);
    if (cmd == "simulate") return cmd_simulate(spec, a);
    if (cmd == "compare") return cmd_compare(spec, a);
    if (cmd == "sweep") return cmd_sweep(spec, a);
    if (cmd == "figures") return cmd_figures(spec, a);
    throw CLI::ValidationError("unknown subcommand: " + cmd);
}

int cmd_rerun(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest source: " + manifest_path);
    std::string line;
    std::getline(in, line);
    auto m = RunManifest::parse_line(line);
    CommonArgs a;
    const auto& j = m.args;
    a.config = j.value("config", "");
    a.out = j.value("out", "-");
    a.grid = j.value("grid", "");
    a.range = j.value("range", "");
    a.param = j.value("param", "");
    a.policy = j.value("policy", "optimal");
    a.process = j.value("process", "X");
    a.estimator = j.value("estimator", "killing");
    a.what = j.value("what", "value");
    a.derivs = j.value("derivs", "0,1,2");
    a.q = j.value("q", -1.0);
    a.c1 = j.value("c1", NAN);
    a.c2 = j.value("c2", NAN);
    a.x0 = j.value("x0", 0.0);
    a.a_origin = j.value("a", NAN);
    a.dt = j.value("dt", 1e-3);
    a.paths = j.value("paths", std::uint64_t(10000));
    a.seed = j.value("seed", std::uint64_t(1));
    return dispatch_parsed(m.command, a);
}

}  // namespace

std::vector<ComparePoint> default_exit_points(const ProblemSpec& spec) {
    double b = spec.refraction.b, l = spec.econ.l;
    double ca = b + 2.0, cb = b + l;
    std::vector<ComparePoint> pts;
    for (double c : {ca, cb})
        for (double x0 : {-l / 2, 0.0, b / 2})
            pts.push_back({x0, c, {}});
    return pts;
}

std::vector<ComparePoint> default_value_points(const ProblemSpec& spec, const Policy& optimal) {
    double beta = spec.econ.beta;
    Policy alt{optimal.c1 + beta / 2, optimal.c2 + 1.0};
    std::vector<ComparePoint> pts;
    for (const Policy& p : {optimal, alt})
        for (double x0 : {0.0, 0.5 * (p.c1 + p.c2), p.c2})
            pts.push_back({x0, 0.0, p});
    return pts;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"refracted Levy risk processes under exponential Parisian ruin: "
                 "scale functions, optimal impulse dividends, Monte Carlo verification"};
    app.require_subcommand(1);
    CommonArgs a;

    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", a.config, "problem JSON file");
        if (needs_config) opt->required();
        sub->add_option("--out", a.out, "output path ('-' for stdout)");
        sub->add_option("--seed", a.seed, "RNG seed");
        sub->add_option("--paths", a.paths, "Monte Carlo path count");
        sub->add_option("--grid", a.grid, "evaluation grid lo:hi:n");
        sub->add_option("--param", a.param, "sweep parameter name");
        sub->add_option("--range", a.range, "sweep range lo:hi:n");
        sub->add_option("--policy", a.policy, "c1,c2 or 'optimal'");
        sub->add_option("--estimator", a.estimator, "clock|killing");
        sub->add_flag("--quiet", a.quiet, "suppress console output");
        return sub;
    };

    add_common(app.add_subcommand("validate", "check a problem file against the model invariants"));
    auto* se = add_common(app.add_subcommand("scale-eval", "tabulate W, W', w(.;a), w'(.;a)"));
    se->add_option("--q", a.q, "rate (defaults to econ.q)");
    se->add_option("--process", a.process, "X|Y");
    se->add_option("--a", a.a_origin, "refracted-scale origin (defaults to -l)");
    add_common(app.add_subcommand("theta-eval", "tabulate theta and derivatives"))
        ->add_option("--derivs", a.derivs, "comma list from 0,1,2");
    auto* va = add_common(app.add_subcommand("value", "tabulate the policy value function"));
    va->add_option("--c1", a.c1, "lower level");
    va->add_option("--c2", a.c2, "payment trigger");
    add_common(app.add_subcommand("optimize", "solve for the optimal (c1*, c2*)"));
    add_common(app.add_subcommand("hjb-check", "generator residual along the value curve"));
    auto* si = add_common(app.add_subcommand("simulate", "Monte Carlo value estimate"));
    si->add_option("--x0", a.x0, "initial surplus");
    si->add_option("--dt", a.dt, "Euler step (Brownian)");
    auto* co = add_common(app.add_subcommand("compare", "analytic vs Monte Carlo table"));
    co->add_option("--what", a.what, "value|exit");
    co->add_option("--dt", a.dt, "Euler step (Brownian)");
    add_common(app.add_subcommand("sweep", "re-optimize along one parameter"));
    add_common(app.add_subcommand("figures", "emit figure-analogue CSV bundles (--out is a directory)"));
    app.add_subcommand("rerun", "re-run from an output file's manifest line")
        ->add_option("--from", a.config, "output file whose manifest to replay")
        ->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        return dispatch_parsed(app.get_subcommands().front()->get_name(), a);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace rlp
