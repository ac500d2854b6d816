// Command line front end: experiment presets plus direct module drivers.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "osgood/harness.hpp"

using namespace osgood;
namespace fs = std::filesystem;

namespace {

struct PresetArgs {
    std::vector<std::string> sets;
    std::string out;
    std::string config_file;
};

int run_preset_command(const std::string& name, const PresetArgs& args) {
    ExperimentConfig cfg = find_preset(name).defaults;
    if (!args.config_file.empty()) cfg.apply_file(args.config_file);
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        cfg.set_from_string(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const fs::path out = args.out.empty() ? fs::path("out") / name : fs::path(args.out);
    auto man = run_preset(cfg, out);
    for (const auto& c : man.checks)
        std::printf("[%s] %s: value %.6g vs bound %.6g\n", c.pass ? "pass" : "FAIL",
                    c.name.c_str(), c.value, c.bound);
    std::printf("%s: %s (%.0f ms, outputs in %s)\n", name.c_str(),
                man.all_pass() ? "all checks passed" : "CHECKS FAILED", man.wall_ms,
                out.string().c_str());
    return man.all_pass() ? 0 : 1;
}

ModulusSpec modulus_by_name(const std::string& kind, const std::string& file) {
    if (kind == "lipschitz") return ModulusSpec::lipschitz();
    if (kind == "loglip") return ModulusSpec::log_lipschitz();
    if (kind.rfind("chain:", 0) == 0)
        return ModulusSpec::iterated_log_chain(std::stoi(kind.substr(6)));
    if (kind == "custom") {
        if (file.empty()) throw ConfigError("custom modulus needs --file");
        return ModulusSpec::custom_from_file(file);
    }
    throw ConfigError("unknown modulus kind: " + kind);
}

VelocityField field_by_name(const std::string& name) {
    if (name == "hyperbolic") return VelocityField::hyperbolic();
    if (name == "rotation") return VelocityField::rigid_rotation(1.0);
    if (name == "zero") return VelocityField::zero();
    if (name.rfind("cell:", 0) == 0)
        return VelocityField::bahouri_chemin(std::stoi(name.substr(5)));
    throw ConfigError("unknown velocity field: " + name);
}

FShape shape_by_name(const std::string& name) {
    if (name == "identity") return FShape::identity();
    if (name == "log") return FShape::log_shape();
    if (name == "square") return FShape::square();
    if (name.rfind("power:", 0) == 0) return FShape::power(std::stod(name.substr(6)));
    if (name.rfind("sin:", 0) == 0) return FShape::sin_shape(std::stod(name.substr(4)));
    if (name == "zlogz") return zlogz_shape();
    throw ConfigError("unknown shape: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory: Osgood moduli, singular transport, 2D Euler vortices"};
    app.require_subcommand(1);

    // preset runners
    auto preset_args = std::make_shared<std::map<std::string, PresetArgs>>();
    for (const auto& p : presets()) {
        auto* sub = app.add_subcommand(p.name, p.claim);
        auto& args = (*preset_args)[p.name];
        sub->add_option("--set", args.sets, "override a config key (key=value)");
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--config", args.config_file, "flat key=value config file");
    }

    auto* list = app.add_subcommand("list", "enumerate presets with their claims");

    // modulus eval
    auto* modulus = app.add_subcommand("modulus", "modulus tables");
    auto* meval = modulus->add_subcommand("eval", "print a (z, L, M, R) CSV table");
    std::string m_kind = "loglip", m_file;
    double m_zmin = 1e-6, m_zmax = 0.3;
    int m_count = 50;
    meval->add_option("--kind", m_kind, "lipschitz | loglip | chain:<n> | custom");
    meval->add_option("--file", m_file, "two-column (z, L) file for custom moduli");
    meval->add_option("--zmin", m_zmin);
    meval->add_option("--zmax", m_zmax);
    meval->add_option("--count", m_count);

    // lemma-lp convenience flags on top of the preset of the same name
    auto* lemma = app.get_subcommand("lemma-lp");
    int l_n = 0;
    double l_pmax = 0.0;
    lemma->add_option("--n", l_n, "restrict to a single iteration depth");
    lemma->add_option("--pmax", l_pmax, "largest exponent (doubling grid from 2)");

    // seminorm table on a synthetic cusp
    auto* seminorm = app.add_subcommand("seminorm", "seminorm table for a synthetic cusp");
    double s_gamma = 1.0;
    int s_n = 512;
    std::string s_radii = "0.12,0.08,0.05,0.03", s_shape = "identity";
    seminorm->add_option("--gamma", s_gamma);
    seminorm->add_option("--n", s_n);
    seminorm->add_option("--radii", s_radii);
    seminorm->add_option("--shape", s_shape);

    // flow trace / certify
    auto* flow = app.add_subcommand("flow", "characteristic flows");
    auto* trace = flow->add_subcommand("trace", "trajectory CSV (t, x1, x2)");
    std::string f_field = "hyperbolic";
    double f_x = 0.1, f_y = 0.0, f_t = 1.0, f_tol = 1e-10;
    trace->add_option("--field", f_field, "hyperbolic | rotation | zero | cell:<K>");
    trace->add_option("--x", f_x);
    trace->add_option("--y", f_y);
    trace->add_option("--t", f_t);
    trace->add_option("--tol", f_tol);
    auto* certify = flow->add_subcommand("certify", "two-point separation certificate (JSON)");
    double c_x1 = 0.1, c_y1 = 0.0, c_x2 = 0.12, c_y2 = 0.01, c_t = 1.0;
    std::string c_field = "hyperbolic", c_modulus = "lipschitz";
    double c_constant = 0.0;
    certify->add_option("--field", c_field);
    certify->add_option("--modulus", c_modulus);
    certify->add_option("--constant", c_constant, "override the modulus constant");
    certify->add_option("--x1", c_x1);
    certify->add_option("--y1", c_y1);
    certify->add_option("--x2", c_x2);
    certify->add_option("--y2", c_y2);
    certify->add_option("--t", c_t);

    // transport run
    auto* transport = app.add_subcommand("transport", "linear transport of singular data");
    auto* trun = transport->add_subcommand("run", "solve and extract the remainder");
    std::string t_field = "hyperbolic", t_shape = "identity", t_out = "out/transport";
    int t_n = 256;
    double t_t = 0.5, t_tol = 1e-8, t_gamma = 1.0, t_rcut = 0.35, t_r = 0.2, t_b0 = 0.2;
    trun->add_option("--field", t_field);
    trun->add_option("--shape", t_shape);
    trun->add_option("--t", t_t);
    trun->add_option("--n", t_n);
    trun->add_option("--tol", t_tol);
    trun->add_option("--gamma", t_gamma);
    trun->add_option("--r-cut", t_rcut);
    trun->add_option("--r", t_r, "remainder extraction radius");
    trun->add_option("--b0-amp", t_b0);
    trun->add_option("--out", t_out);

    // euler run
    auto* euler = app.add_subcommand("euler", "2D Euler vortex runs");
    auto* erun = euler->add_subcommand("run", "evolve tracked singular vortices");
    std::vector<std::string> e_vortices;
    int e_n = 256, e_monitor = 10;
    double e_T = 1.0, e_dt = 0.0, e_rcut = 0.3, e_b0 = 0.0;
    std::string e_theta = "log", e_out = "out/euler";
    erun->add_option("--vortex", e_vortices, "gamma:cx:cy (repeatable)");
    erun->add_option("--n", e_n);
    erun->add_option("--T", e_T);
    erun->add_option("--dt", e_dt, "0 = from the initial CFL bound");
    erun->add_option("--r-cut", e_rcut);
    erun->add_option("--b0-amp", e_b0, "amplitude of a smooth background patch");
    erun->add_option("--theta", e_theta);
    erun->add_option("--monitor-every", e_monitor);
    erun->add_option("--out", e_out);

    // stability front end delegates to the two presets
    auto* stability = app.add_subcommand("stability", "regularized-family experiments");
    auto* lightcone = stability->add_subcommand("lightcone", "exterior error confinement");
    auto* interp = stability->add_subcommand("interp", "interpolation inequality sweep");
    PresetArgs lc_args, in_args;
    for (auto [sub, args] : {std::pair{lightcone, &lc_args}, std::pair{interp, &in_args}}) {
        sub->add_option("--set", args->sets, "override a config key (key=value)");
        sub->add_option("--out", args->out, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& p : presets()) std::printf("%-22s %s\n", p.name.c_str(), p.claim.c_str());
            return 0;
        }
        if (*meval) {
            auto spec = modulus_by_name(m_kind, m_file);
            std::printf("z,L,M,R\n");
            for (int i = 0; i < m_count; ++i) {
                const double z =
                    m_zmin * std::pow(m_zmax / m_zmin, i / std::max(1.0, m_count - 1.0));
                std::printf("%s,%s,%s,%s\n", format_double(z).c_str(),
                            format_double(spec.L(z)).c_str(), format_double(spec.M(z)).c_str(),
                            format_double(spec.R(z)).c_str());
            }
            return 0;
        }
        if (*seminorm) {
            auto spec = ModulusSpec::log_lipschitz();
            SingularProfile profile({0.0, 0.0}, s_gamma, spec, shape_by_name(s_shape), 0.35);
            Grid2D g = Grid2D::box(s_n, {-0.5, -0.5}, 1.0);
            auto f = ScalarField2D::sample(g, [&profile](Vec2 p) { return profile(p); });
            auto table = local_seminorm(f, spec, {0.0, 0.0}, s_gamma,
                                        parse_double_list(s_radii));
            std::printf("radius,value\n");
            for (std::size_t k = 0; k < table.radii.size(); ++k)
                std::printf("%s,%s\n", format_double(table.radii[k]).c_str(),
                            format_double(table.values[k]).c_str());
            std::printf("# extrapolated_limit,%s\n",
                        format_double(table.extrapolated_limit).c_str());
            return 0;
        }
        if (*trace) {
            auto traj = integrate_flow(field_by_name(f_field), {f_x, f_y}, f_t, f_tol);
            std::printf("t,x1,x2\n");
            for (std::size_t k = 0; k < traj.times.size(); ++k)
                std::printf("%s,%s,%s\n", format_double(traj.times[k]).c_str(),
                            format_double(traj.positions[k].x).c_str(),
                            format_double(traj.positions[k].y).c_str());
            return 0;
        }
        if (*certify) {
            auto u = field_by_name(c_field);
            auto cert = pair_separation_certificate(
                u, modulus_by_name(c_modulus, ""), {c_x1, c_y1}, {c_x2, c_y2}, c_t, 1e-10,
                c_constant > 0.0 ? std::optional<double>(c_constant) : std::nullopt);
            nlohmann::json j{{"sep0", cert.sep0},   {"sep_t", cert.sep_t},
                             {"ratio", cert.ratio}, {"mu", cert.mu},
                             {"lower", cert.lower}, {"upper", cert.upper},
                             {"pass", cert.pass},   {"slack", cert.slack}};
            std::printf("%s\n", j.dump().c_str());
            return cert.pass ? 0 : 1;
        }
        if (*trun) {
            auto spec = ModulusSpec::log_lipschitz();
            auto u = field_by_name(t_field);
            SingularProfile profile({0.0, 0.0}, t_gamma, spec, shape_by_name(t_shape), t_rcut);
            auto data = InitialData::from_profile(profile);
            const double amp = t_b0;
            data.background = [amp](Vec2 p) {
                return amp * std::cos(5.0 * p.x) * std::cos(3.0 * p.y);
            };
            Grid2D g = Grid2D::box(t_n, {-0.5, -0.5}, 1.0);
            auto sol = solve_transport(u, data, t_t, g, t_tol);
            fs::create_directories(t_out);
            write_field(fs::path(t_out) / "theta", sol.theta, t_t);
            const double lint = (u.bound() ? u.bound()->constant : 1.0) * t_t;
            const Vec2 center_t = integrate_flow(u, {0.0, 0.0}, t_t, 1e-12).end();
            auto [b, rec] = extract_remainder(sol.theta, profile.with_center(center_t), center_t,
                                              mu_factor(lint), t_r, amp, t_t);
            nlohmann::json j{{"t", rec.t},
                             {"r", rec.r},
                             {"r_valid", rec.r_valid},
                             {"sup_b", rec.sup_b},
                             {"bound", rec.bound},
                             {"margin", rec.margin},
                             {"pass", rec.pass},
                             {"sign_changes", rec.sign_changes}};
            write_json(fs::path(t_out) / "remainder.json", j);
            std::printf("%s\n", j.dump().c_str());
            return rec.pass ? 0 : 1;
        }
        if (*erun) {
            VortexSystem sys;
            SingularProfile prof({0.0, 0.0}, 1.0, ModulusSpec::log_lipschitz(),
                                 FShape::identity(), e_rcut);
            if (e_vortices.empty()) e_vortices = {"1:" + format_double(kPi) + ":" + format_double(kPi)};
            for (const auto& v : e_vortices) {
                auto list3 = parse_double_list([&] {
                    std::string s = v;
                    for (auto& c : s)
                        if (c == ':') c = ',';
                    return s;
                }());
                if (list3.size() != 3) throw ConfigError("--vortex expects gamma:cx:cy");
                const Vec2 c{list3[1], list3[2]};
                sys.vortices.emplace_back(list3[0], prof.with_center(c), c);
            }
            if (e_b0 > 0.0) {
                const double amp = e_b0;
                sys.background = [amp](Vec2 p) {
                    const double d = torus_distance(p, {kPi + 1.5, kPi}, kTwoPi);
                    return amp * std::exp(-2.0 * d * d);
                };
            }
            VortexRunConfig rc;
            rc.n = e_n;
            rc.T = e_T;
            rc.dt = e_dt;
            rc.monitor_every = e_monitor;
            rc.theta = ThetaFunction::by_name(e_theta);
            auto res = run_singular_vortex(sys, rc);
            fs::create_directories(e_out);
            {
                std::vector<std::string> head = {"t"};
                for (std::size_t v = 0; v < sys.vortices.size(); ++v) {
                    head.push_back("c" + std::to_string(v) + "x");
                    head.push_back("c" + std::to_string(v) + "y");
                }
                CsvWriter centers(fs::path(e_out) / "centers.csv", head);
                for (const auto& row : res.rows) {
                    std::vector<double> vals = {row.t};
                    for (const auto& c : row.centers) {
                        vals.push_back(c.x);
                        vals.push_back(c.y);
                    }
                    centers.row(vals);
                }
            }
            {
                CsvWriter norms(fs::path(e_out) / "norms.csv",
                                {"t", "sup_b", "l1_b", "l2_b", "yudovich_ratio", "umax"});
                for (const auto& row : res.rows)
                    norms.row({row.t, row.sup_b, row.l1_b, row.l2_b, row.yudovich_ratio,
                               row.umax});
            }
            write_field(fs::path(e_out) / "vorticity_final", res.state.to_physical(),
                        res.state.t);
            std::printf("euler run: %d steps to t=%s, outputs in %s\n", res.steps,
                        format_double(res.state.t).c_str(), e_out.c_str());
            return 0;
        }
        if (*lightcone) return run_preset_command("lightcone", lc_args);
        if (*interp) return run_preset_command("interp", in_args);
        for (const auto& p : presets())
            if (app.get_subcommand(p.name)->parsed()) {
                auto args = (*preset_args)[p.name];
                if (p.name == "lemma-lp") {
                    if (l_n > 0) args.sets.push_back("nmax=" + std::to_string(l_n));
                    if (l_pmax > 0.0) args.sets.push_back("pmax=" + format_double(l_pmax));
                }
                return run_preset_command(p.name, args);
            }
        std::fprintf(stderr, "no subcommand matched\n");
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
