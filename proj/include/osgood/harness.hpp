#ifndef OSGOOD_HARNESS_HPP
#define OSGOOD_HARNESS_HPP

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "osgood/euler2d.hpp"
#include "osgood/io.hpp"
#include "osgood/stability.hpp"
#include "osgood/transport.hpp"

namespace osgood {

// Flat typed configuration. Every key is declared by the preset's defaults;
// overrides must match the declared type and unknown keys are hard errors.
using ConfigValue = std::variant<long long, double, std::string>;

struct ExperimentConfig {
    std::string preset;
    std::map<std::string, ConfigValue> values;

    long long geti(const std::string& key) const {
        const auto& v = at(key);
        if (const auto* p = std::get_if<long long>(&v)) return *p;
        throw ConfigError("config key '" + key + "' is not an integer");
    }
    double getd(const std::string& key) const {
        const auto& v = at(key);
        if (const auto* p = std::get_if<double>(&v)) return *p;
        if (const auto* p = std::get_if<long long>(&v)) return static_cast<double>(*p);
        throw ConfigError("config key '" + key + "' is not numeric");
    }
    std::string gets(const std::string& key) const {
        const auto& v = at(key);
        if (const auto* p = std::get_if<std::string>(&v)) return *p;
        throw ConfigError("config key '" + key + "' is not a string");
    }

    void set_from_string(const std::string& key, const std::string& raw) {
        auto it = values.find(key);
        if (it == values.end())
            throw ConfigError("unknown config key '" + key + "' for preset " + preset);
        try {
            if (std::holds_alternative<long long>(it->second)) {
                std::size_t used = 0;
                const long long v = std::stoll(raw, &used);
                if (used != raw.size()) throw std::invalid_argument(raw);
                it->second = v;
            } else if (std::holds_alternative<double>(it->second)) {
                std::size_t used = 0;
                const double v = std::stod(raw, &used);
                if (used != raw.size()) throw std::invalid_argument(raw);
                it->second = v;
            } else {
                it->second = raw;
            }
        } catch (const std::exception&) {
            throw ConfigError("cannot parse '" + raw + "' for config key '" + key + "'");
        }
    }

    // key = value lines; '#' starts a comment; blank lines ignored.
    void apply_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path.string());
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string{};
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            const std::string rest = trim(line);
            if (rest.empty()) continue;
            if (eq == std::string::npos)
                throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            set_from_string(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }

    std::map<std::string, std::string> echo() const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : values) {
            if (const auto* p = std::get_if<long long>(&v))
                out[k] = std::to_string(*p);
            else if (const auto* p = std::get_if<double>(&v))
                out[k] = format_double(*p);
            else
                out[k] = std::get<std::string>(v);
        }
        return out;
    }

private:
    const ConfigValue& at(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
        return it->second;
    }
};

inline std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    if (out.empty()) throw ConfigError("empty numeric list: '" + s + "'");
    return out;
}

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0.0;
    double bound = 0.0;
};

struct RunManifest {
    std::string preset;
    std::string claim;
    std::string version = "0.1.0";
    std::string hash;
    std::map<std::string, std::string> config;
    double wall_ms = 0.0;
    long long steps = 0;
    std::vector<CheckResult> checks;
    std::map<std::string, double> metrics;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void check(const std::string& name, bool pass, double value, double bound) {
        checks.push_back({name, pass, value, bound});
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["preset"] = preset;
        j["claim"] = claim;
        j["version"] = version;
        j["hash"] = hash;
        j["config"] = config;
        j["wall_ms"] = wall_ms;
        j["steps"] = steps;
        j["all_pass"] = all_pass();
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            j["checks"].push_back(
                {{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"bound", c.bound}});
        j["metrics"] = metrics;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.preset = j.at("preset").get<std::string>();
        m.claim = j.value("claim", "");
        m.version = j.value("version", "");
        m.hash = j.value("hash", "");
        if (j.contains("config"))
            m.config = j.at("config").get<std::map<std::string, std::string>>();
        m.wall_ms = j.value("wall_ms", 0.0);
        m.steps = j.value("steps", 0ll);
        for (const auto& c : j.value("checks", nlohmann::json::array()))
            m.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(),
                                c.at("value").get<double>(), c.at("bound").get<double>()});
        if (j.contains("metrics"))
            m.metrics = j.at("metrics").get<std::map<std::string, double>>();
        return m;
    }
};

struct Preset {
    std::string name;
    std::string claim;
    ExperimentConfig defaults;
    std::function<void(const ExperimentConfig&, const std::filesystem::path&, RunManifest&)> run;
};

namespace presets_detail {

inline ExperimentConfig make_config(
    std::string preset,
    std::initializer_list<std::pair<const char*, ConfigValue>> entries) {
    ExperimentConfig cfg;
    cfg.preset = std::move(preset);
    for (const auto& [k, v] : entries) cfg.values.emplace(k, v);
    return cfg;
}

// 1. Two-sided R-ratio bracket for the hyperbolic flow.
inline void run_osgood_certificate(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                   RunManifest& man) {
    const int pairs = static_cast<int>(cfg.geti("pairs"));
    const double t = cfg.getd("t");
    const double tol = cfg.getd("tol");
    std::mt19937_64 rng(static_cast<unsigned long long>(cfg.geti("seed")));
    auto u = VelocityField::hyperbolic();
    auto spec = ModulusSpec::lipschitz();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Vec2 line{inv_sqrt2, -inv_sqrt2};
    std::uniform_real_distribution<double> amp(-0.15, 0.15);
    std::uniform_real_distribution<double> box(-0.2, 0.2);
    std::uniform_real_distribution<double> ang(0.0, kTwoPi);
    std::uniform_real_distribution<double> lsep(std::log(1e-3), std::log(0.25));

    std::ofstream certs(out / "certificates.jsonl");
    const double expect = std::exp(-t);
    double worst_err = 0.0, min_slack = std::numeric_limits<double>::infinity();
    bool all_bracket = true;
    for (int i = 0; i < pairs; ++i) {
        double a = amp(rng), b = amp(rng);
        while (std::abs(a - b) < 1e-3) b = amp(rng);
        auto cert = pair_separation_certificate(u, spec, a * line, b * line, t);
        worst_err = std::max(worst_err, std::abs(cert.ratio - expect));
        certs << nlohmann::json({{"kind", "stable-line"},
                                 {"sep0", cert.sep0},
                                 {"sep_t", cert.sep_t},
                                 {"ratio", cert.ratio},
                                 {"mu", cert.mu},
                                 {"pass", cert.pass}})
                     .dump()
              << "\n";

        const Vec2 x{box(rng), box(rng)};
        const double sep = std::exp(lsep(rng)), th = ang(rng);
        const Vec2 y = x + sep * Vec2{std::cos(th), std::sin(th)};
        auto off = pair_separation_certificate(u, spec, x, y, t);
        all_bracket = all_bracket && off.pass;
        min_slack = std::min(min_slack, off.slack);
        certs << nlohmann::json({{"kind", "generic"},
                                 {"sep0", off.sep0},
                                 {"sep_t", off.sep_t},
                                 {"ratio", off.ratio},
                                 {"mu", off.mu},
                                 {"pass", off.pass}})
                     .dump()
              << "\n";
    }
    man.steps = 2ll * pairs;
    man.metrics["stable_ratio_error"] = worst_err;
    man.metrics["min_bracket_slack"] = min_slack;
    man.check("stable-line-ratio", worst_err <= tol, worst_err, tol);
    man.check("two-sided-bracket", all_bracket && min_slack >= 0.0, min_slack, 0.0);
}

// 2. Local seminorm before/after transport, with the radius bracketing.
inline void run_seminorm_propagation(const ExperimentConfig& cfg,
                                     const std::filesystem::path& out, RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const double t = cfg.getd("t");
    const double gamma = cfg.getd("gamma");
    const double slack = cfg.getd("slack");
    auto spec = ModulusSpec::log_lipschitz();
    SingularProfile profile({0.0, 0.0}, gamma, spec, FShape::identity(), cfg.getd("r_cut"));
    auto data = InitialData::from_profile(profile);
    auto radii = parse_double_list(cfg.gets("radii"));
    auto pair = seminorm_transport_check(VelocityField::hyperbolic(), spec, data, {0.0, 0.0},
                                         gamma, t, radii, n, cfg.getd("tol"), slack);
    CsvWriter csv(out / "seminorm.csv", {"radius", "before", "after_inner", "after_outer"});
    for (std::size_t k = 0; k < radii.size(); ++k)
        csv.row({radii[k], pair.before.values[k], pair.after_inner.values[k],
                 pair.after_outer.values[k]});
    man.steps = n;
    man.metrics["worst_defect"] = pair.worst_defect;
    man.check("bracket-containment", pair.bracket_pass, pair.worst_defect, slack);
}

// 3. Remainder bound over the {field} x {shape} x {t} matrix.
inline void run_local_structure(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const double r = cfg.getd("r");
    const double b0_amp = cfg.getd("b0_amp");
    const double slack = cfg.getd("slack");
    const double tol = cfg.getd("tol");
    auto spec = ModulusSpec::log_lipschitz();

    struct Case {
        VelocityField u;
        Vec2 center;
        Grid2D grid;
    };
    std::vector<Case> fields;
    fields.push_back({VelocityField::hyperbolic(), {0.0, 0.0}, Grid2D::box(n, {-0.3, -0.3}, 0.6)});
    // the rotation case sweeps a wider domain; double the node count so the
    // shrunken valid ball at t=1 still spans enough cells
    fields.push_back(
        {VelocityField::rigid_rotation(1.0), {0.3, 0.0}, Grid2D::box(2 * n, {-0.7, -0.7}, 1.4)});
    std::vector<FShape> shapes = {FShape::identity(), FShape::sin_shape(0.3)};

    CsvWriter csv(out / "remainder.csv", {"case", "t", "sup_b", "bound", "r_valid"});
    bool all = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    int case_id = 0;
    for (const auto& fc : fields)
        for (const auto& shape : shapes)
            for (double t : {0.25, 0.5, 1.0}) {
                SingularProfile profile(fc.center, 1.0, spec, shape, 0.35);
                auto data = InitialData::from_profile(profile);
                data.background = [b0_amp](Vec2 p) {
                    return b0_amp * std::cos(5.0 * p.x) * std::cos(3.0 * p.y);
                };
                auto sol = solve_transport(fc.u, data, t, fc.grid, tol);
                const double lint = fc.u.bound()->constant * t;
                const Vec2 center_t = integrate_flow(fc.u, fc.center, t, 1e-12).end();
                auto [b, rec] = extract_remainder(sol.theta, profile.with_center(center_t),
                                                  center_t, mu_factor(lint), r, b0_amp, t);
                const double bound = b0_amp + shape.slope_bound * lint * (1.0 + slack);
                const bool ok = rec.sup_b <= bound;
                all = all && ok;
                worst_margin = std::min(worst_margin, bound - rec.sup_b);
                csv.row({static_cast<double>(case_id++), t, rec.sup_b, bound, rec.r_valid});
                man.check(fc.u.name() + "/" + shape.name + "/t=" + format_double(t), ok,
                          rec.sup_b, bound);
            }
    man.steps = case_id;
    man.metrics["worst_margin"] = worst_margin;
}

// 4. Superlinear shape divergence slope for the Lipschitz saddle.
inline void run_sharpness_lipschitz(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                    RunManifest& man) {
    const double t = cfg.getd("t");
    std::vector<double> radii;
    for (long long k = cfg.geti("k_min"); k <= cfg.geti("k_max"); ++k)
        radii.push_back(std::ldexp(1.0, -static_cast<int>(k)));
    const int n_angles = static_cast<int>(cfg.geti("n_angles"));
    auto sq = sharpness_experiment(SharpnessKind::LipschitzSuperlinear, FShape::square(), t, radii,
                                   n_angles);
    auto id = sharpness_experiment(SharpnessKind::LipschitzSuperlinear, FShape::identity(), t,
                                   radii, n_angles);
    CsvWriter csv(out / "divergence.csv", {"r", "M", "sup_b_square", "sup_b_identity"});
    for (std::size_t k = 0; k < radii.size(); ++k)
        csv.row({radii[k], sq.M_values[k], sq.sup_b[k], id.sup_b[k]});
    man.steps = static_cast<long long>(radii.size()) * n_angles;
    man.metrics["slope"] = sq.slope;
    const double slope_tol = cfg.getd("slope_tol");
    man.check("divergence-slope", std::abs(sq.slope - 2.0 * t) <= slope_tol,
              std::abs(sq.slope - 2.0 * t), slope_tol);
    double id_max = 0.0;
    for (double s : id.sup_b) id_max = std::max(id_max, s);
    man.metrics["control_sup"] = id_max;
    man.check("identity-control", id_max <= t + 0.05, id_max, t + 0.05);
}

// 5. Cell-flow divergence per unit modulus for the log-Lipschitz case.
inline void run_sharpness_loglipschitz(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out, RunManifest& man) {
    const double t = cfg.getd("t");
    auto radii = parse_double_list(cfg.gets("radii"));
    auto table = sharpness_experiment(SharpnessKind::LogLipschitzSuperlinear, FShape::square(), t,
                                      radii, static_cast<int>(cfg.geti("n_angles")),
                                      static_cast<int>(cfg.geti("trunc")), cfg.getd("tol"));
    CsvWriter csv(out / "divergence.csv", {"r", "M", "sup_b"});
    for (std::size_t k = 0; k < radii.size(); ++k)
        csv.row({radii[k], table.M_values[k], table.sup_b[k]});
    man.steps = static_cast<long long>(radii.size()) * cfg.geti("n_angles");
    const double rate = table.sup_b.back() / table.M_values.back();
    man.metrics["rate_per_modulus"] = rate;
    man.check("divergence-rate", rate >= t / 4.0, rate, t / 4.0);
}

// 6. Iterated-log Lp growth by radial quadrature.
inline void run_lemma_lp(const ExperimentConfig& cfg, const std::filesystem::path& out,
                         RunManifest& man) {
    std::vector<double> p_grid;
    for (double p = 2.0; p <= cfg.getd("pmax") + 0.5; p *= 2.0) p_grid.push_back(p);
    CsvWriter csv(out / "lemma.csv", {"n", "p", "norm", "ratio"});
    double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0, drift = 0.0;
    for (int n = 1; n <= static_cast<int>(cfg.geti("nmax")); ++n) {
        auto rows = iterated_log_lp_growth(n, p_grid);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            csv.row({static_cast<double>(n), rows[k].p, rows[k].norm, rows[k].ratio});
            // the comparison function log_{n-1}(p) must be positive for the
            // ratio to mean anything; skip the handful of p below its zero
            const double denom = (n == 1) ? rows[k].p : iterated_log(n - 1, rows[k].p);
            if (denom <= 0.0) continue;
            rmin = std::min(rmin, rows[k].ratio);
            rmax = std::max(rmax, rows[k].ratio);
            if (k > 0 && rows[k - 1].p >= 64.0)
                drift = std::max(drift,
                                 std::abs(rows[k].ratio / rows[k - 1].ratio - 1.0));
        }
    }
    man.steps = static_cast<long long>(p_grid.size()) * cfg.geti("nmax");
    man.metrics["ratio_min"] = rmin;
    man.metrics["ratio_max"] = rmax;
    man.metrics["doubling_drift"] = drift;
    man.check("ratio-window-low", rmin >= 0.1, rmin, 0.1);
    man.check("ratio-window-high", rmax <= 10.0, rmax, 10.0);
    man.check("doubling-drift", drift < 0.15, drift, 0.15);
}

// 7. Steady singular vortex drift plus a smooth conservation control.
inline void run_euler_steady(const ExperimentConfig& cfg, const std::filesystem::path& out,
                             RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const double T = cfg.getd("T");
    VortexSystem sys;
    SingularProfile prof({kPi, kPi}, cfg.getd("gamma"), ModulusSpec::log_lipschitz(),
                         FShape::identity(), cfg.getd("r_cut"));
    sys.vortices.emplace_back(1.0, prof.with_moll_scale(cfg.getd("moll_cells") * kTwoPi / n),
                              Vec2{kPi, kPi});
    VortexRunConfig rc;
    rc.n = n;
    rc.T = T;
    rc.monitor_every = static_cast<int>(cfg.geti("monitor_every"));
    auto res = run_singular_vortex(sys, rc);
    man.steps = res.steps;

    // drift against the band-limited projection of the initial data, which is
    // the state the solver actually evolves
    auto s0 = SpectralState::from_physical(prepare_system(sys, n).initial_vorticity(n));
    s0.dealias();
    s0.remove_mean();
    auto w0 = s0.to_physical();
    auto wT = res.state.to_physical();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < wT.data().size(); ++i) {
        const double d = wT.data()[i] - w0.data()[i];
        num += d * d;
        den += w0.data()[i] * w0.data()[i];
    }
    const double drift = std::sqrt(num / den);
    const double center_move =
        torus_distance(res.system.vortices[0].center, {kPi, kPi}, kTwoPi);

    CsvWriter csv(out / "norms.csv", {"t", "sup_b", "l1_b", "l2_b", "umax"});
    for (const auto& row : res.rows) csv.row({row.t, row.sup_b, row.l1_b, row.l2_b, row.umax});
    write_field(out / "vorticity_final", wT, res.state.t);

    // smooth control: Taylor-Green conserves energy and enstrophy
    const int nc = static_cast<int>(cfg.geti("n_control"));
    auto tg = SpectralState::from_physical(ScalarField2D::sample(
        Grid2D::torus(nc), [](Vec2 p) { return std::cos(p.x) * std::cos(p.y); }));
    const double e0 = tg.energy(), z0 = tg.enstrophy();
    double dt = 0.01;
    while (tg.t < T - 1e-12) {
        try {
            euler_rk4_step(tg, std::min(dt, T - tg.t));
        } catch (const CflError& e) {
            dt = e.suggested_dt;
        }
    }
    const double e_drift = std::abs(tg.energy() - e0) / e0;
    const double z_drift = std::abs(tg.enstrophy() - z0) / z0;

    man.metrics["l2_drift"] = drift;
    man.metrics["center_move"] = center_move;
    man.metrics["energy_drift"] = e_drift;
    man.metrics["enstrophy_drift"] = z_drift;
    man.check("vorticity-drift", drift < cfg.getd("drift_tol"), drift, cfg.getd("drift_tol"));
    man.check("energy-control", e_drift < cfg.getd("control_tol"), e_drift,
              cfg.getd("control_tol"));
    man.check("enstrophy-control", z_drift < cfg.getd("control_tol"), z_drift,
              cfg.getd("control_tol"));
}

// 8. Perturbed vortex: Lp remainder growth against the measured constant.
inline void run_euler_perturbed(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const double T = cfg.getd("T");
    const double b0_amp = cfg.getd("b0_amp");
    const double slack = cfg.getd("slack");
    SingularProfile prof({kPi, kPi}, cfg.getd("gamma"), ModulusSpec::log_lipschitz(),
                         FShape::identity(), cfg.getd("r_cut"));
    const SingularProfile moll_prof = prof.with_moll_scale(cfg.getd("moll_cells") * kTwoPi / n);
    VortexSystem sys;
    sys.vortices.emplace_back(1.0, moll_prof, Vec2{kPi, kPi});
    const Vec2 patch{kPi + 1.5, kPi};
    sys.background = [b0_amp, patch](Vec2 p) {
        const double d = torus_distance(p, patch, kTwoPi);
        return b0_amp * std::exp(-2.0 * d * d);
    };
    VortexRunConfig rc;
    rc.n = n;
    rc.T = T;
    rc.monitor_every = static_cast<int>(cfg.geti("monitor_every"));
    rc.p_grid = {2.0, 4.0, 8.0, 16.0};
    rc.theta = ThetaFunction::by_name(cfg.gets("theta"));
    auto res = run_singular_vortex(sys, rc);
    man.steps = res.steps;

    // measured modulus constant of the vortex-induced velocity
    auto u_r = VelocityField::radial_vortex(moll_prof);
    const double c_meas = u_r.estimate_modulus_constant(
        ModulusSpec::log_lipschitz(), {kPi - 1.0, kPi - 1.0}, {kPi + 1.0, kPi + 1.0}, 0.0);
    man.metrics["c_meas"] = c_meas;

    std::vector<std::string> header = {"t", "sup_b"};
    for (double p : rc.p_grid) header.push_back("l" + format_double(p) + "_b");
    header.push_back("yudovich_ratio");
    CsvWriter csv(out / "norms.csv", header);
    for (const auto& row : res.rows) {
        std::vector<double> vals = {row.t, row.sup_b};
        vals.insert(vals.end(), row.lp_b.begin(), row.lp_b.end());
        vals.push_back(row.yudovich_ratio);
        csv.row(vals);
    }

    for (std::size_t k = 0; k < rc.p_grid.size(); ++k) {
        const double p = rc.p_grid[k];
        const double theta_p = rc.theta.eval(p);
        bool ok = true;
        double worst = -std::numeric_limits<double>::infinity();
        for (const auto& row : res.rows) {
            const double bound =
                res.rows.front().lp_b[k] + row.t * c_meas * theta_p * (1.0 + slack);
            ok = ok && row.lp_b[k] <= bound;
            worst = std::max(worst, row.lp_b[k] - bound);
        }
        man.metrics["final_l" + format_double(p)] = res.rows.back().lp_b[k];
        man.check("lp-growth/p=" + format_double(p), ok, worst, 0.0);
    }
}

// 9. Two-vortex rotation against the reduced point-vortex oracle.
inline void run_euler_two_vortex(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                 RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const double g = cfg.getd("gamma");
    const double d = cfg.getd("separation");
    SingularProfile prof({0.0, 0.0}, 1.0, ModulusSpec::log_lipschitz(), FShape::identity(),
                         cfg.getd("r_cut"));
    const Vec2 c1{kPi - d / 2.0, kPi}, c2{kPi + d / 2.0, kPi};
    VortexSystem sys;
    sys.vortices.emplace_back(g, prof.with_center(c1), c1);
    sys.vortices.emplace_back(g, prof.with_center(c2), c2);

    auto prepared = prepare_system(sys, n);
    RadialVelocityTable table(prepared.vortices[0].profile);
    const double circ = g * table.circulation();
    auto orbit = reduced_two_body_orbit(c1, c2, circ, circ, 40.0 / circ, 1e-3);

    VortexRunConfig rc;
    rc.n = n;
    rc.T = cfg.getd("t_factor") * orbit.half_period;
    rc.monitor_every = static_cast<int>(cfg.geti("monitor_every"));
    auto res = run_singular_vortex(sys, rc);
    man.steps = res.steps;
    const double measured = measured_half_period(res.rows);
    const double rel = std::abs(measured - orbit.half_period) / orbit.half_period;

    CsvWriter csv(out / "centers.csv", {"t", "c1x", "c1y", "c2x", "c2y"});
    for (const auto& row : res.rows)
        csv.row({row.t, row.centers[0].x, row.centers[0].y, row.centers[1].x, row.centers[1].y});
    man.metrics["circulation"] = circ;
    man.metrics["reduced_half_period"] = orbit.half_period;
    man.metrics["measured_half_period"] = measured;
    man.check("half-period", rel <= cfg.getd("tol"), rel, cfg.getd("tol"));
}

// 10. Exterior error confinement for two regularizations.
inline void run_lightcone(const ExperimentConfig& cfg, const std::filesystem::path& out,
                          RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    SingularProfile prof({kPi, kPi}, cfg.getd("gamma"), ModulusSpec::log_lipschitz(),
                         FShape::identity(), cfg.getd("r_cut"));
    const double bg_amp = cfg.getd("bg_amp");
    auto bg = [bg_amp](Vec2 p) { return bg_amp * std::cos(p.x) * std::sin(p.y); };
    auto fam = RegularizedFamily::from_profile(prof, bg, {cfg.getd("eps1"), cfg.getd("eps2")}, n);
    auto res = light_cone_experiment(fam, 0, 1, cfg.getd("T"), cfg.getd("speed"),
                                     static_cast<int>(cfg.geti("monitor_every")));
    man.steps = static_cast<long long>(res.rows.size());

    CsvWriter csv(out / "lightcone.csv",
                  {"t", "ball_radius", "exterior_sup", "interior_norm", "bound_rhs",
                   "front_radius"});
    const double ratio_tol = cfg.getd("ratio_tol");
    bool confined = true;
    double worst_ratio = 0.0;
    for (const auto& row : res.rows) {
        csv.row({row.t, row.ball_radius, row.exterior_sup, row.interior_norm, row.bound_rhs,
                 std::isfinite(row.front_radius) ? row.front_radius : -1.0});
        const double ratio = row.exterior_sup / std::max(row.interior_norm, 1e-30);
        worst_ratio = std::max(worst_ratio, ratio);
        confined = confined && ratio < ratio_tol;
    }
    const double cells = 3.0 * kTwoPi / n;
    man.metrics["worst_exterior_ratio"] = worst_ratio;
    man.metrics["front_speed"] = res.front_speed;
    man.metrics["c_star"] = res.c_star;
    man.check("exterior-confinement", confined, worst_ratio, ratio_tol);
    man.check("front-speed", res.front_speed <= 2.0 * res.c_star + cells, res.front_speed,
              2.0 * res.c_star + cells);
    man.check("cone-fits", !res.truncated, res.truncated ? 1.0 : 0.0, 0.0);
}

// 11. Interpolation inequality over random band-limited fields.
inline void run_interp(const ExperimentConfig& cfg, const std::filesystem::path& out,
                       RunManifest& man) {
    const int n = static_cast<int>(cfg.geti("n"));
    const int k_band = static_cast<int>(cfg.geti("k_band"));
    const int k_max = static_cast<int>(cfg.geti("k_max"));
    const long long trials = cfg.geti("trials");
    std::mt19937_64 rng(static_cast<unsigned long long>(cfg.geti("seed")));
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    const std::vector<double> exponents = {0.25, 0.5, 1.0};

    long long violations = 0;
    std::map<std::pair<int, int>, double> min_slack;  // (exponent idx, k) -> slack
    SpectralState s;
    s.n = n;
    for (long long trial = 0; trial < trials; ++trial) {
        s.w.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int kx = -k_band; kx <= k_band; ++kx)
            for (int ky = -k_band; ky <= k_band; ++ky) {
                if (kx == 0 && ky == 0) continue;
                s.mode((kx + n) % n, (ky + n) % n) = {ud(rng), ud(rng)};
            }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                s.mode((n - i) % n, (n - j) % n) = std::conj(s.mode(i, j));
        for (std::size_t e = 0; e < exponents.size(); ++e)
            for (const auto& row : sobolev_interpolation_check(s, exponents[e], k_max)) {
                const double rel = row.slack / std::max(row.rhs, 1e-300);
                if (rel < -1e-10) ++violations;
                auto key = std::make_pair(static_cast<int>(e), row.k);
                auto it = min_slack.find(key);
                if (it == min_slack.end() || rel < it->second) min_slack[key] = rel;
            }
    }
    CsvWriter csv(out / "interp.csv", {"s", "k", "min_rel_slack"});
    for (const auto& [key, v] : min_slack)
        csv.row({exponents[static_cast<std::size_t>(key.first)], static_cast<double>(key.second),
                 v});
    man.steps = trials;
    man.metrics["violations"] = static_cast<double>(violations);
    man.check("zero-violations", violations == 0, static_cast<double>(violations), 0.0);
}

// 12. Breakdown candidate: emit the sup|b| resolution trend, no pass bound.
inline void run_euler_breakdown(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                RunManifest& man) {
    auto n_list = parse_double_list(cfg.gets("n_list"));
    const double T = cfg.getd("T");
    CsvWriter trend(out / "trend.csv", {"n", "final_sup_b"});
    for (double nd : n_list) {
        const int n = static_cast<int>(nd);
        auto res = breakdown_experiment(n, T, 0.0, static_cast<int>(cfg.geti("monitor_every")));
        CsvWriter csv(out / ("sup_b_" + std::to_string(n) + ".csv"), {"t", "sup_b"});
        for (std::size_t k = 0; k < res.times.size(); ++k) csv.row({res.times[k], res.sup_b[k]});
        trend.row({nd, res.sup_b.back()});
        man.steps += res.run.steps;
        man.metrics["final_sup_b_n" + std::to_string(n)] = res.sup_b.back();
        man.check("completes-n" + std::to_string(n), true, res.sup_b.back(), 0.0);
    }
}

}  // namespace presets_detail

inline const std::vector<Preset>& presets() {
    using namespace presets_detail;
    static const std::vector<Preset> list = {
        {"osgood-certificate",
         "two-point separations under an Osgood velocity field satisfy the two-sided "
         "R-ratio bracket [1/mu, mu], with equality rate e^-t on the stable line",
         make_config("osgood-certificate",
                     {{"pairs", 100ll}, {"t", 1.0}, {"seed", 1234ll}, {"tol", 1e-6}}),
         run_osgood_certificate},
        {"seminorm-propagation",
         "the localized singularity seminorm of a loglog cusp is carried along the flow "
         "within the radius bracket r -> R^-1(mu^{-+1} R(r))",
         make_config("seminorm-propagation",
                     {{"n", 1024ll},
                      {"t", 0.5},
                      {"gamma", 1.0},
                      {"r_cut", 0.35},
                      {"slack", 0.1},
                      {"tol", 1e-9},
                      {"radii", std::string("0.12,0.08,0.05,0.03")}}),
         run_seminorm_propagation},
        {"local-structure",
         "transported data minus the moving singular profile stays bounded by "
         "||b0||_inf + [F] * lint on the shrunken ball",
         make_config("local-structure", {{"n", 512ll},
                                         {"r", 0.2},
                                         {"b0_amp", 0.2},
                                         {"slack", 0.05},
                                         {"tol", 1e-8}}),
         run_local_structure},
        {"sharpness-lipschitz",
         "a superlinear outer shape under the linear saddle makes sup|b| diverge like "
         "2t log(1/r); the admissible identity shape stays bounded",
         make_config("sharpness-lipschitz", {{"t", 1.0},
                                             {"k_min", 4ll},
                                             {"k_max", 10ll},
                                             {"n_angles", 16ll},
                                             {"slope_tol", 0.2}}),
         run_sharpness_lipschitz},
        {"sharpness-loglipschitz",
         "the cell flow drives a superlinear shape's remainder to diverge at least like "
         "(t/4) loglog(1/r)",
         make_config("sharpness-loglipschitz", {{"t", 1.0},
                                                {"n_angles", 8ll},
                                                {"trunc", 31ll},
                                                {"tol", 1e-9},
                                                {"radii", std::string("1e-3,3e-4,1e-4")}}),
         run_sharpness_loglipschitz},
        {"lemma-lp",
         "||log_n(1/|.|)||_{L^p(B_1)} grows like log_{n-1}(p)",
         make_config("lemma-lp", {{"pmax", 256.0}, {"nmax", 3ll}}),
         run_lemma_lp},
        {"euler-steady",
         "a mollified radial loglog vortex is a near-steady state of the spectral "
         "solver; smooth data conserve energy and enstrophy",
         make_config("euler-steady", {{"n", 256ll},
                                      {"n_control", 128ll},
                                      {"T", 1.0},
                                      {"gamma", 1.0},
                                      {"r_cut", 0.3},
                                      {"moll_cells", 3.0},
                                      {"monitor_every", 10ll},
                                      {"drift_tol", 1e-3},
                                      {"control_tol", 1e-6}}),
         run_euler_steady},
        {"euler-perturbed",
         "the remainder around a singular vortex grows in L^p no faster than "
         "t * C * Theta(p), with C the measured modulus constant of the vortex velocity",
         make_config("euler-perturbed", {{"n", 256ll},
                                         {"T", 1.0},
                                         {"gamma", 1.0},
                                         {"r_cut", 0.3},
                                         {"moll_cells", 3.0},
                                         {"b0_amp", 0.5},
                                         {"theta", std::string("log")},
                                         {"slack", 0.1},
                                         {"monitor_every", 10ll}}),
         run_euler_perturbed},
        {"euler-two-vortex",
         "two tracked singular vortices co-rotate with the half period of the reduced "
         "periodic point-vortex dynamics",
         make_config("euler-two-vortex", {{"n", 256ll},
                                          {"gamma", 6.0},
                                          {"r_cut", 0.2},
                                          {"separation", kPi / 4.0},
                                          {"t_factor", 1.3},
                                          {"tol", 0.05},
                                          {"monitor_every", 5ll}}),
         run_euler_two_vortex},
        {"lightcone",
         "two regularizations differing only in the core stay close outside a ball "
         "expanding at the measured velocity scale",
         make_config("lightcone", {{"n", 512ll},
                                   {"gamma", 1.0},
                                   {"r_cut", 0.35},
                                   {"bg_amp", 0.3},
                                   {"eps1", 0.3},
                                   {"eps2", 0.15},
                                   {"T", 0.5},
                                   {"speed", 2.0},
                                   {"ratio_tol", 1e-3},
                                   {"monitor_every", 5ll}}),
         run_lightcone},
        {"interp",
         "||f||_{H^s} <= ||f||_{H^{2^k s}}^{1/2^k} ||f||_{L^2}^{1-1/2^k} on band-limited "
         "fields",
         make_config("interp", {{"trials", 10000ll},
                                {"n", 32ll},
                                {"k_band", 5ll},
                                {"k_max", 4ll},
                                {"seed", 42ll}}),
         run_interp},
        {"euler-breakdown",
         "the iterated-log breakdown candidate runs to completion and emits the "
         "sup|b(t)| resolution trend (conjecture: unbounded as resolution grows)",
         make_config("euler-breakdown", {{"n_list", std::string("256,512")},
                                         {"T", 0.5},
                                         {"monitor_every", 10ll}}),
         run_euler_breakdown},
    };
    return list;
}

inline const Preset& find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    throw ConfigError("unknown preset '" + name + "'");
}

inline RunManifest run_preset(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    const Preset& preset = find_preset(cfg.preset);
    std::filesystem::create_directories(out_dir);
    RunManifest man;
    man.preset = cfg.preset;
    man.claim = preset.claim;
    man.config = cfg.echo();
    std::string blob = cfg.preset;
    for (const auto& [k, v] : man.config) blob += "\n" + k + "=" + v;
    man.hash = content_hash(blob);

    {
        std::ofstream echo(out_dir / "config.txt");
        echo << "# preset " << cfg.preset << "\n";
        for (const auto& [k, v] : man.config) echo << k << " = " << v << "\n";
    }

    const auto start = std::chrono::steady_clock::now();
    preset.run(cfg, out_dir, man);
    man.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    write_json(out_dir / "manifest.json", man.to_json());
    return man;
}

struct RunDiff {
    std::string metric;
    double a = 0.0;
    double b = 0.0;
    double rel = 0.0;
};

// Per-metric relative differences between two runs of the same preset.
inline std::vector<RunDiff> compare_runs(const RunManifest& a, const RunManifest& b) {
    if (a.preset != b.preset)
        throw ConfigError("compare_runs: presets differ (" + a.preset + " vs " + b.preset + ")");
    std::vector<RunDiff> out;
    for (const auto& [k, va] : a.metrics) {
        auto it = b.metrics.find(k);
        if (it == b.metrics.end()) continue;
        RunDiff d;
        d.metric = k;
        d.a = va;
        d.b = it->second;
        const double scale = std::max(std::abs(va), std::abs(it->second));
        d.rel = scale > 0.0 ? std::abs(va - it->second) / scale : 0.0;
        out.push_back(d);
    }
    return out;
}

}  // namespace osgood

#endif  // OSGOOD_HARNESS_HPP
