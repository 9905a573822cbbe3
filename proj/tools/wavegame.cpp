// wavegame <phase-portrait|build-wave|speed-maps|verify|simulate|cooperate> --config FILE [--out DIR] [--quiet]
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavegame/config.hpp"
#include "wavegame/control.hpp"
#include "wavegame/cooperation.hpp"
#include "wavegame/error.hpp"
#include "wavegame/io.hpp"
#include "wavegame/pde_sim.hpp"
#include "wavegame/phase_plane.hpp"
#include "wavegame/wave_builder.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wavegame;

namespace {

struct Run {
    ExperimentConfig cfg;
    fs::path out;
    bool quiet = false;

    void say(const std::string& msg) const {
        if (!quiet) std::cout << msg << '\n';
    }
};

void write_trajectory(const fs::path& path, const BistableNonlinearity& f, const Trajectory& tr) {
    auto os = io::open_output(path);
    io::CsvWriter w(os, {"s", "u", "p", "energy"});
    for (const auto& smp : tr.path.samples()) w.row({smp.t, smp.y[0], smp.y[1], energy(f, {smp.y[0], smp.y[1]})});
}

json equilibrium_entry(const BistableNonlinearity& f, double u, double c) {
    json e{{"u", u}, {"p", 0.0}, {"df", f.df(u)}};
    try {
        const EigenData ed = linearize(f, u, c);
        e["eigenvalues"] = {ed.lam_plus, ed.lam_minus};
        e["type"] = ed.lam_plus > 0.0 && ed.lam_minus < 0.0 ? "saddle" : "node";
    } catch (const WaveError&) {
        const double disc = 4.0 * f.df(u) - c * c;
        e["eigenvalues"] = {{{"re", -0.5 * c}, {"im", 0.5 * std::sqrt(disc)}}, {{"re", -0.5 * c}, {"im", -0.5 * std::sqrt(disc)}}};
        e["type"] = c > 0.0 ? "spiral sink" : "center";
    }
    return e;
}

int cmd_phase_portrait(const Run& r) {
    const auto f = r.cfg.nonlinearity();
    const double c = r.cfg.c;
    const Trajectory g0 = unstable_manifold(f, c);
    const Trajectory g1 = stable_manifold(f, c, 0.5 * f.eta_under);
    write_trajectory(r.out / "gamma0.csv", f, g0);
    write_trajectory(r.out / "gamma1.csv", f, g1);

    // Boundary of {E <= 0}: p = ±sqrt(-2F(u)) while F(u) <= 0.
    {
        auto os = io::open_output(r.out / "invariant_region.csv");
        io::CsvWriter w(os, {"u", "p_upper", "p_lower"});
        const std::size_t n = 2001;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = static_cast<double>(i) / static_cast<double>(n - 1);
            const double F = f.F(u);
            if (F > 0.0) break;
            const double p = std::sqrt(-2.0 * F);
            w.row({u, p, -p});
        }
    }

    const auto cls = classify_eta(f, c);
    const auto ext = gamma0_extrema(f, g0);
    const auto end = g0.at(g0.s_back());
    json doc{{"c", c},
             {"eta", f.eta},
             {"eta_under", f.eta_under},
             {"spiral_threshold", spiral_threshold(f)},
             {"eta_kind", cls.kind == EtaKind::SpiralSink ? "spiral sink" : "stable node"},
             {"equilibria", {equilibrium_entry(f, 0.0, c), equilibrium_entry(f, f.eta, c), equilibrium_entry(f, 1.0, c)}},
             {"gamma0", {{"max_u", ext.gamma0_max},
                         {"max_p", ext.gamma0_prime_max},
                         {"s_star", ext.s_star},
                         {"end", {end.u, end.p}},
                         {"end_distance_to_eta", std::hypot(end.u - f.eta, end.p)}}}};
    io::write_json(r.out / "equilibria.json", doc);
    r.say("phase portrait: gamma0 ends at (" + std::to_string(end.u) + ", " + std::to_string(end.p) + ")");
    return 0;
}

json validity_json(const ValidityReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", io::finite_or_null(c.value)}});
    return {{"checks", checks}, {"all_passed", rep.all_passed()}};
}

void write_density(const fs::path& path, const FishermanDensity& d) {
    auto os = io::open_output(path);
    io::CsvWriter w(os, {"s", "m"});
    for (std::size_t i = 0; i < d.s.size(); ++i) w.row({d.s[i], d.m[i]});
}

int cmd_build_wave(const Run& r) {
    const auto& cfg = r.cfg;
    const auto f = cfg.nonlinearity();
    const auto L = cfg.lagrangian();
    if (cfg.periodic) {
        const BuiltPeriodic bp = construct_periodic(f, L, cfg.lambda, cfg.c);
        const double P = bp.wave.period;
        SampledWave sw = sample(bp.wave, bp.density, 0.0, P, 4001);
        sw.k = 1;
        {
            auto os = io::open_output(r.out / "wave.csv");
            sw.write_csv(os);
        }
        write_density(r.out / "density.csv", bp.density);
        double drift = 0.0;
        for (std::size_t i = 0; i <= 4000; ++i) {
            const double s = 2.0 * P * static_cast<double>(i) / 4000.0;
            drift = std::max(drift, std::abs(bp.wave.theta(s + P) - bp.wave.theta(s)));
        }
        json doc = validity_json(validity_report(sw, bp.density, L));
        doc["period"] = P;
        doc["bridge_length"] = bp.wave.bridge.s1;
        doc["periodicity_residual"] = std::max(drift, bp.wave.junction_jump());
        io::write_json(r.out / "validity_report.json", doc);
        r.say("periodic wave: period " + std::to_string(P));
        return 0;
    }
    const BuiltWave bw = construct_wave(f, L, cfg.lambda, cfg.c, cfg.k);
    const auto& w = bw.wave;
    const double s_lo = w.left.s_front() - w.left_anchor;
    const double s_hi = w.s1() + (w.right.s_back() - w.right_anchor);
    {
        auto os = io::open_output(r.out / "wave.csv");
        sample(w, bw.density, s_lo, s_hi, 20001).write_csv(os);
    }
    write_density(r.out / "density.csv", bw.density);
    const auto rep = validity_report(w, bw.density, L);
    const double h = 1e-2;
    const auto res = ode_residual(f, w, bw.density, s_lo, s_hi, h);
    json doc = validity_json(rep);
    doc["s1"] = w.s1();
    doc["mass"] = bw.density.mass;
    doc["theta0"] = w.theta(0.0);
    doc["ode_residual"] = {{"max", res.max_residual}, {"scale", res.scale}, {"h", h}};
    io::write_json(r.out / "validity_report.json", doc);
    r.say("wave: s1 = " + std::to_string(w.s1()) + (rep.all_passed() ? ", all checks passed" : ", some checks FAILED"));
    return rep.all_passed() ? 0 : 1;
}

int cmd_speed_maps(const Run& r) {
    const auto f = r.cfg.nonlinearity();
    const auto L = r.cfg.lagrangian();
    const SpeedMaps maps = speed_maps(f, L, r.cfg.speed_maps.lambdas, r.cfg.speed_maps.k_max);
    {
        auto os = io::open_output(r.out / "speedmaps.csv");
        maps.write_csv(os);
    }
    io::write_json(r.out / "c_max.json",
                   {{"c_max", io::finite_or_null(maps.c_max)}, {"spiral_threshold", spiral_threshold(f)}});
    r.say("speed maps: " + std::to_string(maps.lambdas.size()) + " rows, c_max = " + std::to_string(maps.c_max));
    return 0;
}

int cmd_verify(const Run& r) {
    const auto& cfg = r.cfg;
    const auto f = cfg.nonlinearity();
    const auto L = cfg.lagrangian();
    const BuiltWave bw = construct_wave(f, L, cfg.lambda, cfg.c, cfg.k);
    const Verification v = verify_equilibrium(f, bw.wave, bw.density, CostModel{L, cfg.lambda, cfg.c});
    io::write_json(r.out / "equilibrium_report.json", v.report.to_json());
    {
        auto os = io::open_output(r.out / "value.csv");
        v.value.write_csv(os);
    }
    r.say(std::string("equilibrium ") + (v.report.certified ? "certified" : "NOT certified"));
    return 0;
}

void write_snapshots(const fs::path& path, const SimRun& run, const Grid1D& g, std::size_t stride) {
    auto os = io::open_output(path);
    io::CsvWriter w(os, {"t", "x", "theta", "m"});
    for (const auto& snap : run.snapshots)
        for (std::size_t i = 0; i < g.n; i += stride) w.row({snap.t, g.x(i), snap.theta[i], snap.m[i]});
}

json write_run(const Run& r, const std::string& tag, const SimRun& run, const Grid1D& g, bool with_shape) {
    write_snapshots(r.out / ("snapshots_" + tag + ".csv"), run, g, r.cfg.simulate.node_stride);
    {
        auto os = io::open_output(r.out / ("front_" + tag + ".csv"));
        io::CsvWriter w(os, {"t", "front_x"});
        for (std::size_t i = 0; i < run.trace.times.size(); ++i) w.row({run.trace.times[i], run.trace.positions[i]});
    }
    json j{{"fitted_speed", run.trace.fitted_speed}, {"fit_residual", run.trace.fit_residual}, {"clip_mass", run.clip_mass}};
    j["shape_error"] = with_shape ? json(run.shape_error) : json(nullptr);
    return j;
}

int cmd_simulate(const Run& r) {
    const auto& cfg = r.cfg;
    const auto f = cfg.nonlinearity();
    const auto& sc = cfg.simulate;
    SimOptions so;
    so.level = sc.level;
    so.record_every = sc.record_every;
    so.snapshot_every = sc.snapshot_every > 0.0
                            ? static_cast<std::size_t>(std::max(1.0, std::round(sc.snapshot_every / sc.record_every)))
                            : 0;
    json doc;
    if (sc.mode == "baseline" || sc.mode == "both") {
        const double T = cfg.T > 0.0 ? cfg.T : 60.0;
        const Grid1D g = Grid1D::uniform(cfg.grid.x_lo, cfg.grid.x_hi, cfg.grid.dx, cfg.grid.dt, cfg.grid.implicit);
        const SimRun run = simulate_baseline(f, g, T, 0.5 * (g.x_lo + g.x_hi), so);
        doc["baseline"] = write_run(r, "baseline", run, g, false);
        doc["baseline"]["closed_form_speed"] = cubic_front_speed(f.eta);
        r.say("baseline speed " + std::to_string(run.trace.fitted_speed));
    }
    if (sc.mode == "reversed" || sc.mode == "both") {
        const auto L = cfg.lagrangian();
        const BuiltWave bw = construct_wave(f, L, cfg.lambda, cfg.c, cfg.k);
        const double T = cfg.T > 0.0 ? cfg.T : 20.0 / cfg.c;
        // Window follows the drift: c·T to the right, the m ≡ 0 front moves left.
        const Grid1D g = Grid1D::uniform(cfg.grid.x_lo, cfg.grid.x_hi + cfg.c * T, cfg.grid.dx, cfg.grid.dt,
                                         cfg.grid.implicit);
        try {
            const SimRun run = simulate_reversed(f, bw.wave, bw.density, g, T, true, so);
            doc["reversed"] = write_run(r, "reversed", run, g, true);
            doc["reversed"]["c"] = cfg.c;
            r.say("reversed speed " + std::to_string(run.trace.fitted_speed) + ", shape error " +
                  std::to_string(run.shape_error));
        } catch (const WaveError& e) {
            if (e.code() != ErrorCode::FrontLeftDomain) throw;
            doc["reversed"] = {{"error", e.what()}};
            io::write_json(r.out / "front.json", doc);
            throw;
        }
        if (sc.contrast) {
            const double drift = std::abs(cubic_front_speed(f.eta)) * T;
            const Grid1D gc = Grid1D::uniform(cfg.grid.x_lo - drift, cfg.grid.x_hi, cfg.grid.dx, cfg.grid.dt,
                                              cfg.grid.implicit);
            const SimRun run = simulate_reversed(f, bw.wave, bw.density, gc, T, false, so);
            doc["contrast"] = write_run(r, "contrast", run, gc, false);
            doc["contrast"]["closed_form_speed"] = cubic_front_speed(f.eta);
            r.say("contrast speed " + std::to_string(run.trace.fitted_speed));
        }
    }
    io::write_json(r.out / "front.json", doc);
    return 0;
}

int cmd_cooperate(const Run& r) {
    const auto& cc = r.cfg.cooperate;
    const auto f = r.cfg.nonlinearity();
    const double lambda0 = cc.lambda0 ? *cc.lambda0 : certified_lambda0(f, cc.c, cc.lambda0_candidates);
    const BuiltWave bw = construct_wave(f, harvest_power_family(f.eta_under, 1.0), lambda0, cc.c, 0);
    CoopOptions opts;
    opts.dx = cc.dx;
    opts.dt = cc.dt;
    opts.delta = cc.delta;
    opts.samples = cc.samples;
    opts.csv_every = cc.csv_every;
    opts.csv_node_stride = cc.csv_node_stride;
    const CoopReport rep = compare_payoffs(f, bw, lambda0, lambda0 / cc.q, opts);
    io::write_json(r.out / "cooperation.json", rep.to_json());
    {
        auto os = io::open_output(r.out / "cooperation_space_time.csv");
        rep.write_space_time_csv(os);
    }
    r.say("cooperation: lambda0 = " + std::to_string(lambda0) + ", positive gaps " +
          std::to_string(rep.positive_fraction) + (rep.certified ? ", certified" : ""));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reversed travelling waves of a harvesting mean-field game"};
    app.require_subcommand(1, 1);
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    const char* names[] = {"phase-portrait", "build-wave", "speed-maps", "verify", "simulate", "cooperate"};
    const char* blurbs[] = {"manifolds, invariant region and equilibria", "reversed wave and its validity checks",
                            "c_k(lambda) table and c_max", "HJB check of the constant control",
                            "front simulations", "coordinated strategy vs the equilibrium"};
    for (std::size_t i = 0; i < 6; ++i) {
        auto* sub = app.add_subcommand(names[i], blurbs[i]);
        sub->add_option("--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
        sub->add_flag("--quiet", quiet, "no progress output");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        Run r;
        r.cfg = load_config(config_path);
        if (!out_dir.empty()) r.cfg.output = out_dir;
        r.out = r.cfg.output;
        r.quiet = quiet;
        r.cfg.nonlinearity();
        fs::create_directories(r.out);
        io::write_json(r.out / "resolved_config.json", r.cfg.to_json());
        if (cmd == "phase-portrait") return cmd_phase_portrait(r);
        if (cmd == "build-wave") return cmd_build_wave(r);
        if (cmd == "speed-maps") return cmd_speed_maps(r);
        if (cmd == "verify") return cmd_verify(r);
        if (cmd == "simulate") return cmd_simulate(r);
        return cmd_cooperate(r);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const WaveError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
