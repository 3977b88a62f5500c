// rhps-sim: command-line front end for sweeps, spectra, coupled modes and
// Green's-function probes. Tables go to stdout unless --out is given.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rhps/errors.hpp"
#include "rhps/greens.hpp"
#include "rhps/sweeps.hpp"

using namespace rhps;

namespace {

struct StackArgs {
    double d = 200;
    double outside_eps = 1.0;
    bool dbr = false;
    int periods_left = 4;
    int periods_right = 16;

    void add(CLI::App* app) {
        app->add_option("--d", d, "excitonic layer thickness [nm]")->capture_default_str();
        app->add_option("--outside-eps", outside_eps, "permittivity of both end media (film)")->capture_default_str();
        app->add_flag("--dbr", dbr, "embed the layer in PbF2/PbBr2 mirrors");
        app->add_option("--periods-left", periods_left, "mirror periods on the pump side")->capture_default_str();
        app->add_option("--periods-right", periods_right, "mirror periods on the far side")->capture_default_str();
    }
    StackTemplate to_template() const {
        StackTemplate t;
        t.kind = dbr ? StackKind::DbrCavity : StackKind::Film;
        t.d = d;
        t.outside_eps = outside_eps;
        t.periods_left = periods_left;
        t.periods_right = periods_right;
        return t;
    }
};

struct SpectrumArgs {
    StackArgs stack;
    double theta = 0;
    double from = -42, to = -4;
    int points = 381;
    std::string pump = "bulk";
    std::optional<double> gamma;
    double e_cut = 150;
    double dw = 0.01;
    double amplitude = 1.0;
    bool no_convergence = false;
    unsigned threads = 0;
    std::string side = "right";
    std::string out;

    void add(CLI::App* app) {
        stack.add(app);
        app->add_option("--theta", theta, "scattering angle [deg]")->capture_default_str();
        app->add_option("--from", from, "lowest w - w_T [meV]")->capture_default_str();
        app->add_option("--to", to, "highest w - w_T [meV]")->capture_default_str();
        app->add_option("--points", points, "grid points")->capture_default_str();
        app->add_option("--pump", pump, "'bulk', a biexciton index n, or 'fixed:<w_in - w_T>'")->capture_default_str();
        app->add_option("--gamma", gamma, "exciton nonradiative width [meV]");
        app->add_option("--e-cut", e_cut, "kinetic cutoff [meV]")->capture_default_str();
        app->add_option("--dw", dw, "detector bandwidth [meV]")->capture_default_str();
        app->add_option("--amplitude", amplitude, "pump field amplitude (I_in = amplitude^2)")->capture_default_str();
        app->add_flag("--no-convergence", no_convergence, "skip the cutoff doubling check");
        app->add_option("--threads", threads, "worker threads (0: all cores)");
        app->add_option("--side", side, "observation side: left|backward|right|forward")->capture_default_str();
        app->add_option("--out", out, "CSV file");
    }

    SweepSpec base() const {
        SweepSpec s;
        s.label = "cli";
        s.grid = linear_grid(from, to, points);
        s.stack = stack.to_template();
        s.theta = theta;
        s.gamma = gamma;
        s.e_cut = e_cut;
        s.dw = dw;
        s.pump.amplitude = amplitude;
        s.convergence.enabled = !no_convergence;
        s.threads = threads;
        if (pump.rfind("fixed:", 0) == 0) {
            s.pump.mode = PumpMode::Fixed;
            s.pump.offset = std::stod(pump.substr(6));
        } else if (pump != "bulk") {
            s.pump.mode = PumpMode::Target;
            s.pump.target_n = std::stoi(pump);
        }
        return s;
    }
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

void emit_csv(const SweepResult& r, const std::string& path) {
    if (path.empty()) {
        write_csv(r, std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) throw ConfigurationError("cannot open " + path);
    write_csv(r, os);
}

// Opens path for writing; empty path selects stdout.
std::ostream& output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ConfigurationError("cannot open " + path);
    return file;
}

std::vector<SweepSpec> load_specs(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigurationError("cannot open " + path);
    nlohmann::json j = nlohmann::json::parse(is);
    std::vector<SweepSpec> specs;
    const nlohmann::json& list = j.is_array() ? j : (j.contains("sweeps") ? j.at("sweeps") : j);
    if (list.is_array()) {
        for (const auto& e : list) specs.push_back(e.get<SweepSpec>());
    } else {
        specs.push_back(list.get<SweepSpec>());
    }
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].label.empty()) specs[i].label = "sweep" + std::to_string(i);
    return specs;
}

int run_sweep_command(const std::string& config, std::optional<int> scenario, const std::string& out,
                      std::optional<unsigned> threads, int points, std::optional<double> e_cut) {
    std::vector<SweepSpec> specs;
    std::string label = "sweep";
    if (scenario) {
        ScenarioOptions o;
        o.points = points;
        o.e_cut = e_cut;
        specs = scenario_specs(*scenario, o);
        label = "scenario" + std::to_string(*scenario);
    } else {
        specs = load_specs(config);
        label = std::filesystem::path(config).stem().string();
    }
    if (threads)
        for (auto& s : specs) s.threads = *threads;

    std::vector<SweepResult> parts;
    for (const auto& s : specs) {
        std::cerr << "running " << s.label << " (" << s.grid.size() << " points)\n";
        parts.push_back(s.variable == SweepVariable::Thickness ? thickness_sweep(s) : run_sweep(s));
    }
    SweepResult r = merge_results(label, parts);

    std::filesystem::create_directories(out);
    const auto csv = std::filesystem::path(out) / (label + ".csv");
    const auto manifest = std::filesystem::path(out) / (label + ".manifest.jsonl");
    {
        std::ofstream os(csv);
        write_csv(r, os);
    }
    {
        std::ofstream os(manifest);
        write_manifest(r, specs, os);
    }
    std::cerr << "wrote " << csv.string() << " and " << manifest.string() << "\n";
    for (const auto& c : r.convergence)
        if (c.checked && !c.passed)
            std::cerr << "warning: " << c.sweep << " not converged at e_cut " << c.e_cut << " meV (shift "
                      << c.max_shift << ")\n";
    return 0;
}

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonant hyperparametric scattering simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", version_string);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "run sweeps from a JSON config or a preset scenario");
    std::string config, out_dir = "results";
    std::optional<int> scenario;
    std::optional<unsigned> sweep_threads;
    int sweep_points = 0;
    std::optional<double> sweep_e_cut;
    auto* cfg_opt = sweep->add_option("--config", config, "sweep configuration (JSON)");
    auto* scn_opt = sweep->add_option("--scenario", scenario, "preset id: 3 4 5 6 7 8 9 10");
    cfg_opt->excludes(scn_opt);
    sweep->add_option("--out", out_dir, "output directory")->capture_default_str();
    sweep->add_option("--threads", sweep_threads, "worker threads (0: all cores)");
    sweep->add_option("--points", sweep_points, "override the preset grid size");
    sweep->add_option("--e-cut", sweep_e_cut, "override the preset starting cutoff [meV]");

    // spectrum
    auto* spectrum = app.add_subcommand("spectrum", "one-photon scattering spectrum");
    SpectrumArgs sp;
    sp.add(spectrum);
    std::string sp_bases = "H,V";
    spectrum->add_option("--basis", sp_bases, "comma list of H,V,L,R,sum")->capture_default_str();

    // coincidence
    auto* coincidence = app.add_subcommand("coincidence", "two-photon coincidence signal, noise, performance");
    SpectrumArgs co;
    co.from = -16;
    co.to = -2;
    co.points = 141;
    co.add(coincidence);
    std::string co_pairs = "HH,VV", co_obs = "signal", co_side2;
    double co_alpha = 1.0;
    coincidence->add_option("--pairs", co_pairs, "comma list of detector pairs, e.g. HH,VV,LR")->capture_default_str();
    coincidence->add_option("--observables", co_obs, "comma list of signal,noise,performance")
        ->capture_default_str();
    coincidence->add_option("--side2", co_side2, "side of photon 2 (default: --side)");
    coincidence->add_option("--alpha", co_alpha, "target S/N ratio for the performance")->capture_default_str();

    // modes
    auto* modes = app.add_subcommand("modes", "exciton-photon coupled modes");
    StackArgs md;
    md.add(modes);
    std::string md_sector = "V,H", md_theta = "0";
    double md_from = -10, md_to = 15, md_e_cut = 20;
    std::optional<double> md_gamma;
    modes->add_option("--sector", md_sector, "comma list of V,H")->capture_default_str();
    modes->add_option("--theta", md_theta, "comma list of angles [deg]")->capture_default_str();
    modes->add_option("--from", md_from, "window low edge, Re w - w_T [meV]")->capture_default_str();
    modes->add_option("--to", md_to, "window high edge, Re w - w_T [meV]")->capture_default_str();
    modes->add_option("--e-cut", md_e_cut, "kinetic cutoff [meV]")->capture_default_str();
    modes->add_option("--gamma", md_gamma, "exciton nonradiative width [meV]");
    std::string md_out;
    modes->add_option("--out", md_out, "CSV file");

    // greens-probe
    auto* probe = app.add_subcommand("greens-probe", "dump the dyadic Green's function g(z, z')");
    StackArgs gp;
    gp.add(probe);
    double gp_omega = -16, gp_theta = 0, gp_zp = -1, gp_from = -50, gp_to = -1;
    int gp_points = 201;
    probe->add_option("--omega", gp_omega, "w - w_T [meV]")->capture_default_str();
    probe->add_option("--theta", gp_theta, "angle defining k_par [deg]")->capture_default_str();
    probe->add_option("--zp", gp_zp, "source position [nm] (default: d/2)");
    probe->add_option("--z-from", gp_from, "first z [nm] (default: -50, or 0 with --dbr)");
    probe->add_option("--z-to", gp_to, "last z [nm] (default: d + 50, or d with --dbr)");
    probe->add_option("--points", gp_points, "z samples")->capture_default_str();
    std::string gp_out;
    probe->add_option("--out", gp_out, "CSV file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            if (config.empty() && !scenario) throw CLI::RequiredError("--config or --scenario");
            return run_sweep_command(config, scenario, out_dir, sweep_threads, sweep_points, sweep_e_cut);
        }

        if (*spectrum) {
            SweepSpec s = sp.base();
            s.label = "spectrum";
            const Side side = side_from_string(sp.side);
            for (const auto& b : split(sp_bases)) {
                Measurement m;
                m.kind = ObservableKind::Intensity;
                m.side1 = side;
                if (b == "sum")
                    m.basis1.reset();
                else
                    m.basis1 = detector_from_string(b);
                s.measurements.push_back(m);
            }
            emit_csv(run_sweep(s), sp.out);
            return 0;
        }

        if (*coincidence) {
            SweepSpec s = co.base();
            s.label = "coincidence";
            s.alpha = co_alpha;
            const Side side1 = side_from_string(co.side);
            const Side side2 = co_side2.empty() ? side1 : side_from_string(co_side2);
            for (const auto& o : split(co_obs))
                for (const auto& p : split(co_pairs)) {
                    if (p.size() != 2) throw ConfigurationError("detector pair must have two letters: " + p);
                    Measurement m;
                    m.kind = o == "signal"        ? ObservableKind::Signal
                             : o == "noise"       ? ObservableKind::Noise
                             : o == "performance" ? ObservableKind::Performance
                                                  : throw ConfigurationError("unknown observable " + o);
                    m.side1 = side1;
                    m.side2 = side2;
                    m.basis1 = detector_from_string(p.substr(0, 1));
                    m.basis2 = detector_from_string(p.substr(1, 1));
                    s.measurements.push_back(m);
                }
            emit_csv(run_sweep(s), co.out);
            return 0;
        }

        if (*modes) {
            MaterialParams p = cucl_defaults();
            if (md_gamma) p.exciton.gamma = *md_gamma;
            const ExcitonParams& ex = p.exciton;
            LayerStack stack = md.to_template().build(md.d, p);
            std::ofstream file;
            std::ostream& os = output(md_out, file);
            os << "k_par_per_nm,theta_deg,sector,re_omega_minus_wT_meV,width_meV,dominant_m\n";
            for (const auto& t : split(md_theta)) {
                const double theta = std::stod(t);
                const double k = units::in_plane_wavenumber(ex.omega_T, theta * units::pi / 180);
                ExcitonBasis basis = truncate_basis(ex, md.d, k, md_e_cut);
                for (const auto& sec : split(md_sector)) {
                    const Sector sector = sec == "V" ? Sector::V : sec == "H" ? Sector::H
                                                                 : throw ConfigurationError("unknown sector " + sec);
                    ModeSearch search;
                    search.omega_min = ex.omega_T + md_from;
                    search.omega_max = ex.omega_T + md_to;
                    for (const auto& m : find_coupled_modes(stack, basis, ex, sector, search))
                        os << format(k) << ',' << format(theta) << ',' << sec << ','
                                  << format(m.resonance() - ex.omega_T) << ',' << format(m.width()) << ','
                                  << m.dominant_m << '\n';
                }
            }
            return 0;
        }

        if (*probe) {
            MaterialParams p = cucl_defaults();
            const ExcitonParams& ex = p.exciton;
            LayerStack stack = gp.to_template().build(gp.d, p);
            const double k = units::in_plane_wavenumber(ex.omega_T, gp_theta * units::pi / 180);
            LayeredGreens g(stack, ex.omega_T + gp_omega, k);
            const double zp = gp_zp < 0 ? 0.5 * gp.d : gp_zp;
            const double pad = gp.dbr ? 0.0 : 50.0;
            const double z0 = probe->count("--z-from") ? gp_from : -pad;
            const double z1 = probe->count("--z-to") ? gp_to : gp.d + pad;
            static const char* names[3] = {"x", "y", "z"};
            std::ofstream file;
            std::ostream& os = output(gp_out, file);
            os << "z_nm,zp_nm,component,re,im\n";
            for (double z : linear_grid(z0, z1, gp_points)) {
                const GreensEval e = g.dyadic(z, zp);
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) {
                        const cplx v = e.regular(a, b);
                        if (v == cplx(0.0)) continue;
                        os << format(z) << ',' << format(zp) << ',' << names[a] << names[b] << ','
                                  << format(v.real()) << ',' << format(v.imag()) << '\n';
                    }
            }
            return 0;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
