#include "rhps/sweeps.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "rhps/errors.hpp"

namespace rhps {

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

template <class E>
struct EnumName {
    E value;
    const char* name;
};

constexpr EnumName<SweepVariable> variable_names[] = {
    {SweepVariable::Omega, "omega"}, {SweepVariable::Theta, "theta"}, {SweepVariable::Thickness, "thickness"}};
constexpr EnumName<StackKind> stack_names[] = {{StackKind::Film, "film"}, {StackKind::DbrCavity, "dbr"}};
constexpr EnumName<PumpMode> pump_names[] = {
    {PumpMode::Bulk, "bulk"}, {PumpMode::Target, "target"}, {PumpMode::Fixed, "fixed"}};
constexpr EnumName<ObservableKind> observable_names[] = {{ObservableKind::Intensity, "intensity"},
                                                         {ObservableKind::Signal, "signal"},
                                                         {ObservableKind::Noise, "noise"},
                                                         {ObservableKind::Performance, "performance"}};

template <class E, std::size_t N>
std::string name_of(const EnumName<E> (&table)[N], E v) {
    for (const auto& e : table)
        if (e.value == v) return e.name;
    return "?";
}

template <class E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], const std::string& s, const char* what) {
    for (const auto& e : table)
        if (s == e.name) return e.value;
    throw ConfigurationError(std::string("unknown ") + what + ": " + s);
}

template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, n));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(t);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next++) < n;) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = n;
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double theta_to_k(const MaterialParams& p, double theta_deg) {
    return units::in_plane_wavenumber(p.exciton.omega_T, theta_deg * units::pi / 180.0);
}

ModelOptions model_options(const SweepSpec& s, double e_cut, double scale) {
    ModelOptions o;
    o.e_cut = e_cut;
    o.e_cut_biexciton = s.e_cut_biexciton * scale;
    return o;
}

double resolve_pump(const LayerStack& stack, const MaterialParams& p, const SweepSpec& s,
                    const ModelOptions& o) {
    if (s.pump.mode == PumpMode::Fixed) return p.exciton.omega_T + s.pump.offset;
    PumpSpec ps{0.0, 0.0, Polarization::H, s.pump.amplitude};
    PumpTuning t;
    t.window = s.pump.window;
    if (s.pump.mode == PumpMode::Target) t.target_n = s.pump.target_n;
    return tune_pump(stack, p, ps, o, t);
}

RhpsModel make_model(const SweepSpec& s, double d, const ModelOptions& o) {
    const MaterialParams p = s.effective_params();
    LayerStack stack = s.stack.build(d, p);
    PumpSpec ps{resolve_pump(stack, p, s, o), 0.0, Polarization::H, s.pump.amplitude};
    return RhpsModel(std::move(stack), p, ps, o);
}

// Observables at one (w, theta) with tensors shared across detector bases.
std::vector<double> measure(const RhpsModel& m, double omega, double theta_deg, const SweepSpec& s) {
    const double k1 = theta_to_k(m.params(), theta_deg);
    const double omega2 = 2.0 * m.pump().omega - omega, k2 = 2.0 * m.pump().k_par - k1;
    std::map<std::pair<int, int>, Eigen::Matrix3cd> singles, pairs;

    auto singles_at = [&](Side side, int photon) -> const Eigen::Matrix3cd& {
        auto key = std::make_pair(static_cast<int>(side), photon);
        auto it = singles.find(key);
        if (it == singles.end())
            it = singles
                     .emplace(key, photon == 1 ? m.singles_tensor(omega, k1, side)
                                               : m.singles_tensor(omega2, k2, side))
                     .first;
        return it->second;
    };
    auto pair_at = [&](Side a, Side b) -> const Eigen::Matrix3cd& {
        auto key = std::make_pair(static_cast<int>(a), static_cast<int>(b));
        auto it = pairs.find(key);
        if (it == pairs.end()) it = pairs.emplace(key, m.pair_amplitude(omega, k1, a, b)).first;
        return it->second;
    };
    auto intensity = [&](Side side, DetectorBasis b, int photon) {
        const double w = photon == 1 ? omega : omega2, k = photon == 1 ? k1 : k2;
        return s.dw * project_intensity(singles_at(side, photon), detector_vector(m.stack(), w, k, side, b));
    };
    auto signal = [&](const Measurement& q) {
        auto e1 = detector_vector(m.stack(), omega, k1, q.side1, *q.basis1);
        auto e2 = detector_vector(m.stack(), omega2, k2, q.side2, q.basis2);
        return s.dw * s.dw * std::norm(project_pair(pair_at(q.side1, q.side2), e1, e2));
    };
    auto noise = [&](const Measurement& q) {
        return intensity(q.side1, *q.basis1, 1) * intensity(q.side2, q.basis2, 2);
    };

    std::vector<double> out;
    out.reserve(s.measurements.size());
    for (const auto& q : s.measurements) {
        double v = nan_value;
        try {
            switch (q.kind) {
            case ObservableKind::Intensity:
                v = q.basis1 ? intensity(q.side1, *q.basis1, 1)
                             : intensity(q.side1, DetectorBasis::H, 1) + intensity(q.side1, DetectorBasis::V, 1);
                break;
            case ObservableKind::Signal: v = signal(q); break;
            case ObservableKind::Noise: v = noise(q); break;
            case ObservableKind::Performance: v = performance(signal(q), noise(q), s.alpha); break;
            }
        } catch (const NoFarFieldError&) {
        } catch (const UndefinedPerformanceError&) {
        }
        out.push_back(v);
    }
    return out;
}

struct Point {
    std::vector<double> values;
    double omega_in = 0;  // absolute
    double d = 0;
    double theta = 0;
};

// Points `idx` of the grid at one cutoff.
std::vector<Point> evaluate(const SweepSpec& s, double e_cut, double scale, const std::vector<std::size_t>& idx) {
    const ModelOptions o = model_options(s, e_cut, scale);
    const double wT = s.effective_params().exciton.omega_T;
    std::vector<Point> out(idx.size());

    std::optional<RhpsModel> shared;
    if (s.variable != SweepVariable::Thickness) shared.emplace(make_model(s, s.stack.d, o));

    parallel_for(idx.size(), s.threads, [&](std::size_t i) {
        const double x = s.grid[idx[i]];
        Point& pt = out[i];
        if (s.variable == SweepVariable::Thickness) {
            RhpsModel m = make_model(s, x, o);
            const double w = s.omega ? wT + *s.omega : m.pump().omega;
            pt = {measure(m, w, s.theta, s), m.pump().omega, x, s.theta};
            return;
        }
        const RhpsModel& m = *shared;
        const double theta = s.variable == SweepVariable::Theta ? x : s.theta;
        const double w = s.variable == SweepVariable::Omega ? wT + x : (s.omega ? wT + *s.omega : m.pump().omega);
        pt = {measure(m, w, theta, s), m.pump().omega, s.stack.d, theta};
    });
    return out;
}

double relative_shift(double a, double b, double scale) {
    if (std::isnan(a) && std::isnan(b)) return 0.0;
    if (!std::isfinite(a) || !std::isfinite(b)) return std::numeric_limits<double>::infinity();
    if (scale == 0) return a == b ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(b - a) / scale;
}

double peak_scale(const std::vector<double>& v) {
    double m = 0;
    for (double x : v)
        if (std::isfinite(x)) m = std::max(m, std::abs(x));
    return m;
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = i;
    return v;
}

struct Evaluated {
    std::vector<Point> points;
    std::vector<double> e_cut;  // per point
    std::vector<ConvergenceReport> reports;
};

Evaluated evaluate_sweep_converged(const SweepSpec& s) {
    const auto& c = s.convergence;
    const std::size_t n = s.grid.size(), nm = s.measurements.size();
    Evaluated r;

    if (!c.enabled) {
        r.points = evaluate(s, s.e_cut, 1.0, all_indices(n));
        r.e_cut.assign(n, s.e_cut);
        ConvergenceReport rep;
        rep.sweep = s.label;
        rep.e_cut = s.e_cut;
        r.reports.push_back(rep);
        return r;
    }

    if (s.variable == SweepVariable::Thickness) {
        r.points.resize(n);
        r.e_cut.resize(n);
        r.reports.resize(n);
        SweepSpec serial = s;
        serial.threads = 1;
        parallel_for(n, s.threads, [&](std::size_t i) {
            double e = s.e_cut, scale = 1.0;
            const double floor = s.effective_params().exciton.kinetic_coefficient() *
                                 std::pow(std::max(1, s.min_modes) * units::pi / s.grid[i], 2);
            while (e <= floor) {
                e *= 2;
                scale *= 2;
            }
            ConvergenceReport rep;
            rep.sweep = s.label;
            rep.x = s.grid[i];
            rep.checked = true;
            Point base = evaluate(serial, e, scale, {i}).front();
            for (int k = 0;; ++k) {
                Point fine = evaluate(serial, 2 * e, 2 * scale, {i}).front();
                double shift = 0;
                for (std::size_t j = 0; j < nm; ++j)
                    shift = std::max(shift, relative_shift(base.values[j], fine.values[j],
                                                           std::abs(base.values[j])));
                rep.e_cut = e;
                rep.e_cut_checked = 2 * e;
                rep.max_shift = shift;
                rep.doublings = k;
                rep.passed = shift < c.tolerance;
                if (rep.passed || k >= c.max_doublings) break;
                e *= 2;
                scale *= 2;
                base = std::move(fine);
            }
            r.points[i] = std::move(base);
            r.e_cut[i] = rep.e_cut;
            r.reports[i] = rep;
        });
        return r;
    }

    double e = s.e_cut, scale = 1.0;
    ConvergenceReport rep;
    rep.sweep = s.label;
    rep.checked = true;
    std::vector<Point> base = evaluate(s, e, scale, all_indices(n));
    for (int k = 0;; ++k) {
        std::set<std::size_t> picked;
        std::vector<double> peaks(nm);
        for (std::size_t j = 0; j < nm; ++j) {
            std::vector<double> col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = base[i].values[j];
            peaks[j] = peak_scale(col);
            std::size_t best = n;
            for (std::size_t i = 0; i < n; ++i)
                if (std::isfinite(col[i]) && (best == n || std::abs(col[i]) > std::abs(col[best]))) best = i;
            if (best == n) continue;
            for (std::size_t i = best ? best - 1 : 0; i <= std::min(n - 1, best + 1); ++i) picked.insert(i);
        }
        std::vector<std::size_t> idx(picked.begin(), picked.end());
        std::vector<Point> fine = evaluate(s, 2 * e, 2 * scale, idx);
        double shift = 0;
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t j = 0; j < nm; ++j)
                shift = std::max(shift, relative_shift(base[idx[a]].values[j], fine[a].values[j], peaks[j]));
        rep.e_cut = e;
        rep.e_cut_checked = 2 * e;
        rep.max_shift = shift;
        rep.doublings = k;
        rep.passed = shift < c.tolerance;
        if (rep.passed || k >= c.max_doublings) break;
        e *= 2;
        scale *= 2;
        base = evaluate(s, e, scale, all_indices(n));
    }
    r.points = std::move(base);
    r.e_cut.assign(n, rep.e_cut);
    r.reports.push_back(rep);
    return r;
}

void sort_rows(std::vector<SweepRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.x < b.x; });
}

std::string hex_digest(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < 8 && i < len; ++i) {
        out += digits[md[i] >> 4];
        out += digits[md[i] & 15];
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string basis_name(const std::optional<DetectorBasis>& b) { return b ? to_string(*b) : "sum"; }

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(SweepVariable v) { return name_of(variable_names, v); }

SweepVariable sweep_variable_from_string(const std::string& s) {
    return parse_enum(variable_names, s, "sweep variable");
}

LayerStack StackTemplate::build(double d_nm, const MaterialParams& p) const {
    if (kind == StackKind::Film) return LayerStack::film(d_nm, p.exciton.eps_bg, outside_eps);
    DbrOptions o;
    o.periods_left = periods_left;
    o.periods_right = periods_right;
    o.design_energy = p.exciton.omega_T;
    o.eps_bg = p.exciton.eps_bg;
    return build_dbr_cavity(d_nm, o);
}

std::string Measurement::name() const {
    switch (kind) {
    case ObservableKind::Intensity: return "I1";
    case ObservableKind::Signal: return "S";
    case ObservableKind::Noise: return "N";
    case ObservableKind::Performance: return "P";
    }
    return "?";
}

std::string Measurement::side_label() const {
    if (kind == ObservableKind::Intensity) return to_string(side1);
    return to_string(side1) + "/" + to_string(side2);
}

std::string Measurement::basis_label() const {
    if (kind == ObservableKind::Intensity) return basis1 ? to_string(*basis1) : "H+V";
    return to_string(*basis1) + to_string(basis2);
}

MaterialParams SweepSpec::effective_params() const {
    MaterialParams p = params;
    if (gamma) p.exciton.gamma = *gamma;
    return p;
}

void SweepSpec::validate() const {
    effective_params().validate();
    if (grid.size() < 2) throw ConfigurationError("sweep: grid needs at least two points");
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(up ? grid[i] > grid[i - 1] : grid[i] < grid[i - 1]))
            throw ConfigurationError("sweep: grid must be strictly monotone");
    if (variable == SweepVariable::Thickness && !(std::min(grid.front(), grid.back()) > 0))
        throw ConfigurationError("sweep: thicknesses must be positive");
    if (measurements.empty()) throw ConfigurationError("sweep: no measurements");
    for (const auto& m : measurements)
        if (m.kind != ObservableKind::Intensity && !m.basis1)
            throw ConfigurationError("sweep: pair observables need a detector basis for photon 1");
    if (!(dw > 0)) throw ConfigurationError("sweep: dw must be positive");
    if (!(alpha > 0)) throw ConfigurationError("sweep: alpha must be positive");
    if (!(e_cut > 0)) throw ConfigurationError("sweep: e_cut must be positive");
    if (e_cut_biexciton < 0) throw ConfigurationError("sweep: e_cut_biexciton must be non-negative");
    if (!(pump.amplitude > 0)) throw ConfigurationError("sweep: pump amplitude must be positive");
    if (convergence.max_doublings < 0 || !(convergence.tolerance > 0))
        throw ConfigurationError("sweep: bad convergence options");
    if (stack.kind == StackKind::DbrCavity && (stack.periods_left < 0 || stack.periods_right < 0))
        throw ConfigurationError("sweep: negative DBR period count");
}

std::vector<double> linear_grid(double min, double max, int count) {
    if (count < 2) throw ConfigurationError("grid: count must be at least 2");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = min + (max - min) * i / (count - 1);
    g.back() = max;
    return g;
}

std::vector<double> log_grid(double min, double max, int count) {
    if (!(min > 0) || !(max > 0)) throw ConfigurationError("grid: log grid needs positive bounds");
    std::vector<double> g = linear_grid(std::log(min), std::log(max), count);
    for (double& x : g) x = std::exp(x);
    g.front() = min;
    g.back() = max;
    return g;
}

std::vector<double> SweepResult::series(const std::string& observable, const std::string& basis,
                                        std::optional<double> theta, std::optional<double> d) const {
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.observable == observable && (basis.empty() || r.basis == basis) && (!theta || r.theta == *theta) &&
            (!d || r.d == *d))
            v.push_back(r.value);
    return v;
}

std::vector<double> SweepResult::abscissa(const std::string& observable, const std::string& basis,
                                          std::optional<double> theta, std::optional<double> d) const {
    std::vector<double> v;
    for (const auto& r : rows)
        if (r.observable == observable && (basis.empty() || r.basis == basis) && (!theta || r.theta == *theta) &&
            (!d || r.d == *d))
            v.push_back(r.x);
    return v;
}

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const double wT = spec.effective_params().exciton.omega_T;
    Evaluated ev = evaluate_sweep_converged(spec);

    SweepResult r;
    r.label = spec.label;
    r.variable = spec.variable;
    r.fingerprint = config_fingerprint(spec);
    r.convergence = ev.reports;
    r.i_in = spec.pump.amplitude * spec.pump.amplitude;
    r.dw = spec.dw;
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
        const Point& pt = ev.points[i];
        for (std::size_t j = 0; j < spec.measurements.size(); ++j) {
            const Measurement& m = spec.measurements[j];
            r.rows.push_back({spec.grid[i], m.name(), m.side_label(), m.basis_label(), pt.theta, pt.d,
                              pt.omega_in - wT, pt.values[j], ev.e_cut[i]});
        }
    }
    sort_rows(r.rows);
    return r;
}

SweepResult thickness_sweep(const SweepSpec& spec) {
    if (spec.variable != SweepVariable::Thickness)
        throw ConfigurationError("thickness_sweep: the swept variable must be the thickness");
    SweepSpec s = spec;
    if (s.measurements.empty()) {
        Measurement sig;
        sig.kind = ObservableKind::Signal;
        Measurement perf = sig;
        perf.kind = ObservableKind::Performance;
        s.measurements = {sig, perf};
    }
    SweepResult r = run_sweep(s);
    for (auto& row : r.rows)
        if (row.observable == "S") {
            row.observable = "S/I_in^2";
            row.value /= r.i_in * r.i_in;
        }
    if (!s.normalize_performance) return r;

    SweepResult ideal;
    if (s.effective_params().exciton.gamma == 0.0) {
        ideal = r;
    } else {
        SweepSpec s0 = s;
        s0.gamma = 0.0;
        s0.label = s.label + ":ideal";
        s0.normalize_performance = false;
        ideal = run_sweep(s0);
        r.convergence.insert(r.convergence.end(), ideal.convergence.begin(), ideal.convergence.end());
    }
    std::map<std::string, double> p_ideal;
    for (const auto& row : ideal.rows)
        if (row.observable == "P" && std::isfinite(row.value))
            p_ideal[row.side + row.basis] = std::max(p_ideal[row.side + row.basis], row.value);
    std::vector<SweepRow> extra;
    for (const auto& row : r.rows)
        if (row.observable == "P") {
            SweepRow n = row;
            n.observable = "P/P_ideal";
            auto it = p_ideal.find(row.side + row.basis);
            n.value = it != p_ideal.end() && it->second > 0 ? row.value / it->second : nan_value;
            extra.push_back(n);
        }
    r.rows.insert(r.rows.end(), extra.begin(), extra.end());
    sort_rows(r.rows);
    return r;
}

SweepResult merge_results(const std::string& label, const std::vector<SweepResult>& parts) {
    if (parts.empty()) throw ConfigurationError("merge_results: nothing to merge");
    SweepResult r;
    r.label = label;
    r.variable = parts.front().variable;
    r.i_in = parts.front().i_in;
    r.dw = parts.front().dw;
    std::string joined;
    for (const auto& p : parts) {
        r.rows.insert(r.rows.end(), p.rows.begin(), p.rows.end());
        r.convergence.insert(r.convergence.end(), p.convergence.begin(), p.convergence.end());
        joined += p.fingerprint;
    }
    r.fingerprint = parts.size() == 1 ? parts.front().fingerprint : hex_digest(joined);
    sort_rows(r.rows);
    return r;
}

// ---------------------------------------------------------------------------

namespace {

Measurement intensity_of(Side side, std::optional<DetectorBasis> b) {
    Measurement m;
    m.kind = ObservableKind::Intensity;
    m.side1 = side;
    m.basis1 = b;
    return m;
}

Measurement pair_of(ObservableKind kind, Side side, DetectorBasis a, DetectorBasis b) {
    Measurement m;
    m.kind = kind;
    m.side1 = m.side2 = side;
    m.basis1 = a;
    m.basis2 = b;
    return m;
}

std::vector<double> regrid(const std::vector<double>& g, int points, bool logarithmic) {
    if (points <= 0) return g;
    return logarithmic ? log_grid(g.front(), g.back(), points) : linear_grid(g.front(), g.back(), points);
}

std::string tag(int id, const std::string& rest) {
    return "scenario" + std::to_string(id) + (rest.empty() ? "" : ":" + rest);
}

}  // namespace

std::vector<SweepSpec> scenario_specs(int id, const ScenarioOptions& opt) {
    using DB = DetectorBasis;
    const MaterialParams p = cucl_defaults();
    std::vector<SweepSpec> out;

    auto base = [&](double d, double e_cut) {
        SweepSpec s;
        s.params = p;
        s.stack.d = d;
        s.e_cut = e_cut;
        return s;
    };
    auto triple = [](Side side) {
        return std::vector<Measurement>{pair_of(ObservableKind::Signal, side, DB::H, DB::H),
                                        pair_of(ObservableKind::Noise, side, DB::H, DB::H),
                                        pair_of(ObservableKind::Performance, side, DB::H, DB::H)};
    };

    switch (id) {
    case 3:
        for (double th : {0.0, 30.0, 60.0}) {
            SweepSpec s = base(7000, 0.5);
            s.label = tag(3, "theta=" + format_number(th));
            s.grid = linear_grid(-42, -4, 381);
            s.theta = th;
            s.measurements = {intensity_of(Side::Right, std::nullopt)};
            out.push_back(s);
        }
        break;
    case 4: {
        SweepSpec s = base(7000, 0.5);
        s.label = tag(4, "");
        s.grid = linear_grid(-42, -4, 381);
        s.theta = 60;
        s.measurements = {intensity_of(Side::Right, DB::H), intensity_of(Side::Right, DB::V)};
        out.push_back(s);
        break;
    }
    case 5: {
        SweepSpec s = base(200, 150);
        s.label = tag(5, "");
        s.grid = linear_grid(-42, 8, 501);
        s.theta = 60;
        s.pump.mode = PumpMode::Target;
        s.pump.target_n = 6;
        s.measurements = {intensity_of(Side::Right, DB::H), intensity_of(Side::Right, DB::V)};
        out.push_back(s);
        break;
    }
    case 6:
        for (double d : {7000.0, 200.0}) {
            SweepSpec s = base(d, d > 1000 ? 0.5 : 150);
            s.label = tag(6, "d=" + format_number(d));
            s.grid = linear_grid(-16, -2, 141);
            s.theta = 60;
            if (d < 1000) {
                s.pump.mode = PumpMode::Target;
                s.pump.target_n = 6;
            }
            const std::pair<DB, DB> combos[] = {{DB::H, DB::H}, {DB::V, DB::V}, {DB::H, DB::V}, {DB::V, DB::H},
                                                {DB::L, DB::R}, {DB::R, DB::L}, {DB::L, DB::L}, {DB::R, DB::R}};
            for (auto [a, b] : combos) s.measurements.push_back(pair_of(ObservableKind::Signal, Side::Right, a, b));
            out.push_back(s);
        }
        break;
    case 7: {
        SweepSpec s = base(200, 150);
        s.label = tag(7, "");
        s.grid = linear_grid(-30, -2, 281);
        s.pump.mode = PumpMode::Target;
        s.pump.target_n = 6;
        s.measurements = triple(Side::Right);
        out.push_back(s);
        break;
    }
    case 8:
        for (double g : {0.0, 0.1, 0.5, 1.0}) {
            SweepSpec s = base(0, 0.5);
            s.label = tag(8, "gamma=" + format_number(g));
            s.variable = SweepVariable::Thickness;
            s.grid = log_grid(10, 7000, 41);
            s.gamma = g;
            s.stack.outside_eps = p.exciton.eps_bg;
            s.measurements = {pair_of(ObservableKind::Signal, Side::Right, DB::H, DB::H),
                              pair_of(ObservableKind::Performance, Side::Right, DB::H, DB::H)};
            s.min_modes = 8;
            s.normalize_performance = true;
            out.push_back(s);
        }
        break;
    case 9:
        for (bool cavity : {false, true}) {
            SweepSpec s = base(0, 0.5);
            s.label = tag(9, cavity ? "dbr" : "bare");
            s.variable = SweepVariable::Thickness;
            s.grid = log_grid(10, 7000, 41);
            s.gamma = 0.5;
            const Side side = cavity ? Side::Left : Side::Right;
            if (cavity) s.stack.kind = StackKind::DbrCavity;
            s.measurements = {pair_of(ObservableKind::Signal, side, DB::H, DB::H),
                              pair_of(ObservableKind::Performance, side, DB::H, DB::H)};
            s.min_modes = 8;
            s.normalize_performance = true;
            out.push_back(s);
        }
        break;
    case 10: {
        SweepSpec s = base(72, 150);
        s.label = tag(10, "");
        s.grid = linear_grid(-30, -2, 281);
        s.stack.kind = StackKind::DbrCavity;
        s.measurements = triple(Side::Left);
        out.push_back(s);
        break;
    }
    default: throw ConfigurationError("unknown scenario id " + std::to_string(id));
    }

    for (auto& s : out) {
        s.grid = regrid(s.grid, opt.points, s.variable == SweepVariable::Thickness);
        if (opt.e_cut) s.e_cut = *opt.e_cut;
        s.convergence.enabled = opt.convergence;
        s.threads = opt.threads;
    }
    return out;
}

SweepResult spectrum_scenario(int id, const ScenarioOptions& opt) {
    std::vector<SweepResult> parts;
    for (const auto& s : scenario_specs(id, opt))
        parts.push_back(s.variable == SweepVariable::Thickness ? thickness_sweep(s) : run_sweep(s));
    return merge_results(tag(id, ""), parts);
}

// ---------------------------------------------------------------------------

void to_json(nlohmann::json& j, const SweepSpec& s) {
    const auto& ex = s.params.exciton;
    const auto& bx = s.params.biexciton;
    nlohmann::json meas = nlohmann::json::array();
    for (const auto& m : s.measurements)
        meas.push_back({{"kind", name_of(observable_names, m.kind)},
                        {"side1", to_string(m.side1)},
                        {"basis1", basis_name(m.basis1)},
                        {"side2", to_string(m.side2)},
                        {"basis2", to_string(m.basis2)}});
    j = {{"label", s.label},
         {"variable", to_string(s.variable)},
         {"grid", {{"values", s.grid}}},
         {"material",
          {{"exciton",
            {{"omega_T", ex.omega_T},
             {"delta_LT", ex.delta_LT},
             {"eps_bg", ex.eps_bg},
             {"mass", ex.mass},
             {"gamma", ex.gamma}}},
           {"biexciton",
            {{"binding", bx.binding}, {"mass", bx.mass}, {"gamma", bx.gamma}, {"volume", bx.volume}}}}},
         {"stack",
          {{"kind", name_of(stack_names, s.stack.kind)},
           {"d", s.stack.d},
           {"outside_eps", s.stack.outside_eps},
           {"periods_left", s.stack.periods_left},
           {"periods_right", s.stack.periods_right}}},
         {"pump",
          {{"mode", name_of(pump_names, s.pump.mode)},
           {"target_n", s.pump.target_n},
           {"offset", s.pump.offset},
           {"amplitude", s.pump.amplitude},
           {"window", s.pump.window}}},
         {"theta", s.theta},
         {"measurements", meas},
         {"dw", s.dw},
         {"alpha", s.alpha},
         {"e_cut", s.e_cut},
         {"e_cut_biexciton", s.e_cut_biexciton},
         {"convergence",
          {{"enabled", s.convergence.enabled},
           {"tolerance", s.convergence.tolerance},
           {"max_doublings", s.convergence.max_doublings}}},
         {"normalize_performance", s.normalize_performance},
         {"min_modes", s.min_modes},
         {"threads", s.threads}};
    if (s.gamma) j["gamma"] = *s.gamma;
    if (s.omega) j["omega"] = *s.omega;
}

void from_json(const nlohmann::json& j, SweepSpec& s) {
    s = SweepSpec{};
    s.label = j.value("label", "");
    s.variable = sweep_variable_from_string(j.value("variable", "omega"));

    const auto& g = j.at("grid");
    if (g.is_array()) {
        s.grid = g.get<std::vector<double>>();
    } else if (g.contains("values")) {
        s.grid = g.at("values").get<std::vector<double>>();
    } else {
        const double lo = g.at("min").get<double>(), hi = g.at("max").get<double>();
        const int n = g.at("count").get<int>();
        const std::string scale = g.value("scale", "linear");
        if (scale == "log")
            s.grid = log_grid(lo, hi, n);
        else if (scale == "linear")
            s.grid = linear_grid(lo, hi, n);
        else
            throw ConfigurationError("grid: unknown scale " + scale);
    }

    if (j.contains("material")) {
        const auto& m = j.at("material");
        auto& ex = s.params.exciton;
        auto& bx = s.params.biexciton;
        if (m.contains("exciton")) {
            const auto& e = m.at("exciton");
            ex.omega_T = e.value("omega_T", ex.omega_T);
            ex.delta_LT = e.value("delta_LT", ex.delta_LT);
            ex.eps_bg = e.value("eps_bg", ex.eps_bg);
            ex.mass = e.value("mass", ex.mass);
            ex.gamma = e.value("gamma", ex.gamma);
        }
        if (m.contains("biexciton")) {
            const auto& b = m.at("biexciton");
            bx.binding = b.value("binding", bx.binding);
            bx.mass = b.value("mass", bx.mass);
            bx.gamma = b.value("gamma", bx.gamma);
            bx.volume = b.value("volume", bx.volume);
        }
    }
    if (j.contains("gamma")) s.gamma = j.at("gamma").get<double>();

    if (j.contains("stack")) {
        const auto& st = j.at("stack");
        s.stack.kind = parse_enum(stack_names, st.value("kind", std::string("film")), "stack kind");
        s.stack.d = st.value("d", s.stack.d);
        s.stack.outside_eps = st.value("outside_eps", s.stack.outside_eps);
        s.stack.periods_left = st.value("periods_left", s.stack.periods_left);
        s.stack.periods_right = st.value("periods_right", s.stack.periods_right);
    }
    if (j.contains("pump")) {
        const auto& pu = j.at("pump");
        s.pump.mode = parse_enum(pump_names, pu.value("mode", std::string("bulk")), "pump mode");
        s.pump.target_n = pu.value("target_n", s.pump.target_n);
        s.pump.offset = pu.value("offset", s.pump.offset);
        s.pump.amplitude = pu.value("amplitude", s.pump.amplitude);
        s.pump.window = pu.value("window", s.pump.window);
    }
    s.theta = j.value("theta", s.theta);
    if (j.contains("omega")) s.omega = j.at("omega").get<double>();

    for (const auto& mj : j.at("measurements")) {
        Measurement m;
        m.kind = parse_enum(observable_names, mj.at("kind").get<std::string>(), "observable");
        m.side1 = side_from_string(mj.value("side1", std::string("right")));
        const std::string b1 = mj.value("basis1", std::string("H"));
        if (b1 == "sum")
            m.basis1.reset();
        else
            m.basis1 = detector_from_string(b1);
        m.side2 = side_from_string(mj.value("side2", to_string(m.side1)));
        m.basis2 = detector_from_string(mj.value("basis2", std::string("H")));
        s.measurements.push_back(m);
    }

    s.dw = j.value("dw", s.dw);
    s.alpha = j.value("alpha", s.alpha);
    s.e_cut = j.value("e_cut", s.e_cut);
    s.e_cut_biexciton = j.value("e_cut_biexciton", s.e_cut_biexciton);
    if (j.contains("convergence")) {
        const auto& c = j.at("convergence");
        s.convergence.enabled = c.value("enabled", s.convergence.enabled);
        s.convergence.tolerance = c.value("tolerance", s.convergence.tolerance);
        s.convergence.max_doublings = c.value("max_doublings", s.convergence.max_doublings);
    }
    s.normalize_performance = j.value("normalize_performance", s.normalize_performance);
    s.min_modes = j.value("min_modes", s.min_modes);
    s.threads = j.value("threads", s.threads);
}

void to_json(nlohmann::json& j, const ConvergenceReport& c) {
    j = {{"sweep", c.sweep},
         {"e_cut", c.e_cut},
         {"e_cut_checked", c.e_cut_checked},
         {"max_shift", std::isfinite(c.max_shift) ? nlohmann::json(c.max_shift) : nlohmann::json("inf")},
         {"doublings", c.doublings},
         {"passed", c.passed},
         {"checked", c.checked}};
    if (c.x) j["x"] = *c.x;
}

std::string config_fingerprint(const nlohmann::json& config) {
    return hex_digest(config.dump() + "|" + version_string);
}

std::string config_fingerprint(const SweepSpec& spec) {
    nlohmann::json j = spec;
    j.erase("threads");
    return config_fingerprint(j);
}

void write_csv(const SweepResult& r, std::ostream& os) {
    static const char* xname[] = {"omega_minus_wT_meV", "theta_deg", "d_nm"};
    os << xname[static_cast<int>(r.variable)]
       << ",observable,side,basis,theta_deg,d_nm,omega_in_minus_wT_meV,value,i_in,dw_meV,e_cut_meV,config_hash\n";
    const std::string i_in = format_number(r.i_in), dw = format_number(r.dw);
    for (const auto& row : r.rows)
        os << format_number(row.x) << ',' << row.observable << ',' << row.side << ',' << row.basis << ','
           << format_number(row.theta) << ',' << format_number(row.d) << ',' << format_number(row.omega_in) << ','
           << format_number(row.value) << ',' << i_in << ',' << dw << ',' << format_number(row.e_cut) << ','
           << r.fingerprint << '\n';
}

void write_manifest(const SweepResult& r, const std::vector<SweepSpec>& specs, std::ostream& os) {
    nlohmann::json run = {{"record", "run"},
                          {"label", r.label},
                          {"version", version_string},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"fingerprint", r.fingerprint},
                          {"rows", r.rows.size()}};
    os << run.dump() << '\n';
    for (const auto& s : specs) {
        nlohmann::json cfg = s;
        cfg.erase("threads");
        os << nlohmann::json{{"record", "sweep"}, {"label", s.label}, {"fingerprint", config_fingerprint(s)},
                             {"config", cfg}}
                  .dump()
           << '\n';
    }
    for (const auto& c : r.convergence) {
        nlohmann::json j = c;
        j["record"] = "convergence";
        os << j.dump() << '\n';
    }
}

}  // namespace rhps
