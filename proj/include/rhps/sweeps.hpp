#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rhps/rhps.hpp"

namespace rhps {

inline constexpr const char* version_string = "1.0.0";

enum class SweepVariable { Omega, Theta, Thickness };
std::string to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(const std::string& s);

enum class StackKind { Film, DbrCavity };

struct StackTemplate {
    StackKind kind = StackKind::Film;
    double d = 7000.0;         // nm, used unless d is swept
    double outside_eps = 1.0;  // film only
    int periods_left = 4;      // cavity only
    int periods_right = 16;

    LayerStack build(double d_nm, const MaterialParams& p) const;
};

enum class PumpMode { Bulk, Target, Fixed };

struct PumpRule {
    PumpMode mode = PumpMode::Bulk;
    int target_n = 1;
    double offset = -16.1;  // w_in - w_T for Fixed, meV
    double amplitude = 1.0;
    double window = 1.0;
};

enum class ObservableKind { Intensity, Signal, Noise, Performance };

// One detected quantity. Intensity uses (side1, basis1); an empty basis1 sums H and V.
struct Measurement {
    ObservableKind kind = ObservableKind::Intensity;
    Side side1 = Side::Right;
    std::optional<DetectorBasis> basis1 = DetectorBasis::H;
    Side side2 = Side::Right;
    DetectorBasis basis2 = DetectorBasis::H;

    std::string name() const;
    std::string side_label() const;
    std::string basis_label() const;
};

struct ConvergenceOptions {
    bool enabled = true;
    double tolerance = 0.005;
    int max_doublings = 3;
};

struct SweepSpec {
    std::string label;
    SweepVariable variable = SweepVariable::Omega;
    // w - w_T in meV, theta in degrees, or d in nm.
    std::vector<double> grid;
    MaterialParams params = cucl_defaults();
    std::optional<double> gamma;  // overrides params.exciton.gamma
    StackTemplate stack;
    PumpRule pump;
    double theta = 0.0;           // degrees, when theta is not swept
    std::optional<double> omega;  // w - w_T when w is not swept; empty means w_in
    std::vector<Measurement> measurements;
    double dw = 0.01;
    double alpha = 1.0;
    double e_cut = 150.0;
    double e_cut_biexciton = 0.0;
    ConvergenceOptions convergence;
    bool normalize_performance = false;
    // Thickness sweeps start each point at the smallest doubling of e_cut
    // holding this many exciton levels.
    int min_modes = 1;
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const;
    MaterialParams effective_params() const;
};

std::vector<double> linear_grid(double min, double max, int count);
std::vector<double> log_grid(double min, double max, int count);

struct SweepRow {
    double x = 0;
    std::string observable;
    std::string side;
    std::string basis;
    double theta = 0;     // degrees
    double d = 0;         // nm
    double omega_in = 0;  // w_in - w_T, meV
    double value = 0;
    double e_cut = 0;
};

struct ConvergenceReport {
    std::string sweep;
    std::optional<double> x;   // set when the check is per grid point
    double e_cut = 0;          // cutoff the rows were computed with
    double e_cut_checked = 0;  // doubled cutoff used for the check
    double max_shift = 0;      // peak-relative change at the checked points
    int doublings = 0;
    bool passed = false;
    bool checked = false;
};

struct SweepResult {
    std::string label;
    SweepVariable variable = SweepVariable::Omega;
    std::vector<SweepRow> rows;
    std::string fingerprint;
    std::vector<ConvergenceReport> convergence;
    double i_in = 1.0;
    double dw = 0.01;

    std::vector<double> series(const std::string& observable, const std::string& basis = "",
                               std::optional<double> theta = std::nullopt,
                               std::optional<double> d = std::nullopt) const;
    std::vector<double> abscissa(const std::string& observable, const std::string& basis = "",
                                 std::optional<double> theta = std::nullopt,
                                 std::optional<double> d = std::nullopt) const;
};

// Evaluates every grid point, doubling E_cut until the peak values of each
// observable move by less than the tolerance. Thickness sweeps run the check
// point by point, since the basis changes with d.
SweepResult run_sweep(const SweepSpec& spec);

// S/I_in^2, P and, when requested, P/P_ideal with P_ideal the maximum of the
// same sweep at Gamma = 0. The pump is retuned at each d.
SweepResult thickness_sweep(const SweepSpec& spec);

// Concatenates results; rows are stably sorted by x.
SweepResult merge_results(const std::string& label, const std::vector<SweepResult>& parts);

struct ScenarioOptions {
    int points = 0;  // 0 keeps the preset grid
    std::optional<double> e_cut;
    bool convergence = true;
    unsigned threads = 0;
};

// Preset sweeps by scenario id: spectra 3, 4, 5, 6, 7, 10; thickness 8, 9.
std::vector<SweepSpec> scenario_specs(int id, const ScenarioOptions& opt = {});
SweepResult spectrum_scenario(int id, const ScenarioOptions& opt = {});

void to_json(nlohmann::json& j, const SweepSpec& s);
void from_json(const nlohmann::json& j, SweepSpec& s);
void to_json(nlohmann::json& j, const ConvergenceReport& c);

// First 16 hex digits of SHA-256 over the canonical JSON and the version.
std::string config_fingerprint(const nlohmann::json& config);
std::string config_fingerprint(const SweepSpec& spec);

void write_csv(const SweepResult& r, std::ostream& os);
void write_manifest(const SweepResult& r, const std::vector<SweepSpec>& specs, std::ostream& os);

}  // namespace rhps
