#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "rhps/basis.hpp"
#include "rhps/greens.hpp"
#include "rhps/stack.hpp"

namespace rhps {

using Sector = Polarization;  // V: xi = y; H: xi in {x, z}

// A(omega) over (xi, m). The H block is ordered [x(m = 1..n), z(m = 1..n)].
struct ResponseMatrix {
    cplx omega;
    double k_par = 0;
    Eigen::MatrixXcd v;
    Eigen::MatrixXcd h;
    // Filled by invert_a: 1-norm condition estimates of the two blocks.
    double condition_v = 0, condition_h = 0;
    bool near_singular = false;
};

// Per-(omega, k_par) self-energy data shared by assembly, solvers and
// radiation kernels.
class ResponseKernel {
public:
    ResponseKernel(const LayerStack& stack, const ExcitonBasis& basis, const ExcitonParams& ex,
                   cplx omega);

    int size() const { return n_; }
    cplx omega() const { return omega_; }
    double k_par() const { return basis_.k_par; }
    const ExcitonBasis& basis() const { return basis_; }
    const ExcitonParams& params() const { return ex_; }
    const LayeredGreens& greens() const { return greens_; }
    cplx k() const { return k_; }

    // Single matrix element, components a, b in {X, Y, Z}; mixed V/H pairs give 0.
    cplx element(int a, int b, int i, int j) const;
    Eigen::MatrixXcd block_v() const;
    Eigen::MatrixXcd block_h() const;

    // I_m(+k), I_m(-k) for all retained modes.
    const Eigen::VectorXcd& sine_exp_plus() const { return ik_; }
    const Eigen::VectorXcd& sine_exp_minus() const { return imk_; }

    // Prefactor -eps_bg Delta_LT (w/c)^2 (2/d) / (2ik); the H sector carries an extra 1/k0^2.
    cplx lambda(Sector s) const { return s == Sector::V ? lambda_v_ : lambda_h_; }
    bool pole(int i) const { return pole_[i]; }

    // Diagonal + low-rank form A = D + L C R^T of the V block, or of the xx block
    // at k_par = 0. Rows flagged as poles carry garbage in D and L.
    struct Separable {
        Eigen::VectorXcd D;
        Eigen::MatrixXcd L;  // n x 4
        Eigen::Matrix<cplx, 4, 2> C;
        Eigen::MatrixXcd R;  // n x 2
    };
    Separable separable(int component) const;

private:
    cplx direct(int i, int j) const;       // D0
    cplx direct_sign(int i, int j) const;  // Ds
    std::array<cplx, 4> weights(int a, int b) const;

    ExcitonBasis basis_;
    ExcitonParams ex_;
    cplx omega_;
    LayeredGreens greens_;
    int n_;
    double d_;
    cplx k_, k0sq_, e1_;
    cplx lambda_v_, lambda_h_;
    std::array<ImageTerm, 4> img_v_, img_h_;
    Eigen::VectorXcd ik_, imk_;
    std::vector<double> q_;
    std::vector<bool> pole_;
};

ResponseMatrix assemble_a(const LayerStack& stack, const ExcitonBasis& basis,
                          const ExcitonParams& ex, cplx omega);
ResponseMatrix invert_a(const ResponseMatrix& a);

// Linear solver for one sector at fixed (omega, k_par).
class SectorSolver {
public:
    virtual ~SectorSolver() = default;
    virtual int size() const = 0;
    virtual Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const = 0;
    virtual Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const = 0;
    virtual cplx log_det() const = 0;
};

class DenseSolver : public SectorSolver {
public:
    explicit DenseSolver(Eigen::MatrixXcd a);
    int size() const override { return static_cast<int>(lu_.rows()); }
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const override { return lu_.solve(b); }
    Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const override {
        return lu_.transpose().solve(b);
    }
    cplx log_det() const override;

private:
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
};

// Symmetric diagonal-plus-low-rank matrix; a small set of special rows
// (near-pole k or vanishing diagonal) is eliminated through a Schur complement.
class SeparableSolver : public SectorSolver {
public:
    SeparableSolver(const ResponseKernel& kernel, int component,
                    const std::vector<int>& extra_special = {});
    int size() const override { return n_; }
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const override;
    Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const override { return solve(b); }
    cplx log_det() const override { return logdet_; }
    const std::vector<int>& special() const { return special_; }

private:
    Eigen::VectorXcd solve_regular(const Eigen::VectorXcd& b) const;

    int n_;
    ResponseKernel::Separable s_;
    std::vector<int> special_;
    std::vector<bool> is_special_;
    Eigen::VectorXcd dinv_;
    Eigen::MatrixXcd y_;  // D^{-1} L on regular rows
    Eigen::PartialPivLU<Eigen::Matrix2cd> cap_;
    Eigen::Matrix<cplx, 4, 2> c_;
    Eigen::MatrixXcd ars_;  // A_RS (n x |S|)
    Eigen::MatrixXcd ainv_ars_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> schur_;
    cplx logdet_;
};

// Two independent diagonal blocks [first; second].
class BlockSolver : public SectorSolver {
public:
    BlockSolver(std::unique_ptr<SectorSolver> a, std::unique_ptr<SectorSolver> b);
    int size() const override { return a_->size() + b_->size(); }
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const override;
    Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const override;
    cplx log_det() const override { return a_->log_det() + b_->log_det(); }

private:
    std::unique_ptr<SectorSolver> a_, b_;
};

class DiagonalSolver : public SectorSolver {
public:
    explicit DiagonalSolver(Eigen::VectorXcd diag) : d_(std::move(diag)) {}
    int size() const override { return static_cast<int>(d_.size()); }
    Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const override { return b.cwiseQuotient(d_); }
    Eigen::VectorXcd solve_transpose(const Eigen::VectorXcd& b) const override { return solve(b); }
    cplx log_det() const override;

private:
    Eigen::VectorXcd d_;
};

enum class SolverKind { Automatic, Dense };

std::unique_ptr<SectorSolver> make_sector_solver(const ResponseKernel& kernel, Sector sector,
                                                 SolverKind kind = SolverKind::Automatic,
                                                 const std::vector<int>& extra_special = {});

// Both sectors at one (omega, k_par). Full vectors are ordered [x, y, z], n each.
class LinearResponse {
public:
    LinearResponse(const LayerStack& stack, const ExcitonBasis& basis, const ExcitonParams& ex,
                   cplx omega, SolverKind kind = SolverKind::Automatic);

    const ResponseKernel& kernel() const { return kernel_; }
    int size() const { return kernel_.size(); }
    // W b and W^T b on full [x, y, z] vectors.
    Eigen::VectorXcd apply_w(const Eigen::VectorXcd& b) const;
    Eigen::VectorXcd apply_w_transpose(const Eigen::VectorXcd& b) const;
    const SectorSolver& solver(Sector s) const { return s == Sector::V ? *v_ : *h_; }

private:
    ResponseKernel kernel_;
    std::unique_ptr<SectorSolver> v_, h_;
};

struct CoupledMode {
    cplx omega;  // complex eigenfrequency
    Sector sector = Sector::V;
    double k_par = 0;
    int dominant_m = 0;
    int dominant_component = Y;

    double resonance() const { return omega.real(); }
    double width() const { return -2.0 * omega.imag(); }
};

struct ModeSearch {
    double omega_min = 0, omega_max = 0;  // window on Re omega
    int max_iterations = 60;
    double tolerance = 1e-9;           // meV, Newton step
    double dedupe = 1e-6;              // meV
    std::size_t max_seeds = 400;       // nearest to the window centre
    std::vector<cplx> extra_seeds;
};

// Complex exciton frequencies of the homogeneous bulk with K^2 = q^2 + k_par^2:
// transverse branches and the longitudinal one, sorted by real part.
std::vector<cplx> bulk_polariton_energies(const ExcitonParams& ex, double q, double k_par);

std::vector<CoupledMode> find_coupled_modes(const LayerStack& stack, const ExcitonBasis& basis,
                                            const ExcitonParams& ex, Sector sector,
                                            const ModeSearch& search);

struct LinearAmplitudes {
    cplx omega;
    double k_par = 0;
    Eigen::VectorXcd b;      // [x, y, z], n each
    Eigen::VectorXcd drive;  // right-hand side A b = drive
};

struct PumpSpec {
    double omega = 0;
    double k_par = 0;
    Polarization pol = Polarization::H;
    cplx amplitude = 1.0;
};

// Overlap of the pump field with the sine basis: sqrt(2/d) int sin(q_m z) e_xi . E0(z) dz.
Eigen::VectorXcd pump_drive(const LayerStack& stack, const ExcitonBasis& basis,
                            const PumpSpec& pump);

LinearAmplitudes linear_amplitudes(const LayerStack& stack, const ExcitonBasis& basis,
                                   const ExcitonParams& ex, const PumpSpec& pump);
LinearAmplitudes linear_amplitudes(const LinearResponse& response, const LayerStack& stack,
                                   const PumpSpec& pump);

}  // namespace rhps
