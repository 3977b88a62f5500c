#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Brute-force 1D finite-difference solver for the Fourier-space dyadic Green's
// function of a planar stack. Geometry is given as plain data so that nothing
// from the library's Green's-function code is reused.
namespace oracle {

using cplx = std::complex<double>;

struct Geometry {
    std::vector<double> interfaces;  // increasing
    std::vector<double> eps;         // interfaces.size() + 1 regions
};

class HelmholtzFd {
public:
    // omega in meV, k_par in nm^-1; h0 is the coarse spacing in nm; the grid
    // extends `margin` nm into both end media.
    HelmholtzFd(Geometry g, double omega, double k_par, double h0, double margin, int levels = 5);

    // Regular part of the 3x3 tensor G(z, z'); z != z'. Both points are snapped
    // to coarse nodes; use snap() to get the effective positions.
    Eigen::Matrix3cd tensor(double z, double zp) const;
    double snap(double z) const;

private:
    struct Grid {
        std::vector<double> z;
        std::vector<int> region;  // region of segment (z_i, z_{i+1})
    };
    Grid make_grid(int level) const;
    int node_of(const Grid& g, double z) const;
    int region_of(double z) const;
    // Solve (p u')' + s u = -delta(z - z_src) with outgoing ends; te selects p = 1.
    std::vector<cplx> solve(const Grid& g, bool te, int src) const;
    cplx kz2(int region) const;
    Eigen::Matrix3cd tensor_level(int level, double z, double zp) const;

    Geometry geo_;
    double omega_, kp_, h0_, margin_;
    int levels_;
};

}  // namespace oracle
