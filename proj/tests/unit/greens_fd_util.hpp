#pragma once

#include "helmholtz_fd.hpp"
#include "rhps/stack.hpp"

// Plain geometry data for the finite-difference oracle.
inline oracle::Geometry fd_geometry(const rhps::LayerStack& s) {
    oracle::Geometry g;
    for (std::size_t j = 0; j + 1 < s.regions(); ++j) g.interfaces.push_back(s.interface(j));
    for (std::size_t j = 0; j < s.regions(); ++j) g.eps.push_back(s.eps(j));
    return g;
}
