#pragma once

#include "capverify/operators.hpp"
#include "capverify/report.hpp"

namespace capverify {
namespace identities {

using immersion::DiscreteImmersion;

// Normalized residual of one integral identity on one discretized surface.
// The sweep over resolutions and the order estimate live in the runner.

// int_M [(1 - cos(theta) <E,nu>) H_r - <x,nu> H_{r+1}] dA = 0 (Euclidean).
double minkowski_euclidean(const DiscreteImmersion& m, int r);

// int_M [(V - cos(theta) g(x,nu)) H_r - g(X,nu) H_{r+1}] dA = 0 (horoball).
double minkowski_horoball(const DiscreteImmersion& m, int r);

// -(r+1) int_M g(x,nu) sigma_{r+1} dA
//   = int_bdry P_r^{mumu} (cos(theta) g(x,nubar) - sin(theta)) ds.
double boundary_flux_1(const DiscreteImmersion& m, int r);

// (n-r) int_M sigma_r g(x,nu) dA = int_bdry P_r^{mumu} g(x,nubar) ds.
double boundary_flux_2(const DiscreteImmersion& m, int r);

// For constant sigma_{r+1}:
// int_bdry P_r^{mumu} (-sin(theta) + cos(theta) g(x,nubar)
//                      + g(x,nubar) h(mu,mu)) ds = 0.
// Throws PreconditionError when sigma_{r+1} is not constant (relative
// spread above 1e-8), quoting the measured spread.
double cmc_boundary_identity(const DiscreteImmersion& m, int r);

// Relative spread of sigma_{r+1} over the interior nodes.
double sigma_spread(const DiscreteImmersion& m, int r1);

}  // namespace identities
}  // namespace capverify
