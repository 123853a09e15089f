#pragma once

// Deterministic Rayleigh-Ritz solver for the two-electron triplet-S problem
// in Hylleraas coordinates (r1, r2, r12).  All matrix elements reduce to the
// closed-form integrals
//
//   J(p, q, s) = Int r1^p r2^q u^s exp(-2 alpha (r1 + r2)) r1 r2 u dV
//
// over 0 <= |r1 - r2| <= u <= r1 + r2, evaluated by binomial expansion and
// positive exponential-tail series (no cancellation).  The lowest eigenvalue
// is a variational upper bound; the eigenvector supplies guide-function
// coefficients for the same basis.

#include <vector>

#include "qmcnodes/wavefunction.hpp"

namespace qmcnodes {

struct RitzResult {
  double energy = 0.0;               // lowest eigenvalue (hartree)
  std::vector<double> coefficients;  // basis coefficients, S-normalized, c0 > 0
  std::vector<double> spectrum;      // all eigenvalues, ascending
};

/// Basis function n: (r1^i r2^j - r1^j r2^i) r12^k exp(-alpha (r1 + r2)),
/// taken from the (i, j, k) of each term; input coefficients are ignored.
/// Throws if the basis is empty, has i == j terms, or alpha <= 0.
RitzResult ritz_he_triplet(const std::vector<TripletHylleraasTerm>& basis,
                           double alpha, int nuclear_charge = 2);

/// J(p, q, s) above; exposed for tests.  Requires p, q, s >= -1.
double triplet_basis_integral(int p, int q, int s, double alpha);

}  // namespace qmcnodes
