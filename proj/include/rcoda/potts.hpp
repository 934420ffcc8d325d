#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rcoda/field.hpp"
#include "rcoda/lattice.hpp"
#include "rcoda/rng.hpp"

namespace rcoda {

struct PottsModel {
  GeometryPtr geom;
  int q = 2;
  double beta = 0.0;
};

void validate_model(const PottsModel& m);

// thrown when a lattice is too large for the exact backends
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// U(z): number of neighbouring pairs in the same state, each pair once.
std::int64_t bond_count(const LabelField& f);

// `sweeps` full raster-scan sweeps of single-site draws from the full
// conditional exp{beta * s_c} / sum_c' exp{beta * s_c'}. Deterministic given
// (model, sweeps, seed, initial); without an initial field, sites start iid
// uniform from the same stream.
LabelField gibbs_sample(const PottsModel& m, int sweeps, RngSeed seed,
                        const LabelField* initial = nullptr);

// log C(beta) by exhaustive enumeration over q^n_present states.
double enumeration_log_constant(const Geometry& g, int q, double beta);

// log C(beta) by the row-wise forward recursion over column-state vectors
// (q^width intermediate weights, log-space renormalization). Works for both
// neighbourhood orders and masked lattices; the narrow axis is used as the
// window, so the effective width is min(rows, cols).
double transfer_log_constant(const Geometry& g, int q, double beta);

bool enumeration_feasible(const Geometry& g, int q);
bool transfer_feasible(const Geometry& g, int q);

// transfer backend when feasible, enumeration as fallback; CapacityError
// naming both limits otherwise
double exact_log_constant(const PottsModel& m);

// beta * U(z) - log C(beta)
double exact_log_likelihood(const LabelField& f, const PottsModel& m);

struct BondsPoint {
  double beta = 0.0;
  double mean_u = 0.0;
  double se_u = 0.0;
};

// Monte Carlo estimate of E[U(z) | beta] over a beta grid; one independent
// Gibbs chain per grid point (seed derived from `seed` and the point index),
// mean over post-burn-in sweeps with a batch-means standard error.
std::vector<BondsPoint> expected_bonds_curve(const GeometryPtr& geom, int q,
                                             const std::vector<double>& beta_grid,
                                             int sweeps, int burn_in, RngSeed seed,
                                             int workers = 1);

}  // namespace rcoda
