#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rcoda/likelihood.hpp"
#include "rcoda/rng.hpp"

namespace rcoda {

struct Prior {
  double beta_lo = 0.0;
  double beta_hi = 0.9;   // simulation-study default; image fits use (0, 4)
  double alpha_lo = 0.0;
  double alpha_hi = 1.0;
};

struct McmcSettings {
  int iterations = 6000;
  int burn_in = 2000;
  double proposal_sd_beta = 0.05;
  double proposal_sd_alpha = 0.1;
  RngSeed seed = 1;
  bool adapt = true;             // Robbins-Monro scaling during burn-in only
  double target_acceptance = 0.35;
};

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double level = 0.95;
};

struct ChainResult {
  std::vector<double> beta;      // full trace, length = iterations
  std::vector<double> alpha;     // empty when the backend has no alpha
  std::vector<double> loglik;
  std::vector<std::uint8_t> accept_beta;
  std::vector<std::uint8_t> accept_alpha;
  int burn_in = 0;
  bool has_alpha = false;
  double acceptance_beta = 0.0;  // post-burn-in rates
  double acceptance_alpha = 0.0;

  std::span<const double> retained_beta() const {
    return {beta.data() + burn_in, beta.size() - burn_in};
  }
  std::span<const double> retained_alpha() const {
    return {alpha.data() + burn_in, alpha.size() - burn_in};
  }
};

// Random-walk Metropolis-Hastings over beta (and alpha when the backend
// carries one): Gaussian proposals reflected at the prior boundaries, one
// single-parameter block per variable per iteration. Deterministic given the
// settings seed.
ChainResult sample_posterior(const BetaLikelihood& backend, const Prior& prior,
                             const McmcSettings& settings);

// convenience overload that builds the backend from a spec first
ChainResult sample_posterior(const LabelField& field, const BackendSpec& spec,
                             const Prior& prior, const McmcSettings& settings);

// mean, sd and the equal-tailed credible interval (empirical quantiles,
// linear interpolation) of the retained draws
ParamSummary summarize(std::span<const double> draws, double level);

struct MpleResult {
  double beta = 0.0;
  bool at_boundary = false;
};

// Maximum pseudo-likelihood estimate by golden-section search on [lo, hi]
// to 1e-6; flags a maximizer within tolerance of either endpoint.
MpleResult mple_beta(const LabelField& field, double lo, double hi);

std::string trace_csv(const ChainResult& chain);
nlohmann::json chain_summary_json(const ChainResult& chain, double level);

}  // namespace rcoda
