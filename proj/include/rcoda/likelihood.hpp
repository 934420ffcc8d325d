#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rcoda/field.hpp"
#include "rcoda/plan.hpp"
#include "rcoda/potts.hpp"

namespace rcoda {

// Full parameterization of the decomposition likelihood.
struct ModelParams {
  double beta = 0.0;
  double alpha = 1.0;  // per-level decay of the interaction, in [0,1]
  int T = 0;
  int q = 2;
  Order order = Order::First;
};

enum class TerminalMode { Exact, Independent };
// The terminal interaction defaults to alpha^T * beta; the alternative
// alpha^(T-1) * beta is selectable for comparison runs.
enum class TerminalExponent { PowT, PowTminusOne };

struct RcodaOptions {
  TerminalMode terminal = TerminalMode::Exact;
  TerminalExponent exponent = TerminalExponent::PowT;
};

enum class SecondVariant { Marginal, Conditional };

// Sum over conditioned sites i of
//   beta_eff * s_{z_i}(i) - log sum_c exp{beta_eff * s_c(i)}
// where s_c(i) counts the supplied neighbours of i in state c. Valid whenever
// the sites are mutually non-adjacent given their conditioning sets.
double conditional_block_loglik(const LabelField& field,
                                std::span<const std::int32_t> sites,
                                const std::vector<std::vector<std::int32_t>>& nbrs,
                                double beta_eff);

// Same per-site term over every present site with its full neighbour set.
double pseudo_loglik(const LabelField& field, double beta);

// Conditioned-site terms compressed to (own state, neighbour state counts)
// patterns; evaluation cost is the number of distinct patterns rather than
// the number of sites, which makes repeated evaluations along an MCMC chain
// cheap. Matches the direct sums above to floating-point roundoff.
class BlockStats {
 public:
  BlockStats() = default;
  BlockStats(const LabelField& field, std::span<const std::int32_t> sites,
             const std::vector<std::vector<std::int32_t>>& nbrs);

  double eval(double beta_eff) const;
  int n_sites() const { return n_sites_; }

 private:
  int q_ = 0;
  int n_sites_ = 0;
  std::vector<double> mult_;
  std::vector<std::uint8_t> s_own_;
  std::vector<std::uint8_t> counts_;  // q_ entries per pattern
};

// Decomposition likelihood bound to one observed field: per-level block
// statistics plus the terminal bond count, evaluated at any (beta, alpha).
class RcodaEvaluator {
 public:
  RcodaEvaluator(const LabelField& field, const DecompositionPlan& plan,
                 RcodaOptions options = {},
                 SecondVariant variant = SecondVariant::Conditional);

  double eval(double beta, double alpha) const;
  int T() const { return T_; }
  Order order() const { return order_; }

 private:
  Order order_;
  int T_ = 0;
  int q_ = 2;
  std::vector<std::vector<BlockStats>> level_stats_;
  GeometryPtr terminal_geom_;
  std::int64_t terminal_u_ = 0;
  RcodaOptions options_;
};

double rcoda_loglik_first(const LabelField& field, const ModelParams& params,
                          const DecompositionPlan& plan, RcodaOptions options = {});

double rcoda_loglik_second(const LabelField& field, const ModelParams& params,
                           const DecompositionPlan& plan, SecondVariant variant,
                           RcodaOptions options = {});

// ---------------------------------------------------------------------------
// Thermodynamic-integration table: log C(beta) on a grid, built offline from
// Monte Carlo estimates of E[U|beta] by the trapezoid rule.

struct TdiMcSettings {
  int sweeps = 2500;   // total Gibbs sweeps per grid point
  int burn_in = 500;
};

struct TdiTable {
  std::vector<double> beta;
  std::vector<double> logc;
  std::vector<double> se;
  int rows = 0, cols = 0, q = 0;
  Order order = Order::First;
  std::string geometry_hash;

  double interpolate(double b) const;  // piecewise linear; throws out_of_range
  double se_at(double b) const;
  bool covers(double lo, double hi) const;
  bool matches(const Geometry& g, int q_) const;
};

TdiTable build_tdi_table(const GeometryPtr& geom, int q,
                         const std::vector<double>& beta_grid,
                         const TdiMcSettings& mc, RngSeed seed, int workers = 1);

void save_tdi_table(const TdiTable& table, const std::string& path);
TdiTable load_tdi_table(const std::string& path);

// beta * U(z) - interpolate(table, beta); no extrapolation.
double tdi_loglik(const LabelField& field, double beta, const TdiTable& table);

// ---------------------------------------------------------------------------
// Backend selection for posterior samplers.

enum class BackendKind { Exact, PL, Rcoda, RcodaM, RcodaC, Tdi };

const char* backend_name(BackendKind k);
BackendKind backend_from_name(const std::string& name);

struct BackendSpec {
  BackendKind kind = BackendKind::PL;
  int T = -1;  // decomposition depth for rcoda kinds; -1 applies the 4x4 rule
  RcodaOptions rcoda;
  const TdiTable* table = nullptr;  // required for Tdi
};

// log-likelihood of beta (and alpha where the backend has one) for a fixed
// observed field; implementations precompute whatever the field allows
class BetaLikelihood {
 public:
  virtual ~BetaLikelihood() = default;
  virtual double log_lik(double beta, double alpha) const = 0;
  virtual bool uses_alpha() const { return false; }
  virtual std::string name() const = 0;
};

// Validates compatibility (order, capacity, table coverage) and binds the
// backend to the field. Throws std::invalid_argument or CapacityError.
std::unique_ptr<BetaLikelihood> make_backend(const LabelField& field,
                                             const BackendSpec& spec);

}  // namespace rcoda
