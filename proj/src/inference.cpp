#include "rcoda/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "rcoda/io_util.hpp"

namespace rcoda {

namespace {

double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  // fold into [lo, lo + 2w) then mirror the upper half
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  return y <= width ? lo + y : hi - (y - width);
}

struct Block {
  double value;
  double lo, hi;
  double log_sd;
  std::vector<double>* trace;
  std::vector<std::uint8_t>* accepts;
};

}  // namespace

ChainResult sample_posterior(const BetaLikelihood& backend, const Prior& prior,
                             const McmcSettings& s) {
  if (!(prior.beta_lo < prior.beta_hi))
    throw std::invalid_argument("prior needs beta_lo < beta_hi");
  if (s.burn_in < 0 || s.burn_in >= s.iterations)
    throw std::invalid_argument("need 0 <= burn_in < iterations");
  if (!(s.proposal_sd_beta > 0.0) || !(s.proposal_sd_alpha > 0.0))
    throw std::invalid_argument("proposal sds must be positive");

  const bool has_alpha = backend.uses_alpha();
  ChainResult out;
  out.burn_in = s.burn_in;
  out.has_alpha = has_alpha;
  out.beta.resize(s.iterations);
  out.loglik.resize(s.iterations);
  out.accept_beta.resize(s.iterations);
  if (has_alpha) {
    out.alpha.resize(s.iterations);
    out.accept_alpha.resize(s.iterations);
  }

  Rng rng(s.seed);
  double beta = 0.5 * (prior.beta_lo + prior.beta_hi);
  double alpha = has_alpha ? 0.5 * (prior.alpha_lo + prior.alpha_hi) : 1.0;
  double cur_ll = backend.log_lik(beta, alpha);

  Block bb{beta, prior.beta_lo, prior.beta_hi, std::log(s.proposal_sd_beta),
           &out.beta, &out.accept_beta};
  Block ab{alpha, prior.alpha_lo, prior.alpha_hi, std::log(s.proposal_sd_alpha),
           &out.alpha, &out.accept_alpha};

  for (int it = 0; it < s.iterations; ++it) {
    const bool adapting = s.adapt && it < s.burn_in;
    const int nblocks = has_alpha ? 2 : 1;
    for (int which = 0; which < nblocks; ++which) {
      Block& blk = which == 0 ? bb : ab;
      const double prop =
          reflect_into(blk.value + rng.normal(0.0, std::exp(blk.log_sd)), blk.lo,
                       blk.hi);
      const double prop_ll = which == 0 ? backend.log_lik(prop, ab.value)
                                        : backend.log_lik(bb.value, prop);
      const double log_ratio = prop_ll - cur_ll;
      const bool accept = log_ratio >= 0.0 || rng.uniform01() < std::exp(log_ratio);
      if (accept) {
        blk.value = prop;
        cur_ll = prop_ll;
      }
      (*blk.accepts)[it] = accept ? 1 : 0;
      if (adapting) {
        // Robbins-Monro on the log proposal scale
        const double gamma = 1.0 / std::pow(it + 1.0, 0.6);
        blk.log_sd += gamma * ((accept ? 1.0 : 0.0) - s.target_acceptance);
        blk.log_sd = std::clamp(blk.log_sd, std::log(1e-5), std::log(1e2));
      }
      (*blk.trace)[it] = blk.value;
    }
    out.loglik[it] = cur_ll;
  }

  const int kept = s.iterations - s.burn_in;
  out.acceptance_beta =
      std::accumulate(out.accept_beta.begin() + s.burn_in, out.accept_beta.end(), 0.0) /
      kept;
  if (has_alpha)
    out.acceptance_alpha = std::accumulate(out.accept_alpha.begin() + s.burn_in,
                                           out.accept_alpha.end(), 0.0) /
                           kept;
  return out;
}

ChainResult sample_posterior(const LabelField& field, const BackendSpec& spec,
                             const Prior& prior, const McmcSettings& settings) {
  auto backend = make_backend(field, spec);
  if (spec.kind == BackendKind::Tdi &&
      !spec.table->covers(prior.beta_lo, prior.beta_hi))
    throw std::out_of_range("TDI table does not cover the beta prior support");
  return sample_posterior(*backend, prior, settings);
}

namespace {

double quantile_sorted(const std::vector<double>& x, double p) {
  if (x.empty()) throw std::invalid_argument("empty draws");
  if (x.size() == 1) return x[0];
  const double h = p * (static_cast<double>(x.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

}  // namespace

ParamSummary summarize(std::span<const double> draws, double level) {
  if (draws.empty()) throw std::invalid_argument("empty chain");
  if (!(level > 0.0) || level > 1.0)
    throw std::invalid_argument("credibility level must be in (0, 1]");
  ParamSummary s;
  s.level = level;
  const double n = static_cast<double>(draws.size());
  s.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / n;
  double ss = 0.0;
  for (double d : draws) ss += (d - s.mean) * (d - s.mean);
  s.sd = draws.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = 0.5 * (1.0 - level);
  s.ci_lo = quantile_sorted(sorted, tail);
  s.ci_hi = quantile_sorted(sorted, 1.0 - tail);
  return s;
}

MpleResult mple_beta(const LabelField& field, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
  if (lo < 0.0) throw std::invalid_argument("beta search interval must be >= 0");
  // пattern stats make each evaluation O(#patterns)
  const Geometry& g = *field.geom;
  std::vector<std::int32_t> sites;
  std::vector<std::vector<std::int32_t>> nbrs;
  for (int i = 0; i < g.n_sites(); ++i) {
    if (!g.present(i)) continue;
    sites.push_back(i);
    auto nb = g.nbrs(i);
    nbrs.emplace_back(nb.begin(), nb.end());
  }
  BlockStats stats(field, sites, nbrs);

  constexpr double kInvPhi = 0.6180339887498949;
  constexpr double kTol = 1e-6;
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = stats.eval(c), fd = stats.eval(d);
  while (b - a > kTol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = stats.eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = stats.eval(d);
    }
  }
  MpleResult r;
  r.beta = 0.5 * (a + b);
  r.at_boundary = r.beta - lo < 10 * kTol || hi - r.beta < 10 * kTol;
  return r;
}

std::string trace_csv(const ChainResult& chain) {
  std::ostringstream out;
  if (chain.has_alpha)
    out << "iteration,beta,alpha,loglik,accepted_beta,accepted_alpha\n";
  else
    out << "iteration,beta,loglik,accepted_beta\n";
  for (std::size_t it = 0; it < chain.beta.size(); ++it) {
    out << it << ',' << format_double(chain.beta[it]);
    if (chain.has_alpha) out << ',' << format_double(chain.alpha[it]);
    out << ',' << format_double(chain.loglik[it]) << ','
        << static_cast<int>(chain.accept_beta[it]);
    if (chain.has_alpha) out << ',' << static_cast<int>(chain.accept_alpha[it]);
    out << '\n';
  }
  return out.str();
}

nlohmann::json chain_summary_json(const ChainResult& chain, double level) {
  nlohmann::json j;
  const ParamSummary sb = summarize(chain.retained_beta(), level);
  j["beta"] = {{"mean", sb.mean},
               {"sd", sb.sd},
               {"ci_lo", sb.ci_lo},
               {"ci_hi", sb.ci_hi},
               {"level", level}};
  j["acceptance_beta"] = chain.acceptance_beta;
  if (chain.has_alpha) {
    const ParamSummary sa = summarize(chain.retained_alpha(), level);
    j["alpha"] = {{"mean", sa.mean},
                  {"sd", sa.sd},
                  {"ci_lo", sa.ci_lo},
                  {"ci_hi", sa.ci_hi},
                  {"level", level}};
    j["acceptance_alpha"] = chain.acceptance_alpha;
  }
  j["iterations"] = chain.beta.size();
  j["burn_in"] = chain.burn_in;
  return j;
}

}  // namespace rcoda
