#include "rcoda/potts.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numeric>

#include "rcoda/parallel.hpp"

namespace rcoda {

void validate_model(const PottsModel& m) {
  if (!m.geom) throw std::invalid_argument("model has no geometry");
  if (m.q < 2) throw std::invalid_argument("q must be >= 2");
  if (!(m.beta >= 0.0) || !std::isfinite(m.beta))
    throw std::invalid_argument("beta must be finite and >= 0");
}

std::int64_t bond_count(const LabelField& f) {
  validate_field(f);
  const Geometry& g = *f.geom;
  std::int64_t u = 0;
  for (int i = 0; i < g.n_sites(); ++i) {
    if (!g.present(i)) continue;
    const std::uint8_t zi = f.values[i];
    for (int j : g.nbrs(i))
      if (j > i && f.values[j] == zi) ++u;
  }
  return u;
}

LabelField gibbs_sample(const PottsModel& m, int sweeps, RngSeed seed,
                        const LabelField* initial) {
  validate_model(m);
  if (sweeps < 1) throw std::invalid_argument("sweeps must be >= 1");
  const Geometry& g = *m.geom;
  const int q = m.q;

  LabelField f;
  if (initial) {
    validate_field(*initial);
    if (!initial->geom->same_shape(g) || initial->q != q)
      throw std::invalid_argument("initial field does not match model");
    f = *initial;
  } else {
    f.geom = m.geom;
    f.q = q;
    f.values.assign(g.n_sites(), 0);
  }

  Rng rng(seed);
  if (!initial) {
    for (int i = 0; i < g.n_sites(); ++i)
      if (g.present(i)) f.values[i] = static_cast<std::uint8_t>(1 + rng.uniform_int(q));
  }

  // neighbour counts are bounded by the stencil size
  std::array<double, 9> expb;
  for (int k = 0; k <= 8; ++k) expb[k] = std::exp(m.beta * k);
  std::vector<double> w(q);
  std::vector<int> counts(q);

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int i = 0; i < g.n_sites(); ++i) {
      if (!g.present(i)) continue;
      std::fill(counts.begin(), counts.end(), 0);
      for (int j : g.nbrs(i)) ++counts[f.values[j] - 1];
      double wsum = 0.0;
      for (int c = 0; c < q; ++c) wsum += (w[c] = expb[counts[c]]);
      assert(wsum >= static_cast<double>(q) - 1e-9);  // proper distribution
      f.values[i] = static_cast<std::uint8_t>(1 + rng.categorical(w.data(), q, wsum));
    }
  }
  return f;
}

namespace {

constexpr std::int64_t kEnumStateCap = 1 << 24;
constexpr int kTransferMaxWidth = 12;
constexpr std::int64_t kTransferStateCap = 1594323;  // 3^13

// q^k with overflow guard against the caps above
std::int64_t pow_capped(int q, int k, std::int64_t cap) {
  std::int64_t p = 1;
  for (int i = 0; i < k; ++i) {
    p *= q;
    if (p > cap) return cap + 1;
  }
  return p;
}

int window_len(const Geometry& g) {
  return g.cols() + (g.order() == Order::Second ? 1 : 0);
}

// Forward elimination in raster order. The state is the base-q encoding of
// the last W site labels (low digit = most recent); each new site interacts
// only with labels still inside that window:
//   left     1 step back          (digit 0)
//   up-right cols-1 steps back    (digit cols-2, second order)
//   up       cols steps back      (digit cols-1)
//   up-left  cols+1 steps back    (digit cols, second order)
// Absent sites push digit 0 and contribute no bonds.
double transfer_log_constant_impl(const Geometry& g, int q, double beta) {
  const int rows = g.rows(), cols = g.cols();
  const bool second = g.order() == Order::Second;
  const int W = window_len(g);
  const std::int64_t nstates = pow_capped(q, W, kTransferStateCap);
  std::int64_t keep = 1;  // q^(W-1)
  for (int i = 0; i < W - 1; ++i) keep *= q;
  std::int64_t d_upright = 1, d_up = 1;
  for (int i = 0; i < cols - 2; ++i) d_upright *= q;
  d_up = cols >= 2 ? d_upright * q : 1;
  const std::int64_t d_upleft = second ? d_up * q : 0;

  std::vector<double> weights(nstates, 0.0), next(nstates, 0.0);
  weights[0] = 1.0;
  double log_scale = 0.0;
  std::array<double, 5> expb;
  for (int k = 0; k <= 4; ++k) expb[k] = std::exp(beta * k);

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const bool here = g.present(g.index(r, c));
      const bool has_left = here && c > 0 && g.present(g.index(r, c - 1));
      const bool has_up = here && r > 0 && g.present(g.index(r - 1, c));
      const bool has_ul =
          here && second && r > 0 && c > 0 && g.present(g.index(r - 1, c - 1));
      const bool has_ur = here && second && r > 0 && c + 1 < cols &&
                          g.present(g.index(r - 1, c + 1));
      std::fill(next.begin(), next.end(), 0.0);
      for (std::int64_t s = 0; s < nstates; ++s) {
        const double ws = weights[s];
        if (ws == 0.0) continue;
        const std::int64_t shifted = (s % keep) * q;
        if (!here) {
          next[shifted] += ws;
          continue;
        }
        const int lab_left = static_cast<int>(s % q);
        const int lab_ur = static_cast<int>((s / d_upright) % q);
        const int lab_up = static_cast<int>((s / d_up) % q);
        const int lab_ul = second ? static_cast<int>((s / d_upleft) % q) : -1;
        for (int lab = 0; lab < q; ++lab) {
          int bonds = 0;
          if (has_left && lab == lab_left) ++bonds;
          if (has_up && lab == lab_up) ++bonds;
          if (has_ul && lab == lab_ul) ++bonds;
          if (has_ur && lab == lab_ur) ++bonds;
          next[shifted + lab] += ws * expb[bonds];
        }
      }
      weights.swap(next);
    }
    // renormalize once per row to keep weights in range at large beta
    const double m = *std::max_element(weights.begin(), weights.end());
    if (m > 0.0) {
      for (double& wv : weights) wv /= m;
      log_scale += std::log(m);
    }
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  return std::log(total) + log_scale;
}

}  // namespace

bool enumeration_feasible(const Geometry& g, int q) {
  return pow_capped(q, g.n_present(), kEnumStateCap) <= kEnumStateCap;
}

bool transfer_feasible(const Geometry& g, int q) {
  const int width = std::min(g.rows(), g.cols());
  const int W = width + (g.order() == Order::Second ? 1 : 0);
  return width <= kTransferMaxWidth &&
         pow_capped(q, W, kTransferStateCap) <= kTransferStateCap;
}

double enumeration_log_constant(const Geometry& g, int q, double beta) {
  if (!enumeration_feasible(g, q))
    throw CapacityError("enumeration backend needs q^n_present <= " +
                        std::to_string(kEnumStateCap) + " (lattice has " +
                        std::to_string(g.n_present()) + " sites, q=" +
                        std::to_string(q) + ")");
  std::vector<int> sites;
  for (int i = 0; i < g.n_sites(); ++i)
    if (g.present(i)) sites.push_back(i);
  const int n = static_cast<int>(sites.size());
  std::vector<int> pos(g.n_sites(), -1);
  for (int k = 0; k < n; ++k) pos[sites[k]] = k;

  // unordered present edges
  std::vector<std::pair<int, int>> edges;
  for (int i : sites)
    for (int j : g.nbrs(i))
      if (j > i) edges.emplace_back(pos[i], pos[j]);

  std::int64_t nstates = 1;
  for (int k = 0; k < n; ++k) nstates *= q;

  // accumulate the histogram of U over all states, then one exp per bin
  std::vector<double> hist(edges.size() + 1, 0.0);
  std::vector<int> z(n, 0);
  for (std::int64_t s = 0;; ++s) {
    int u = 0;
    for (const auto& [a, b] : edges) u += z[a] == z[b];
    hist[u] += 1.0;
    if (s + 1 >= nstates) break;
    for (int k = 0;; ++k) {
      if (++z[k] < q) break;
      z[k] = 0;
    }
  }
  const int umax = static_cast<int>(edges.size());
  double total = 0.0;
  for (int u = 0; u <= umax; ++u)
    if (hist[u] > 0.0) total += hist[u] * std::exp(beta * (u - umax));
  return std::log(total) + beta * umax;
}

double transfer_log_constant(const Geometry& g, int q, double beta) {
  if (!transfer_feasible(g, q))
    throw CapacityError("transfer backend needs min(rows,cols) <= " +
                        std::to_string(kTransferMaxWidth) + " and q^window <= " +
                        std::to_string(kTransferStateCap) + " (lattice is " +
                        std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                        ", q=" + std::to_string(q) + ")");
  if (g.cols() > g.rows()) {
    auto t = transpose_geometry(g);
    return transfer_log_constant_impl(*t, q, beta);
  }
  return transfer_log_constant_impl(g, q, beta);
}

double exact_log_constant(const PottsModel& m) {
  validate_model(m);
  const Geometry& g = *m.geom;
  if (transfer_feasible(g, m.q)) return transfer_log_constant(g, m.q, m.beta);
  if (enumeration_feasible(g, m.q)) return enumeration_log_constant(g, m.q, m.beta);
  throw CapacityError(
      "lattice too large for exact likelihood: transfer needs min(rows,cols) <= " +
      std::to_string(kTransferMaxWidth) + " with q^window <= " +
      std::to_string(kTransferStateCap) + "; enumeration needs q^n_present <= " +
      std::to_string(kEnumStateCap));
}

double exact_log_likelihood(const LabelField& f, const PottsModel& m) {
  validate_field(f);
  validate_model(m);
  if (!f.geom->same_shape(*m.geom) || f.q != m.q)
    throw std::invalid_argument("field does not match model");
  return m.beta * static_cast<double>(bond_count(f)) - exact_log_constant(m);
}

std::vector<BondsPoint> expected_bonds_curve(const GeometryPtr& geom, int q,
                                             const std::vector<double>& beta_grid,
                                             int sweeps, int burn_in, RngSeed seed,
                                             int workers) {
  if (!geom) throw std::invalid_argument("no geometry");
  if (beta_grid.empty() || beta_grid.front() != 0.0)
    throw std::invalid_argument("beta grid must start at 0");
  for (std::size_t k = 1; k < beta_grid.size(); ++k)
    if (!(beta_grid[k] > beta_grid[k - 1]))
      throw std::invalid_argument("beta grid must be strictly increasing");
  if (sweeps < 2 || burn_in < 0 || burn_in >= sweeps)
    throw std::invalid_argument("need burn_in < sweeps and sweeps >= 2");

  std::vector<BondsPoint> out(beta_grid.size());
  parallel_for(static_cast<int>(beta_grid.size()), workers, [&](int k) {
    const double beta = beta_grid[k];
    PottsModel m{geom, q, beta};
    LabelField cur;
    cur.geom = geom;
    cur.q = q;
    cur.values.assign(geom->n_sites(), 0);
    {
      Rng init_rng(derive_seed(seed, k, 0));
      for (int i = 0; i < geom->n_sites(); ++i)
        if (geom->present(i))
          cur.values[i] = static_cast<std::uint8_t>(1 + init_rng.uniform_int(q));
    }
    if (burn_in > 0) cur = gibbs_sample(m, burn_in, derive_seed(seed, k, 2), &cur);
    const int keep = sweeps - burn_in;
    std::vector<double> us(keep);
    for (int s = 0; s < keep; ++s) {
      cur = gibbs_sample(m, 1, derive_seed(seed, k, 1, s), &cur);
      us[s] = static_cast<double>(bond_count(cur));
    }
    const double mean = std::accumulate(us.begin(), us.end(), 0.0) / keep;

    // batch means soak up the sweep-to-sweep autocorrelation
    const int nbatch = std::clamp(keep / 10, 2, 30);
    const int bsize = keep / nbatch;
    double var_bm = 0.0;
    for (int b = 0; b < nbatch; ++b) {
      double bm = 0.0;
      for (int s = b * bsize; s < (b + 1) * bsize; ++s) bm += us[s];
      bm /= bsize;
      var_bm += (bm - mean) * (bm - mean);
    }
    var_bm /= (nbatch - 1);
    out[k] = {beta, mean, std::sqrt(var_bm / nbatch)};
  });
  return out;
}

}  // namespace rcoda
