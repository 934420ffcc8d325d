#include "rcoda/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rcoda/io_util.hpp"

namespace rcoda {

namespace {

// beta * s_own - log sum_c exp(beta * s_c); counts are tiny integers
double site_term(double beta, int s_own, const int* counts, int q) {
  int cmax = 0;
  for (int c = 0; c < q; ++c) cmax = std::max(cmax, counts[c]);
  double lse = 0.0;
  for (int c = 0; c < q; ++c) lse += std::exp(beta * (counts[c] - cmax));
  return beta * s_own - (beta * cmax + std::log(lse));
}

}  // namespace

double conditional_block_loglik(const LabelField& field,
                                std::span<const std::int32_t> sites,
                                const std::vector<std::vector<std::int32_t>>& nbrs,
                                double beta_eff) {
  if (sites.size() != nbrs.size())
    throw std::invalid_argument("sites/neighbour lists size mismatch");
  const int q = field.q;
  std::vector<int> counts(q);
  double total = 0.0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const int i = sites[k];
    const std::uint8_t zi = field.values[i];
    if (zi < 1 || zi > q) throw std::invalid_argument("field/plan mismatch at site");
    std::fill(counts.begin(), counts.end(), 0);
    for (int j : nbrs[k]) ++counts[field.values[j] - 1];
    total += site_term(beta_eff, counts[zi - 1], counts.data(), q);
  }
  return total;
}

double pseudo_loglik(const LabelField& field, double beta) {
  validate_field(field);
  const Geometry& g = *field.geom;
  const int q = field.q;
  std::vector<int> counts(q);
  double total = 0.0;
  for (int i = 0; i < g.n_sites(); ++i) {
    if (!g.present(i)) continue;
    std::fill(counts.begin(), counts.end(), 0);
    for (int j : g.nbrs(i)) ++counts[field.values[j] - 1];
    total += site_term(beta, counts[field.values[i] - 1], counts.data(), q);
  }
  return total;
}

BlockStats::BlockStats(const LabelField& field, std::span<const std::int32_t> sites,
                       const std::vector<std::vector<std::int32_t>>& nbrs) {
  if (sites.size() != nbrs.size())
    throw std::invalid_argument("sites/neighbour lists size mismatch");
  q_ = field.q;
  n_sites_ = static_cast<int>(sites.size());
  std::map<std::vector<std::uint8_t>, double> patterns;
  std::vector<std::uint8_t> key(q_ + 1);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    std::fill(key.begin(), key.end(), 0);
    for (int j : nbrs[k]) ++key[field.values[j]];  // key[1..q] = counts
    key[0] = key[field.values[sites[k]]];          // neighbours in own state
    patterns[key] += 1.0;
  }
  mult_.reserve(patterns.size());
  s_own_.reserve(patterns.size());
  counts_.reserve(patterns.size() * q_);
  for (const auto& [k, m] : patterns) {
    mult_.push_back(m);
    s_own_.push_back(k[0]);
    counts_.insert(counts_.end(), k.begin() + 1, k.end());
  }
}

double BlockStats::eval(double beta_eff) const {
  double total = 0.0;
  const int q = q_;
  for (std::size_t p = 0; p < mult_.size(); ++p) {
    const std::uint8_t* cnt = counts_.data() + p * q;
    int cmax = 0;
    for (int c = 0; c < q; ++c) cmax = std::max<int>(cmax, cnt[c]);
    double lse = 0.0;
    for (int c = 0; c < q; ++c) lse += std::exp(beta_eff * (cnt[c] - cmax));
    total += mult_[p] * (beta_eff * s_own_[p] - beta_eff * cmax - std::log(lse));
  }
  return total;
}

RcodaEvaluator::RcodaEvaluator(const LabelField& field, const DecompositionPlan& plan,
                               RcodaOptions options, SecondVariant variant)
    : order_(plan.order), T_(plan.T), q_(field.q), options_(options) {
  validate_field(field);
  const GeometryPtr& root =
      plan.levels.empty() ? plan.terminal : plan.levels.front().geom;
  if (!field.geom->same_shape(*root))
    throw std::invalid_argument("field does not match plan geometry");

  LabelField cur = field;
  for (int t = 0; t < T_; ++t) {
    const PlanLevel& L = plan.levels[t];
    std::vector<BlockStats> stats;
    if (order_ == Order::First) {
      stats.emplace_back(cur, L.blocks[0].sites, L.blocks[0].nbrs);
    } else {
      stats.emplace_back(cur, L.blocks[0].sites, L.blocks[0].nbrs);
      const ConditionedBlock& c2 = L.blocks[1];
      stats.emplace_back(cur, c2.sites,
                         variant == SecondVariant::Marginal ? c2.nbrs_marginal
                                                            : c2.nbrs);
    }
    level_stats_.push_back(std::move(stats));

    const GeometryPtr& next = t + 1 < T_ ? plan.levels[t + 1].geom : plan.terminal;
    LabelField nf;
    nf.geom = next;
    nf.q = cur.q;
    nf.values.assign(next->n_sites(), 0);
    for (std::size_t i = 0; i < L.remainder.size(); ++i)
      nf.values[L.remap[i]] = cur.values[L.remainder[i]];
    cur = std::move(nf);
  }
  terminal_geom_ = plan.terminal;
  terminal_u_ = bond_count(cur);

  if (options_.terminal == TerminalMode::Exact) {
    // fail now rather than mid-chain if the terminal is out of reach
    PottsModel probe{terminal_geom_, q_, 0.0};
    exact_log_constant(probe);
  }
}

double RcodaEvaluator::eval(double beta, double alpha) const {
  double beta_eff = beta;
  double total = 0.0;
  for (const auto& stats : level_stats_) {
    for (const BlockStats& b : stats) total += b.eval(beta_eff);
    beta_eff *= alpha;
  }
  double beta_term = beta;
  if (T_ > 0) {
    const int e = options_.exponent == TerminalExponent::PowTminusOne ? T_ - 1 : T_;
    beta_term = std::pow(alpha, e) * beta;
  }
  if (options_.terminal == TerminalMode::Independent) {
    total -= terminal_geom_->n_present() * std::log(static_cast<double>(q_));
  } else {
    total += beta_term * static_cast<double>(terminal_u_) -
             exact_log_constant(PottsModel{terminal_geom_, q_, beta_term});
  }
  return total;
}

namespace {

void check_params(const LabelField& field, const ModelParams& params,
                  const DecompositionPlan& plan, Order expected) {
  if (plan.order != expected)
    throw std::invalid_argument(std::string("plan is not ") + order_name(expected) +
                                " order");
  if (params.order != expected)
    throw std::invalid_argument("params order does not match variant");
  if (params.T != plan.T) throw std::invalid_argument("params.T does not match plan");
  if (params.q != field.q) throw std::invalid_argument("params.q does not match field");
  if (params.alpha < 0.0 || params.alpha > 1.0)
    throw std::invalid_argument("alpha must lie in [0,1]");
  if (!(params.beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
}

}  // namespace

double rcoda_loglik_first(const LabelField& field, const ModelParams& params,
                          const DecompositionPlan& plan, RcodaOptions options) {
  check_params(field, params, plan, Order::First);
  RcodaEvaluator ev(field, plan, options);
  return ev.eval(params.beta, params.alpha);
}

double rcoda_loglik_second(const LabelField& field, const ModelParams& params,
                           const DecompositionPlan& plan, SecondVariant variant,
                           RcodaOptions options) {
  check_params(field, params, plan, Order::Second);
  RcodaEvaluator ev(field, plan, options, variant);
  return ev.eval(params.beta, params.alpha);
}

// ---------------------------------------------------------------------------

double TdiTable::interpolate(double b) const {
  if (beta.empty()) throw std::out_of_range("empty table");
  if (b < beta.front() || b > beta.back())
    throw std::out_of_range("beta outside table range [" +
                            format_double(beta.front()) + ", " +
                            format_double(beta.back()) + "]");
  const auto it = std::lower_bound(beta.begin(), beta.end(), b);
  std::size_t hi = static_cast<std::size_t>(it - beta.begin());
  if (hi == 0) return logc.front();
  if (beta[hi] == b) return logc[hi];
  const std::size_t lo = hi - 1;
  const double w = (b - beta[lo]) / (beta[hi] - beta[lo]);
  return logc[lo] + w * (logc[hi] - logc[lo]);
}

double TdiTable::se_at(double b) const {
  const auto it = std::lower_bound(beta.begin(), beta.end(), b);
  std::size_t hi = static_cast<std::size_t>(it - beta.begin());
  if (hi >= beta.size()) hi = beta.size() - 1;
  if (hi == 0) return se.front();
  const std::size_t lo = hi - 1;
  return std::max(se[lo], se[hi]);
}

bool TdiTable::covers(double lo, double hi) const {
  return !beta.empty() && beta.front() <= lo && hi <= beta.back();
}

bool TdiTable::matches(const Geometry& g, int q_) const {
  return rows == g.rows() && cols == g.cols() && q == q_ && order == g.order() &&
         geometry_hash == hash_hex(fnv1a_hash(g.descriptor()));
}

TdiTable build_tdi_table(const GeometryPtr& geom, int q,
                         const std::vector<double>& beta_grid,
                         const TdiMcSettings& mc, RngSeed seed, int workers) {
  if (beta_grid.empty() || beta_grid.front() != 0.0)
    throw std::invalid_argument("TDI grid must start at 0");
  const auto curve =
      expected_bonds_curve(geom, q, beta_grid, mc.sweeps, mc.burn_in, seed, workers);

  TdiTable t;
  t.rows = geom->rows();
  t.cols = geom->cols();
  t.q = q;
  t.order = geom->order();
  t.geometry_hash = hash_hex(fnv1a_hash(geom->descriptor()));
  const std::size_t n = beta_grid.size();
  t.beta = beta_grid;
  t.logc.resize(n);
  t.se.resize(n);
  t.logc[0] = geom->n_present() * std::log(static_cast<double>(q));
  t.se[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double db = beta_grid[k] - beta_grid[k - 1];
    t.logc[k] = t.logc[k - 1] + db * 0.5 * (curve[k].mean_u + curve[k - 1].mean_u);
    // trapezoid weight of point j inside the integral up to grid point k
    double var = 0.0;
    for (std::size_t j = 0; j <= k; ++j) {
      double w;
      if (j == 0)
        w = 0.5 * (beta_grid[1] - beta_grid[0]);
      else if (j == k)
        w = 0.5 * (beta_grid[k] - beta_grid[k - 1]);
      else
        w = 0.5 * (beta_grid[j + 1] - beta_grid[j - 1]);
      var += (w * curve[j].se_u) * (w * curve[j].se_u);
    }
    t.se[k] = std::sqrt(var);
  }
  return t;
}

void save_tdi_table(const TdiTable& t, const std::string& path) {
  std::ostringstream out;
  out << "# tdi-table v1\n";
  out << "# rows: " << t.rows << "\n# cols: " << t.cols << "\n# q: " << t.q << "\n";
  out << "# order: " << order_name(t.order) << "\n";
  out << "# geometry_hash: " << t.geometry_hash << "\n";
  out << "beta,logC,se\n";
  for (std::size_t k = 0; k < t.beta.size(); ++k)
    out << format_double(t.beta[k]) << ',' << format_double(t.logc[k]) << ','
        << format_double(t.se[k]) << '\n';
  write_text_file(path, out.str());
}

TdiTable load_tdi_table(const std::string& path) {
  std::istringstream in(read_text_file(path));
  TdiTable t;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key;
      ls >> key;
      if (key == "rows:") ls >> t.rows;
      else if (key == "cols:") ls >> t.cols;
      else if (key == "q:") ls >> t.q;
      else if (key == "order:") {
        std::string o;
        ls >> o;
        t.order = order_from_name(o);
      } else if (key == "geometry_hash:") {
        ls >> t.geometry_hash;
      }
      continue;
    }
    if (!header_seen) {  // column header
      header_seen = true;
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.size() != 3) throw std::runtime_error("malformed table row in " + path);
    t.beta.push_back(std::stod(cells[0]));
    t.logc.push_back(std::stod(cells[1]));
    t.se.push_back(std::stod(cells[2]));
  }
  if (t.beta.empty()) throw std::runtime_error("empty TDI table: " + path);
  return t;
}

double tdi_loglik(const LabelField& field, double beta, const TdiTable& table) {
  validate_field(field);
  if (!table.matches(*field.geom, field.q))
    throw std::invalid_argument(
        "TDI table was built for a different lattice or q (table " +
        std::to_string(table.rows) + "x" + std::to_string(table.cols) +
        " q=" + std::to_string(table.q) + ")");
  return beta * static_cast<double>(bond_count(field)) - table.interpolate(beta);
}

// ---------------------------------------------------------------------------

const char* backend_name(BackendKind k) {
  switch (k) {
    case BackendKind::Exact: return "exact";
    case BackendKind::PL: return "pl";
    case BackendKind::Rcoda: return "rcoda";
    case BackendKind::RcodaM: return "rcoda-m";
    case BackendKind::RcodaC: return "rcoda-c";
    case BackendKind::Tdi: return "tdi";
  }
  return "?";
}

BackendKind backend_from_name(const std::string& name) {
  if (name == "exact") return BackendKind::Exact;
  if (name == "pl") return BackendKind::PL;
  if (name == "rcoda") return BackendKind::Rcoda;
  if (name == "rcoda-m") return BackendKind::RcodaM;
  if (name == "rcoda-c") return BackendKind::RcodaC;
  if (name == "tdi") return BackendKind::Tdi;
  throw std::invalid_argument("unknown backend: " + name);
}

namespace {

class ExactBackend final : public BetaLikelihood {
 public:
  explicit ExactBackend(const LabelField& field)
      : geom_(field.geom), q_(field.q), u_(bond_count(field)) {
    exact_log_constant(PottsModel{geom_, q_, 0.0});  // capacity check up front
  }
  double log_lik(double beta, double) const override {
    return beta * static_cast<double>(u_) -
           exact_log_constant(PottsModel{geom_, q_, beta});
  }
  std::string name() const override { return "exact"; }

 private:
  GeometryPtr geom_;
  int q_;
  std::int64_t u_;
};

class PlBackend final : public BetaLikelihood {
 public:
  explicit PlBackend(const LabelField& field) {
    const Geometry& g = *field.geom;
    std::vector<std::int32_t> sites;
    std::vector<std::vector<std::int32_t>> nbrs;
    for (int i = 0; i < g.n_sites(); ++i) {
      if (!g.present(i)) continue;
      sites.push_back(i);
      auto nb = g.nbrs(i);
      nbrs.emplace_back(nb.begin(), nb.end());
    }
    stats_ = BlockStats(field, sites, nbrs);
  }
  double log_lik(double beta, double) const override { return stats_.eval(beta); }
  std::string name() const override { return "pl"; }

 private:
  BlockStats stats_;
};

class RcodaBackend final : public BetaLikelihood {
 public:
  RcodaBackend(const LabelField& field, const BackendSpec& spec, SecondVariant variant,
               std::string label)
      : label_(std::move(label)) {
    const int T = spec.T >= 0 ? spec.T : default_T(*field.geom);
    plan_ = build_plan(field.geom, T);
    ev_ = std::make_unique<RcodaEvaluator>(field, plan_, spec.rcoda, variant);
  }
  double log_lik(double beta, double alpha) const override {
    return ev_->eval(beta, alpha);
  }
  bool uses_alpha() const override { return ev_->T() > 0; }
  std::string name() const override { return label_; }

 private:
  std::string label_;
  DecompositionPlan plan_;
  std::unique_ptr<RcodaEvaluator> ev_;
};

class TdiBackend final : public BetaLikelihood {
 public:
  TdiBackend(const LabelField& field, const TdiTable& table)
      : table_(table), u_(bond_count(field)) {
    if (!table.matches(*field.geom, field.q))
      throw std::invalid_argument("TDI table does not match the field's lattice/q");
  }
  double log_lik(double beta, double) const override {
    return beta * static_cast<double>(u_) - table_.interpolate(beta);
  }
  std::string name() const override { return "tdi"; }

 private:
  const TdiTable& table_;
  std::int64_t u_;
};

}  // namespace

std::unique_ptr<BetaLikelihood> make_backend(const LabelField& field,
                                             const BackendSpec& spec) {
  validate_field(field);
  const Order order = field.geom->order();
  switch (spec.kind) {
    case BackendKind::Exact:
      return std::make_unique<ExactBackend>(field);
    case BackendKind::PL:
      return std::make_unique<PlBackend>(field);
    case BackendKind::Rcoda:
      if (order != Order::First)
        throw std::invalid_argument(
            "backend 'rcoda' needs a first-order lattice; use rcoda-m or rcoda-c");
      return std::make_unique<RcodaBackend>(field, spec, SecondVariant::Conditional,
                                            "rcoda");
    case BackendKind::RcodaM:
      if (order != Order::Second)
        throw std::invalid_argument("backend 'rcoda-m' needs a second-order lattice");
      return std::make_unique<RcodaBackend>(field, spec, SecondVariant::Marginal,
                                            "rcoda-m");
    case BackendKind::RcodaC:
      if (order != Order::Second)
        throw std::invalid_argument("backend 'rcoda-c' needs a second-order lattice");
      return std::make_unique<RcodaBackend>(field, spec, SecondVariant::Conditional,
                                            "rcoda-c");
    case BackendKind::Tdi:
      if (!spec.table) throw std::invalid_argument("tdi backend needs a table");
      return std::make_unique<TdiBackend>(field, *spec.table);
  }
  throw std::invalid_argument("unknown backend kind");
}

}  // namespace rcoda
