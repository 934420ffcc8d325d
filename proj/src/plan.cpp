#include "rcoda/plan.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace rcoda {

namespace {

constexpr int kMaxLevels = 64;

struct SplitResult {
  PlanLevel level;
  GeometryPtr next;
};

// One checkerboard split of `geom`. Conditioned: present sites with odd
// row+col parity. Remainder: even-parity sites, remapped by the rotation
// u = (r+c)/2, v = (r-c)/2 shifted to non-negative coordinates; original
// diagonal pairs land on first-order neighbouring cells of the new rectangle.
SplitResult split_first_order(const GeometryPtr& geom) {
  const Geometry& g = *geom;
  PlanLevel level;
  level.geom = geom;
  ConditionedBlock block;

  int umin = std::numeric_limits<int>::max(), vmin = umin;
  int umax = std::numeric_limits<int>::min(), vmax = umax;
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      const int site = g.index(r, c);
      if (!g.present(site)) continue;
      if ((r + c) % 2 == 1) {
        block.sites.push_back(site);
        auto nb = g.nbrs(site);
        block.nbrs.emplace_back(nb.begin(), nb.end());
      } else {
        level.remainder.push_back(site);
        const int u = (r + c) / 2, v = (r - c) / 2;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
  }
  if (level.remainder.empty()) return {std::move(level), nullptr};

  const int rows2 = umax - umin + 1, cols2 = vmax - vmin + 1;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(rows2) * cols2, 0);
  level.remap.reserve(level.remainder.size());
  for (int site : level.remainder) {
    const int r = g.row_of(site), c = g.col_of(site);
    const int u = (r + c) / 2 - umin, v = (r - c) / 2 - vmin;
    const int target = u * cols2 + v;
    mask[target] = 1;
    level.remap.push_back(target);
  }
  level.blocks.push_back(std::move(block));
  auto next = build_geometry(rows2, cols2, Order::First, std::move(mask));
  return {std::move(level), std::move(next)};
}

// One coding-method split of `geom`. halve_cols selects the axis: the
// remainder is the odd columns (or odd rows), compressed contiguously. The
// two conditioned classes are (even,even) and, within the kept axis, the
// other even-coordinate class.
SplitResult split_second_order(const GeometryPtr& geom, bool halve_cols) {
  const Geometry& g = *geom;
  PlanLevel level;
  level.geom = geom;
  ConditionedBlock class1, class2;

  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      const int site = g.index(r, c);
      if (!g.present(site)) continue;
      const bool re = r % 2 == 0, ce = c % 2 == 0;
      const bool in_remainder = halve_cols ? !ce : !re;
      if (in_remainder) {
        level.remainder.push_back(site);
        continue;
      }
      auto nb = g.nbrs(site);
      if (re && ce) {
        class1.sites.push_back(site);
        class1.nbrs.emplace_back(nb.begin(), nb.end());
      } else {
        class2.sites.push_back(site);
        class2.nbrs.emplace_back(nb.begin(), nb.end());
        // marginal variant: drop conditioning on same-level class 1
        std::vector<std::int32_t> reduced;
        for (int j : nb) {
          if (g.row_of(j) % 2 == 0 && g.col_of(j) % 2 == 0) continue;
          reduced.push_back(j);
        }
        class2.nbrs_marginal.push_back(std::move(reduced));
      }
    }
  }
  if (level.remainder.empty()) return {std::move(level), nullptr};

  const int rows2 = halve_cols ? g.rows() : g.rows() / 2;
  const int cols2 = halve_cols ? g.cols() / 2 : g.cols();
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(rows2) * cols2, 0);
  level.remap.reserve(level.remainder.size());
  for (int site : level.remainder) {
    const int r = g.row_of(site), c = g.col_of(site);
    const int target = halve_cols ? r * cols2 + (c - 1) / 2 : ((r - 1) / 2) * cols2 + c;
    mask[target] = 1;
    level.remap.push_back(target);
  }
  level.blocks.push_back(std::move(class1));
  level.blocks.push_back(std::move(class2));
  auto next = build_geometry(rows2, cols2, Order::Second, std::move(mask));
  return {std::move(level), std::move(next)};
}

SplitResult split_level(const GeometryPtr& geom, int t) {
  if (geom->order() == Order::First) return split_first_order(geom);
  return split_second_order(geom, t % 2 == 0);
}

DecompositionPlan build_plan_impl(const GeometryPtr& geom, int T, Order order) {
  if (!geom) throw std::invalid_argument("plan requires a geometry");
  if (geom->order() != order)
    throw std::invalid_argument("plan order does not match geometry order");
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  if (T > kMaxLevels) throw std::invalid_argument("T exceeds supported depth");

  DecompositionPlan plan;
  plan.order = order;
  plan.T = T;
  plan.terminal = geom;
  GeometryPtr current = geom;
  for (int t = 0; t < T; ++t) {
    SplitResult s = split_level(current, t);
    if (!s.next)
      throw std::invalid_argument("T=" + std::to_string(T) +
                                  " leaves an empty remainder; maximum feasible T is " +
                                  std::to_string(t));
    current = s.next;
    plan.levels.push_back(std::move(s.level));
    plan.terminal = current;
  }
  return plan;
}

}  // namespace rcoda::(anonymous)

DecompositionPlan build_plan_first_order(const GeometryPtr& geom, int T) {
  return build_plan_impl(geom, T, Order::First);
}

DecompositionPlan build_plan_second_order(const GeometryPtr& geom, int T) {
  return build_plan_impl(geom, T, Order::Second);
}

DecompositionPlan build_plan(const GeometryPtr& geom, int T) {
  return build_plan_impl(geom, T, geom ? geom->order() : Order::First);
}

int default_T(const Geometry& geom) { return default_T(geom, 4); }

int default_T(const Geometry& geom, int max_dim) {
  GeometryPtr current =
      build_geometry(geom.rows(), geom.cols(), geom.order(), geom.mask());
  for (int t = 0; t <= kMaxLevels; ++t) {
    if (current->rows() <= max_dim && current->cols() <= max_dim) return t;
    SplitResult s = split_level(current, t);
    if (!s.next) return t;
    current = s.next;
  }
  return kMaxLevels;
}

LabelField restrict_to_level(const DecompositionPlan& plan, const LabelField& field,
                             int t) {
  if (t < 0 || t > plan.T) throw std::invalid_argument("level out of range");
  validate_field(field);
  if (!plan.levels.empty() && !field.geom->same_shape(*plan.levels.front().geom))
    throw std::invalid_argument("field does not match plan geometry");
  if (plan.levels.empty() && !field.geom->same_shape(*plan.terminal))
    throw std::invalid_argument("field does not match plan geometry");

  LabelField cur = field;
  for (int lev = 0; lev < t; ++lev) {
    const PlanLevel& L = plan.levels[lev];
    const GeometryPtr& next =
        lev + 1 < plan.T ? plan.levels[lev + 1].geom : plan.terminal;
    LabelField out;
    out.geom = next;
    out.q = field.q;
    out.values.assign(next->n_sites(), 0);
    for (std::size_t i = 0; i < L.remainder.size(); ++i)
      out.values[L.remap[i]] = cur.values[L.remainder[i]];
    cur = std::move(out);
  }
  return cur;
}

nlohmann::json plan_to_json(const DecompositionPlan& plan) {
  nlohmann::json j;
  j["order"] = order_name(plan.order);
  j["T"] = plan.T;
  auto site_rc = [](const Geometry& g, int site) {
    return nlohmann::json::array({g.row_of(site), g.col_of(site)});
  };
  nlohmann::json levels = nlohmann::json::array();
  for (const PlanLevel& L : plan.levels) {
    nlohmann::json jl;
    jl["rows"] = L.geom->rows();
    jl["cols"] = L.geom->cols();
    jl["n_present"] = L.geom->n_present();
    nlohmann::json blocks = nlohmann::json::array();
    for (const ConditionedBlock& b : L.blocks) {
      nlohmann::json jb;
      jb["size"] = b.sites.size();
      nlohmann::json sites = nlohmann::json::array();
      for (int s : b.sites) sites.push_back(site_rc(*L.geom, s));
      jb["sites"] = std::move(sites);
      blocks.push_back(std::move(jb));
    }
    jl["conditioned_blocks"] = std::move(blocks);
    nlohmann::json rem = nlohmann::json::array();
    for (int s : L.remainder) rem.push_back(site_rc(*L.geom, s));
    jl["remainder"] = std::move(rem);
    levels.push_back(std::move(jl));
  }
  j["levels"] = std::move(levels);
  j["terminal"] = {{"rows", plan.terminal->rows()},
                   {"cols", plan.terminal->cols()},
                   {"n_present", plan.terminal->n_present()}};
  return j;
}

}  // namespace rcoda
