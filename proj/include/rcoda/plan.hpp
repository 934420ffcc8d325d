#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "rcoda/field.hpp"
#include "rcoda/lattice.hpp"

namespace rcoda {

// A set of mutually non-adjacent sites together with, per site, the
// neighbours it is conditioned on. `nbrs_marginal` is populated only for the
// second conditioned class of a second-order level: the reduced lists that
// drop same-level class-1 neighbours (marginal-independence variant).
struct ConditionedBlock {
  std::vector<std::int32_t> sites;
  std::vector<std::vector<std::int32_t>> nbrs;
  std::vector<std::vector<std::int32_t>> nbrs_marginal;
};

struct PlanLevel {
  GeometryPtr geom;                       // lattice this level decomposes
  std::vector<ConditionedBlock> blocks;   // 1 block (first order) or 2 (second)
  std::vector<std::int32_t> remainder;    // sites carried to the next level
  std::vector<std::int32_t> remap;        // remainder[i] -> site in next geometry
};

// Recursive sublattice decomposition. levels[t].geom is the level-t lattice;
// `terminal` is the lattice left after the last split (the whole lattice when
// T = 0). Immutable after construction.
struct DecompositionPlan {
  Order order = Order::First;
  int T = 0;
  std::vector<PlanLevel> levels;
  GeometryPtr terminal;
};

// Checkerboard split: conditioned sites have odd row+col parity, the
// even-parity remainder is remapped onto the 45-degree rotated sublattice
// (embedded in its bounding rectangle with a presence mask when the rotated
// point set is not a perfect rectangle).
DecompositionPlan build_plan_first_order(const GeometryPtr& geom, int T);

// Four coding classes by (row, col) parity; classes are conditioned in the
// order class 1 = (even,even), then class 2; the remaining two classes occupy
// every other column (even levels) or row (odd levels) and are compressed
// contiguously. The axis alternation swaps the roles of classes 2 and 4
// between consecutive levels.
DecompositionPlan build_plan_second_order(const GeometryPtr& geom, int T);

DecompositionPlan build_plan(const GeometryPtr& geom, int T);

// Smallest T whose terminal lattice fits in 4x4.
int default_T(const Geometry& geom);
int default_T(const Geometry& geom, int max_dim);

// Field restricted to the level-t lattice (t = 0 returns a copy on the root
// geometry; t = T the terminal field).
LabelField restrict_to_level(const DecompositionPlan& plan, const LabelField& field,
                             int t);

nlohmann::json plan_to_json(const DecompositionPlan& plan);

}  // namespace rcoda
