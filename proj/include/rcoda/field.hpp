#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcoda/lattice.hpp"

namespace rcoda {

// Discrete label field z over a lattice, states in {1..q}. Absent sites hold 0.
struct LabelField {
  GeometryPtr geom;
  int q = 2;
  std::vector<std::uint8_t> values;

  std::uint8_t at(int site) const { return values[site]; }
  std::uint8_t& at(int site) { return values[site]; }
};

LabelField make_constant_field(GeometryPtr geom, int q, int state = 1);

// throws std::invalid_argument on geometry/value mismatch
void validate_field(const LabelField& f);

// CSV: one row per lattice row, comma-separated states, absent sites as 0.
void write_field_csv(const LabelField& f, const std::string& path);
// q is taken as the maximum state present unless q_hint >= 2 is given.
LabelField read_field_csv(const std::string& path, Order order, int q_hint = 0);

// Binary: header of three little-endian uint32 (rows, cols, q), then one
// byte per site in row-major order.
void write_field_binary(const LabelField& f, const std::string& path);
LabelField read_field_binary(const std::string& path, Order order);

}  // namespace rcoda
