#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rcoda {

enum class Order { First, Second };

const char* order_name(Order o);
Order order_from_name(const std::string& name);

// Regular 2D lattice with free boundaries and an optional site-presence mask.
// Masked geometries arise as the remapped remainder sublattices of a
// decomposition; absent sites have no neighbours and carry no field value.
// Immutable after construction, safe to share across threads.
class Geometry {
 public:
  Geometry(int rows, int cols, Order order);
  Geometry(int rows, int cols, Order order, std::vector<std::uint8_t> present);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Order order() const { return order_; }
  int n_sites() const { return rows_ * cols_; }
  int n_present() const { return n_present_; }
  bool full() const { return n_present_ == n_sites(); }

  int index(int r, int c) const { return r * cols_ + c; }
  int row_of(int site) const { return site / cols_; }
  int col_of(int site) const { return site % cols_; }
  bool present(int site) const { return present_[site] != 0; }
  const std::vector<std::uint8_t>& mask() const { return present_; }

  std::span<const std::int32_t> nbrs(int site) const {
    return {nbr_flat_.data() + nbr_off_[site],
            static_cast<std::size_t>(nbr_off_[site + 1] - nbr_off_[site])};
  }

  // number of unordered neighbour pairs among present sites
  std::int64_t edge_count() const { return edge_count_; }

  // e.g. "first 4x4 full" or "second 4x3 mask=1a2b..."; stable identity used
  // to fingerprint cached tables against the lattice they were built for
  std::string descriptor() const;

  bool same_shape(const Geometry& other) const;

 private:
  void build_neighbours();

  int rows_, cols_;
  Order order_;
  std::vector<std::uint8_t> present_;
  std::vector<std::int32_t> nbr_off_;
  std::vector<std::int32_t> nbr_flat_;
  int n_present_ = 0;
  std::int64_t edge_count_ = 0;
};

using GeometryPtr = std::shared_ptr<const Geometry>;

GeometryPtr build_geometry(int rows, int cols, Order order);
GeometryPtr build_geometry(int rows, int cols, Order order,
                           std::vector<std::uint8_t> present);

// Same sites and mask with rows/cols swapped (both stencils are symmetric
// under transposition, so bond structure is preserved).
GeometryPtr transpose_geometry(const Geometry& g);

}  // namespace rcoda
