#include "rcoda/lattice.hpp"

#include <array>
#include <stdexcept>

#include "rcoda/io_util.hpp"

namespace rcoda {

const char* order_name(Order o) {
  return o == Order::First ? "first" : "second";
}

Order order_from_name(const std::string& name) {
  if (name == "first") return Order::First;
  if (name == "second") return Order::Second;
  throw std::invalid_argument("unknown neighbourhood order: " + name);
}

namespace {
// first four entries are the first-order stencil, the rest the diagonals
constexpr std::array<std::array<int, 2>, 8> kStencil = {
    {{-1, 0}, {0, -1}, {0, 1}, {1, 0}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}}};
}  // namespace

Geometry::Geometry(int rows, int cols, Order order)
    : Geometry(rows, cols, order,
               std::vector<std::uint8_t>(
                   static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 1)) {}

Geometry::Geometry(int rows, int cols, Order order, std::vector<std::uint8_t> present)
    : rows_(rows), cols_(cols), order_(order), present_(std::move(present)) {
  if (rows_ < 1 || cols_ < 1)
    throw std::invalid_argument("lattice dimensions must be positive");
  if (present_.size() != static_cast<std::size_t>(n_sites()))
    throw std::invalid_argument("presence mask size does not match lattice");
  build_neighbours();
}

void Geometry::build_neighbours() {
  const int n = n_sites();
  const int stencil_size = order_ == Order::First ? 4 : 8;
  nbr_off_.assign(n + 1, 0);
  nbr_flat_.clear();
  nbr_flat_.reserve(static_cast<std::size_t>(n) * stencil_size);
  n_present_ = 0;
  edge_count_ = 0;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const int site = index(r, c);
      if (present_[site]) {
        ++n_present_;
        for (int k = 0; k < stencil_size; ++k) {
          const int rr = r + kStencil[k][0];
          const int cc = c + kStencil[k][1];
          if (rr < 0 || rr >= rows_ || cc < 0 || cc >= cols_) continue;
          const int j = index(rr, cc);
          if (!present_[j]) continue;
          nbr_flat_.push_back(j);
          if (j > site) ++edge_count_;
        }
      }
      nbr_off_[site + 1] = static_cast<std::int32_t>(nbr_flat_.size());
    }
  }
}

std::string Geometry::descriptor() const {
  std::string d = std::string(order_name(order_)) + " " + std::to_string(rows_) +
                  "x" + std::to_string(cols_);
  if (full()) {
    d += " full";
  } else {
    std::string bits(present_.begin(), present_.end());
    d += " mask=" + hash_hex(fnv1a_hash(bits)) + "/" + std::to_string(n_present_);
  }
  return d;
}

bool Geometry::same_shape(const Geometry& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && order_ == other.order_ &&
         present_ == other.present_;
}

GeometryPtr build_geometry(int rows, int cols, Order order) {
  return std::make_shared<const Geometry>(rows, cols, order);
}

GeometryPtr build_geometry(int rows, int cols, Order order,
                           std::vector<std::uint8_t> present) {
  return std::make_shared<const Geometry>(rows, cols, order, std::move(present));
}

GeometryPtr transpose_geometry(const Geometry& g) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(g.n_sites()));
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c)
      mask[static_cast<std::size_t>(c) * g.rows() + r] =
          g.mask()[static_cast<std::size_t>(r) * g.cols() + c];
  return build_geometry(g.cols(), g.rows(), g.order(), std::move(mask));
}

}  // namespace rcoda
