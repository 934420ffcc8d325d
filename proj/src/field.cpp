#include "rcoda/field.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rcoda/io_util.hpp"

namespace rcoda {

LabelField make_constant_field(GeometryPtr geom, int q, int state) {
  LabelField f;
  f.geom = std::move(geom);
  f.q = q;
  f.values.assign(f.geom->n_sites(), 0);
  for (int i = 0; i < f.geom->n_sites(); ++i)
    if (f.geom->present(i)) f.values[i] = static_cast<std::uint8_t>(state);
  validate_field(f);
  return f;
}

void validate_field(const LabelField& f) {
  if (!f.geom) throw std::invalid_argument("field has no geometry");
  if (f.q < 2) throw std::invalid_argument("q must be >= 2");
  if (f.q > 255) throw std::invalid_argument("q must fit in one byte");
  if (f.values.size() != static_cast<std::size_t>(f.geom->n_sites()))
    throw std::invalid_argument("field length does not match lattice size");
  for (int i = 0; i < f.geom->n_sites(); ++i) {
    if (f.geom->present(i)) {
      if (f.values[i] < 1 || f.values[i] > f.q)
        throw std::invalid_argument("field state out of range {1..q}");
    } else if (f.values[i] != 0) {
      throw std::invalid_argument("absent site carries a nonzero state");
    }
  }
}

void write_field_csv(const LabelField& f, const std::string& path) {
  std::ostringstream out;
  const auto& g = *f.geom;
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) {
      if (c) out << ',';
      out << static_cast<int>(f.values[g.index(r, c)]);
    }
    out << '\n';
  }
  write_text_file(path, out.str());
}

LabelField read_field_csv(const std::string& path, Order order, int q_hint) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<int>> grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<int> row;
    for (const auto& tok : split_csv_line(line)) row.push_back(std::stoi(tok));
    if (!grid.empty() && row.size() != grid.front().size())
      throw std::runtime_error("ragged rows in field CSV: " + path);
    grid.push_back(std::move(row));
  }
  if (grid.empty()) throw std::runtime_error("empty field CSV: " + path);
  const int rows = static_cast<int>(grid.size());
  const int cols = static_cast<int>(grid.front().size());
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(rows) * cols, 1);
  std::vector<std::uint8_t> values(static_cast<std::size_t>(rows) * cols, 0);
  int maxstate = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = grid[r][c];
      if (v < 0 || v > 255) throw std::runtime_error("state out of range in " + path);
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      if (v == 0)
        mask[i] = 0;
      else
        values[i] = static_cast<std::uint8_t>(v);
      maxstate = std::max(maxstate, v);
    }
  LabelField f;
  f.geom = build_geometry(rows, cols, order, std::move(mask));
  f.q = q_hint >= 2 ? q_hint : std::max(2, maxstate);
  f.values = std::move(values);
  validate_field(f);
  return f;
}

void write_field_binary(const LabelField& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  auto put_u32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  put_u32(static_cast<std::uint32_t>(f.geom->rows()));
  put_u32(static_cast<std::uint32_t>(f.geom->cols()));
  put_u32(static_cast<std::uint32_t>(f.q));
  out.write(reinterpret_cast<const char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

LabelField read_field_binary(const std::string& path, Order order) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  auto get_u32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated field file: " + path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
  };
  const std::uint32_t rows = get_u32(), cols = get_u32(), q = get_u32();
  if (rows < 1 || cols < 1 || q < 2 || q > 255 || rows > (1u << 20) || cols > (1u << 20))
    throw std::runtime_error("implausible field header in " + path);
  std::vector<std::uint8_t> values(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(values.size()));
  if (!in) throw std::runtime_error("truncated field payload in " + path);
  std::vector<std::uint8_t> mask(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == 0) mask[i] = 0;
  LabelField f;
  f.geom = build_geometry(static_cast<int>(rows), static_cast<int>(cols), order,
                          std::move(mask));
  f.q = static_cast<int>(q);
  f.values = std::move(values);
  validate_field(f);
  return f;
}

}  // namespace rcoda
