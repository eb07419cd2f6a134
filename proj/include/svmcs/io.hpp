#pragma once

// CSV layout shared by grids and labeled grids:
//
//   dim,kind,count
//   2,sobol,500
//   lower,0,0
//   upper,1,1
//   x0,x1[,label]
//   <one point per row, 17 significant digits>
//
// kind is "none" for point sets that did not come from a single sequence
// (refined grids, evaluation subsets); the lower/upper rows are optional.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/grid.hpp"

namespace svmcs {

inline constexpr int csv_digits = std::numeric_limits<double>::max_digits10;

struct CsvPoints {
  std::string kind = "none";
  std::optional<Box> box;
  PointSet points;
  std::vector<Label> labels;
  bool has_labels = false;
};

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(errc::format_error,
         "line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
  }
}

inline std::size_t parse_count(const std::string& s, std::size_t line_no) {
  const double v = parse_double(s, line_no);
  if (v < 0 || v != std::floor(v))
    fail(errc::format_error, "line " + std::to_string(line_no) + ": expected a count, got " + s);
  return static_cast<std::size_t>(v);
}

inline void write_header(std::ostream& out, std::size_t dim, const std::string& kind,
                         std::size_t count, const std::optional<Box>& box, bool labeled) {
  out << "dim,kind,count\n" << dim << ',' << kind << ',' << count << '\n';
  out << std::setprecision(csv_digits);
  if (box) {
    out << "lower";
    for (double v : box->lower()) out << ',' << v;
    out << "\nupper";
    for (double v : box->upper()) out << ',' << v;
    out << '\n';
  }
  for (std::size_t k = 0; k < dim; ++k) out << (k ? "," : "") << 'x' << k;
  if (labeled) out << ",label";
  out << '\n';
}

inline void write_rows(std::ostream& out, const PointSet& pts, const std::vector<Label>* labels) {
  out << std::setprecision(csv_digits);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto p = pts[i];
    for (std::size_t k = 0; k < p.size(); ++k) out << (k ? "," : "") << p[k];
    if (labels) out << ',' << to_int((*labels)[i]);
    out << '\n';
  }
}

}  // namespace detail

inline void write_grid_csv(std::ostream& out, const Grid& grid) {
  detail::write_header(out, grid.dim(), to_string(grid.kind()), grid.count(), grid.box(), false);
  detail::write_rows(out, grid.points(), nullptr);
}

inline void write_labeled_csv(std::ostream& out, const LabeledGrid& data,
                              const std::string& kind = "none",
                              const std::optional<Box>& box = std::nullopt) {
  detail::write_header(out, data.dim(), kind, data.size(), box, true);
  detail::write_rows(out, data.points(), &data.labels());
}

inline CsvPoints read_points_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next() || detail::split_csv(line) != std::vector<std::string>{"dim", "kind", "count"})
    fail(errc::format_error, "expected header 'dim,kind,count'");
  if (!next()) fail(errc::format_error, "missing grid metadata row");
  const auto meta = detail::split_csv(line);
  if (meta.size() != 3) fail(errc::format_error, "metadata row needs dim,kind,count");
  const std::size_t dim = detail::parse_count(meta[0], line_no);
  if (dim < 1) fail(errc::format_error, "dimension must be >= 1");
  CsvPoints res;
  res.kind = meta[1];
  const std::size_t count = detail::parse_count(meta[2], line_no);
  res.points = PointSet(dim);
  res.points.reserve(count);

  if (!next()) fail(errc::format_error, "missing column header");
  auto cells = detail::split_csv(line);
  if (!cells.empty() && cells[0] == "lower") {
    point lo, hi;
    for (std::size_t k = 1; k < cells.size(); ++k) lo.push_back(detail::parse_double(cells[k], line_no));
    if (!next()) fail(errc::format_error, "missing upper row");
    cells = detail::split_csv(line);
    if (cells.empty() || cells[0] != "upper") fail(errc::format_error, "expected upper row");
    for (std::size_t k = 1; k < cells.size(); ++k) hi.push_back(detail::parse_double(cells[k], line_no));
    if (lo.size() != dim || hi.size() != dim) fail(errc::format_error, "box rows have wrong width");
    res.box = Box(std::move(lo), std::move(hi));
    if (!next()) fail(errc::format_error, "missing column header");
    cells = detail::split_csv(line);
  }
  bool labeled = false;
  if (cells.size() == dim + 1 && cells.back() == "label")
    labeled = res.has_labels = true;
  else if (cells.size() != dim)
    fail(errc::format_error, "column header has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(dim));

  point p(dim);
  while (next()) {
    cells = detail::split_csv(line);
    if (cells.size() != dim + (labeled ? 1 : 0))
      fail(errc::format_error, "line " + std::to_string(line_no) + ": wrong number of columns");
    for (std::size_t k = 0; k < dim; ++k) p[k] = detail::parse_double(cells[k], line_no);
    res.points.push_back(p);
    if (labeled) {
      const double v = detail::parse_double(cells[dim], line_no);
      if (v != 1.0 && v != -1.0)
        fail(errc::format_error, "line " + std::to_string(line_no) + ": label must be +1 or -1");
      res.labels.push_back(v > 0 ? Label::inside : Label::outside);
    }
  }
  if (res.points.size() != count)
    fail(errc::format_error, "count says " + std::to_string(count) + " points, found " +
                                 std::to_string(res.points.size()));
  return res;
}

// Grid from CSV; the box falls back to the smallest enclosing box.
inline Grid to_grid(const CsvPoints& csv) {
  SequenceKind kind = SequenceKind::sobol();
  if (csv.kind != "none") kind = parse_sequence_kind(csv.kind);
  Box box = csv.box ? *csv.box : smallest_enclosing_box(csv.points);
  for (std::size_t i = 0; i < csv.points.size(); ++i)
    if (!box.contains(csv.points[i]))
      fail(errc::format_error, "point " + std::to_string(i) + " lies outside the grid box");
  return {std::move(box), kind, csv.points};
}

inline LabeledGrid to_labeled(const CsvPoints& csv) {
  if (!csv.has_labels) fail(errc::format_error, "file has no label column");
  return {csv.points, csv.labels};
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::invalid_argument, "cannot read " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(errc::invalid_argument, "cannot write " + path);
  return out;
}

inline CsvPoints load_points_csv(const std::string& path) {
  auto in = open_input(path);
  return read_points_csv(in);
}

inline void save_grid_csv(const Grid& grid, const std::string& path) {
  auto out = open_output(path);
  write_grid_csv(out, grid);
}

inline void save_labeled_csv(const LabeledGrid& data, const std::string& path,
                             const std::string& kind = "none",
                             const std::optional<Box>& box = std::nullopt) {
  auto out = open_output(path);
  write_labeled_csv(out, data, kind, box);
}

}  // namespace svmcs
