#pragma once

#include <string>
#include <variant>
#include <vector>

namespace rtlab {

// Tabular output: one header row, fixed column order, floats serialized with
// 17 significant digits so a reread round-trips exactly.
class Table {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& header() const { return header_; }
  size_t rows() const { return rows_.size(); }

  std::string to_csv() const;
  void write_csv(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);  // %.17g

}  // namespace rtlab
