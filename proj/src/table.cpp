#include "rtlab/table.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rtlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("Table: row width != header width");
  rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (size_t c = 0; c < header_.size(); ++c) {
    out += header_[c];
    out += (c + 1 < header_.size()) ? ',' : '\n';
  }
  for (const auto& row : rows_) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (std::holds_alternative<double>(row[c]))
        out += format_double(std::get<double>(row[c]));
      else if (std::holds_alternative<long long>(row[c]))
        out += std::to_string(std::get<long long>(row[c]));
      else
        out += std::get<std::string>(row[c]);
      out += (c + 1 < row.size()) ? ',' : '\n';
    }
  }
  return out;
}

void Table::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("Table: cannot open " + path);
  f << to_csv();
}

}  // namespace rtlab
