#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uavcov::svg {

// Header-indexed view of a simple CSV (no quoting).
class CsvTable {
 public:
  static CsvTable parse(std::string_view text);

  std::size_t rows() const { return cells_.size(); }
  const std::string& at(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;

 private:
  std::map<std::string, std::size_t> columns_;
  std::vector<std::vector<std::string>> cells_;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional symmetric error bars
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
};

std::string line_chart(const Axes& axes, const std::vector<Series>& series);

// values[g][s]: bar for series s in group g.
std::string grouped_bar_chart(const Axes& axes, const std::vector<std::string>& groups,
                              const std::vector<std::string>& series_names,
                              const std::vector<std::vector<double>>& values);

}  // namespace uavcov::svg
