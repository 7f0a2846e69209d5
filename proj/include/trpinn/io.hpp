#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace trpinn {

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

/// CSV file whose first line is "# schema: <name>/<version>" followed by a
/// header row. Doubles are written with format_double so repeated runs give
/// byte-identical files.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, std::string_view schema, int version,
              std::initializer_list<std::string_view> columns);

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(std::string_view v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
    void end_row();
    void flush() { os_.flush(); }

  private:
    void sep();

    std::ofstream os_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

/// Minimal SVG line chart, one polyline per series.
struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

void write_svg_chart(const std::filesystem::path& path, std::string_view title,
                     const std::vector<SvgSeries>& series, bool log_y = false);

}  // namespace trpinn
