#include "trpinn/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "trpinn/error.hpp"

namespace trpinn {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::string_view schema, int version,
                     std::initializer_list<std::string_view> columns)
    : os_(path, std::ios::trunc), columns_(columns.size()) {
    if (!os_) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    os_ << "# schema: " << schema << '/' << version << '\n';
    bool first = true;
    for (const auto c : columns) {
        if (!first) os_ << ',';
        os_ << c;
        first = false;
    }
    os_ << '\n';
}

void CsvWriter::sep() {
    if (in_row_ == columns_) {
        throw StructuralError("CSV row has too many cells");
    }
    if (in_row_ > 0) os_ << ',';
    ++in_row_;
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long long v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    sep();
    os_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw StructuralError("CSV row has " + std::to_string(in_row_) + " cells, expected " +
                              std::to_string(columns_));
    }
    os_ << '\n';
    in_row_ = 0;
}

void write_svg_chart(const std::filesystem::path& path, std::string_view title,
                     const std::vector<SvgSeries>& series, bool log_y) {
    constexpr double W = 720, H = 360, L = 60, R = 20, T = 30, B = 40;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    auto ty = [&](double y) { return log_y ? std::log10(std::max(y, 1e-300)) : y; };
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y1 = y0 + 1;
    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
    auto py = [&](double y) { return H - B - (ty(y) - y0) / (y1 - y0) * (H - T - B); };

    std::ofstream os(path, std::ios::trunc);
    if (!os) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << L << "\" y=\"18\">" << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << (W - L - R) << "\" height=\""
       << (H - T - B) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", log_y ? std::pow(10.0, y1) : y1);
    os << "<text x=\"4\" y=\"" << T + 10 << "\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", log_y ? std::pow(10.0, y0) : y0);
    os << "<text x=\"4\" y=\"" << H - B << "\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", x0);
    os << "<text x=\"" << L << "\" y=\"" << H - 20 << "\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.4g", x1);
    os << "<text x=\"" << W - R - 40 << "\" y=\"" << H - 20 << "\">" << buf << "</text>\n";
    double legend_y = T + 16;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\""
           << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 150 << "\" y=\"" << legend_y << "\" fill=\"" << s.color
           << "\">" << s.label << "</text>\n";
        legend_y += 14;
    }
    os << "</svg>\n";
}

}  // namespace trpinn
