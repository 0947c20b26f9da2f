#ifndef QCF_REPORT_HPP
#define QCF_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qcf {

/// Full-precision float formatting ("%.17g") so CSV diffs are exact.
std::string format_g17(double v);

/// One CSV table: header row plus %.17g-formatted data rows.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

/// FNV-1a 64-bit hash of a byte string, as fixed-width hex.
std::string fnv64_hex(const std::string& bytes);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Self-contained SVG line chart with a log10 y axis (for error curves).
std::string svg_line_chart_logy(const std::string& title, const std::string& xlabel,
                                const std::string& ylabel, const std::vector<double>& x,
                                const std::vector<double>& y);

}  // namespace qcf

#endif
