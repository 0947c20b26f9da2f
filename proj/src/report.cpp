#include "qcf/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qcf/errors.hpp"

namespace qcf {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_g17(row[i]);
        }
        out << '\n';
    }
    return out.str();
}

std::string fnv64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open for writing: " + path);
    f << content;
    if (!f) throw ValidationError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

namespace {

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string svg_line_chart_logy(const std::string& title, const std::string& xlabel,
                                const std::string& ylabel, const std::vector<double>& x,
                                const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw ValidationError("chart data size mismatch");

    const double width = 640.0, height = 480.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 55.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = x.front(), xmax = x.front();
    double lymin = 0.0, lymax = 0.0;
    bool have_y = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        if (y[i] > 0.0) {
            const double ly = std::log10(y[i]);
            if (!have_y) {
                lymin = lymax = ly;
                have_y = true;
            } else {
                lymin = std::min(lymin, ly);
                lymax = std::max(lymax, ly);
            }
        }
    }
    if (!have_y) {
        lymin = -1.0;
        lymax = 0.0;
    }
    lymin = std::floor(lymin);
    lymax = std::ceil(lymax);
    if (xmax <= xmin) xmax = xmin + 1.0;
    if (lymax <= lymin) lymax = lymin + 1.0;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ly) { return mt + (lymax - ly) / (lymax - lymin) * ph; };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
    s << "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
    s << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";

    // axes
    s << "<line x1=\"" << fmt1(ml) << "\" y1=\"" << fmt1(mt) << "\" x2=\"" << fmt1(ml)
      << "\" y2=\"" << fmt1(mt + ph) << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << fmt1(ml) << "\" y1=\"" << fmt1(mt + ph) << "\" x2=\""
      << fmt1(ml + pw) << "\" y2=\"" << fmt1(mt + ph) << "\" stroke=\"black\"/>\n";

    // y ticks at integer decades
    for (int d = int(lymin); d <= int(lymax); ++d) {
        const double yy = py(d);
        s << "<line x1=\"" << fmt1(ml - 5.0) << "\" y1=\"" << fmt1(yy) << "\" x2=\""
          << fmt1(ml + pw) << "\" y2=\"" << fmt1(yy)
          << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
        s << "<text x=\"" << fmt1(ml - 8.0) << "\" y=\"" << fmt1(yy + 4.0)
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
          << "</text>\n";
    }
    // x ticks: 5 evenly spaced
    for (int i = 0; i <= 4; ++i) {
        const double v = xmin + (xmax - xmin) * i / 4.0;
        const double xx = px(v);
        s << "<line x1=\"" << fmt1(xx) << "\" y1=\"" << fmt1(mt + ph) << "\" x2=\"" << fmt1(xx)
          << "\" y2=\"" << fmt1(mt + ph + 5.0) << "\" stroke=\"black\"/>\n";
        s << "<text x=\"" << fmt1(xx) << "\" y=\"" << fmt1(mt + ph + 20.0)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt3(v)
          << "</text>\n";
    }

    s << "<text x=\"" << fmt1(ml + pw / 2.0) << "\" y=\"" << fmt1(height - 12.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
      << "</text>\n";
    s << "<text x=\"18\" y=\"" << fmt1(mt + ph / 2.0)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 "
      << fmt1(mt + ph / 2.0) << ")\">" << ylabel << "</text>\n";

    s << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (y[i] <= 0.0) continue;
        if (!first) s << ' ';
        s << fmt3(px(x[i])) << ',' << fmt3(py(std::log10(y[i])));
        first = false;
    }
    s << "\"/>\n</svg>\n";
    return s.str();
}

}  // namespace qcf
