#pragma once

// Minimal static SVG line charts for the scenario outputs.  The plots are a
// convenience view of the CSV data; the CSV remains the authoritative
// artifact, so emission failures are reported by return value and never
// abort a run.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace blochtherm {

struct SvgSeries {
    std::string name;
    std::vector<double> x, y;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

/// Tick spacing: largest of {1,2,5}*10^k not exceeding range/4.
inline double nice_tick(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 4.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {5.0, 2.0, 1.0})
        if (m * mag <= raw) return m * mag;
    return mag;
}

}  // namespace detail

inline bool write_line_chart(const std::filesystem::path& path, const std::string& title,
                             const std::string& xlabel, const std::string& ylabel,
                             const std::vector<SvgSeries>& series) {
    static const char* palette[] = {"#c0392b", "#2457a8", "#1e8449", "#8e44ad",
                                    "#d68910", "#148f95"};

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax || ymin > ymax) return false;
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double pad_y = 0.06 * (ymax - ymin);
    ymin -= pad_y;
    ymax += pad_y;

    const double width = 800, height = 560;
    const double ml = 86, mr = 24, mt = 46, mb = 64;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    const auto py = [&](double y) {
        return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb);
    };

    std::ofstream f(path, std::ios::binary);
    if (!f) return false;
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
      << "\" font-family=\"Helvetica, Arial, sans-serif\">\n"
      << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // axes frame
    f << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << width - ml - mr
      << "\" height=\"" << height - mt - mb << "\" fill=\"none\" stroke=\"#444\"/>\n";

    const double tx = detail::nice_tick(xmax - xmin);
    for (double x = std::ceil(xmin / tx) * tx; x <= xmax + 1e-9 * tx; x += tx) {
        f << "<line x1=\"" << px(x) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(x) << "\" y2=\""
          << py(ymin) + 5 << "\" stroke=\"#444\"/>\n";
        f << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 22
          << "\" font-size=\"13\" text-anchor=\"middle\">" << detail::svg_num(x) << "</text>\n";
    }
    const double ty = detail::nice_tick(ymax - ymin);
    for (double y = std::ceil(ymin / ty) * ty; y <= ymax + 1e-9 * ty; y += ty) {
        f << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
          << py(y) << "\" stroke=\"#444\"/>\n";
        f << "<text x=\"" << ml - 9 << "\" y=\"" << py(y) + 4
          << "\" font-size=\"13\" text-anchor=\"end\">" << detail::svg_num(y) << "</text>\n";
    }

    int color = 0;
    for (const auto& s : series) {
        f << "<polyline fill=\"none\" stroke=\"" << palette[color % 6]
          << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            f << detail::svg_num(px(s.x[i])) << "," << detail::svg_num(py(s.y[i])) << " ";
        }
        f << "\"/>\n";
        ++color;
    }

    // legend
    double ly = mt + 16;
    color = 0;
    for (const auto& s : series) {
        f << "<line x1=\"" << width - mr - 150 << "\" y1=\"" << ly << "\" x2=\""
          << width - mr - 120 << "\" y2=\"" << ly << "\" stroke=\"" << palette[color % 6]
          << "\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << width - mr - 112 << "\" y=\"" << ly + 4 << "\" font-size=\"13\">"
          << s.name << "</text>\n";
        ly += 18;
        ++color;
    }

    f << "<text x=\"" << 0.5 * width << "\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">"
      << title << "</text>\n";
    f << "<text x=\"" << 0.5 * width << "\" y=\"" << height - 18
      << "\" font-size=\"14\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    f << "<text x=\"20\" y=\"" << 0.5 * height
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << 0.5 * height
      << ")\">" << ylabel << "</text>\n";
    f << "</svg>\n";
    return static_cast<bool>(f);
}

}  // namespace blochtherm
