#ifndef BLUE_SVG_PLOT_HPP
#define BLUE_SVG_PLOT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace blue {

/// Minimal line/scatter SVG renderer for the sweep CSVs; no external plotting
/// dependency. Axes may be log10-scaled.
struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

struct PlotSpec {
    std::string title, x_label, y_label;
    bool log_x = false, log_y = false;
    int width = 640, height = 440;
};

inline void write_svg_plot(const std::string& path, const PlotSpec& spec,
                           const std::vector<PlotSeries>& series) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series)
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
            xmin = std::min(xmin, tx(s.x[i])); xmax = std::max(xmax, tx(s.x[i]));
            ymin = std::min(ymin, ty(s.y[i])); ymax = std::max(ymax, ty(s.y[i]));
        }
    if (!(xmin < xmax)) { xmin -= 1; xmax += 1; }
    if (!(ymin < ymax)) { ymin -= 1; ymax += 1; }
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    const double pw = spec.width - ml - mr, ph = spec.height - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - ymin) / (ymax - ymin) * ph; };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open plot file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << spec.title << "</text>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 10
        << "\" text-anchor=\"middle\" font-size=\"12\">" << spec.x_label << "</text>\n"
        << "<text x=\"15\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 15 "
        << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";
    // axis extent labels
    auto axis_label = [&](double v, bool log_scaled) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", log_scaled ? std::pow(10.0, v) : v);
        return std::string(buf);
    };
    out << "<text x=\"" << ml << "\" y=\"" << mt + ph + 16 << "\" font-size=\"10\">"
        << axis_label(xmin, spec.log_x) << "</text>\n"
        << "<text x=\"" << ml + pw << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"end\" font-size=\"10\">"
        << axis_label(xmax, spec.log_x) << "</text>\n"
        << "<text x=\"" << ml - 4 << "\" y=\"" << mt + ph << "\" text-anchor=\"end\" font-size=\"10\">"
        << axis_label(ymin, spec.log_y) << "</text>\n"
        << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10 << "\" text-anchor=\"end\" font-size=\"10\">"
        << axis_label(ymax, spec.log_y) << "</text>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* col = colors[si % 6];
        out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "\"/>\n";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if ((spec.log_x && s.x[i] <= 0) || (spec.log_y && s.y[i] <= 0)) continue;
            out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << col
                << "\"/>\n";
        }
        out << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 14 + 14 * static_cast<double>(si)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << col << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace blue

#endif // BLUE_SVG_PLOT_HPP
