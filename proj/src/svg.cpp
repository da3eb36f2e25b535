#include "stclust/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "stclust/version.hpp"

namespace stclust::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string color_for(std::int32_t label) {
    if (label < 0) return std::string(kUnlabeledColor);
    return std::string(kPalette[static_cast<std::size_t>(label) % kPalette.size()]);
}

// Round numbers for axis ticks.
std::vector<double> ticks(double lo, double hi, int target) {
    std::vector<double> out;
    if (!(hi > lo)) {
        out.push_back(lo);
        return out;
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) out.push_back(t);
    return out;
}

}  // namespace

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string version_comment() { return std::string("<!-- stclust ") + kVersion + " -->"; }

std::string render_zone_map(const ZoneMap& map, const MapOptions& options) {
    const auto& g = map.geometry;
    const int px = std::max(1, options.cell_pixels);
    const int title_h = options.title.empty() ? 0 : 24;
    std::set<std::int32_t> used;
    for (auto l : map.labels)
        if (l != ZoneMap::kUnlabeled) used.insert(l);

    const int map_w = static_cast<int>(g.ncols) * px;
    const int map_h = static_cast<int>(g.nrows) * px;
    const int legend_w = 110;
    const int legend_h = static_cast<int>(used.size()) * 18 + 8;
    const int width = map_w + legend_w + 20;
    const int height = title_h + std::max(map_h, legend_h) + 20;

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << version_comment() << "\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (title_h > 0)
        s << "<text x=\"10\" y=\"17\" font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(options.title)
          << "</text>\n";
    s << "<g transform=\"translate(10," << title_h + 10 << ")\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t r = 0; r < g.nrows; ++r) {
        const int y = static_cast<int>(g.nrows - 1 - r) * px;
        for (std::size_t c = 0; c < g.ncols; ++c) {
            const auto l = map.at({r, c});
            if (l == ZoneMap::kUnlabeled) continue;
            s << "<rect x=\"" << static_cast<int>(c) * px << "\" y=\"" << y << "\" width=\"" << px << "\" height=\""
              << px << "\" fill=\"" << color_for(l) << "\"/>\n";
        }
    }
    s << "<rect x=\"0\" y=\"0\" width=\"" << map_w << "\" height=\"" << map_h
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    s << "</g>\n";

    s << "<g transform=\"translate(" << map_w + 20 << "," << title_h + 10 << ")\" font-family=\"sans-serif\" "
      << "font-size=\"11\">\n";
    int row = 0;
    for (auto l : used) {
        s << "<rect x=\"0\" y=\"" << row * 18 << "\" width=\"12\" height=\"12\" fill=\"" << color_for(l) << "\"/>";
        s << "<text x=\"18\" y=\"" << row * 18 + 10 << "\">zone " << l << "</text>\n";
        ++row;
    }
    s << "</g>\n</svg>\n";
    return s.str();
}

std::string render_scatter(const std::vector<ScatterSeries>& series, const ScatterOptions& options) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& sr : series)
        for (const auto& p : sr.points) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    const auto pad = [](double& lo, double& hi) {
        const double span = hi > lo ? hi - lo : std::max(1.0, std::abs(lo));
        lo -= 0.05 * span;
        hi += 0.05 * span;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double left = 70, right = 150, top = 40, bottom = 50;
    const double pw = options.width - left - right;
    const double ph = options.height - top - bottom;
    const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    const auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n" << version_comment() << "\n";
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
      << "\" viewBox=\"0 0 " << options.width << " " << options.height << "\" font-family=\"sans-serif\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    s << "<text x=\"" << left << "\" y=\"22\" font-size=\"14\">" << xml_escape(options.title) << "</text>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (double t : ticks(xmin, xmax, 6)) {
        s << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << top + ph << "\" x2=\"" << num(sx(t)) << "\" y2=\""
          << top + ph + 5 << "\" stroke=\"#333333\"/>";
        s << "<text x=\"" << num(sx(t)) << "\" y=\"" << top + ph + 18 << "\" font-size=\"10\" text-anchor=\"middle\">"
          << num(t) << "</text>\n";
    }
    for (double t : ticks(ymin, ymax, 6)) {
        s << "<line x1=\"" << left - 5 << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << left << "\" y2=\"" << num(sy(t))
          << "\" stroke=\"#333333\"/>";
        s << "<text x=\"" << left - 8 << "\" y=\"" << num(sy(t) + 3) << "\" font-size=\"10\" text-anchor=\"end\">"
          << num(t) << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << options.height - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">" << xml_escape(options.x_label) << "</text>\n";
    s << "<text x=\"16\" y=\"" << top + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << top + ph / 2 << ")\">" << xml_escape(options.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto color = std::string(kPalette[k % kPalette.size()]);
        for (const auto& p : series[k].points) {
            s << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"4\" fill=\"" << color
              << "\"><title>" << xml_escape(series[k].name + " " + p.label) << "</title></circle>\n";
        }
        const double ly = top + 10 + 18.0 * static_cast<double>(k);
        s << "<circle cx=\"" << left + pw + 16 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << color << "\"/>";
        s << "<text x=\"" << left + pw + 26 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
          << xml_escape(series[k].name) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace stclust::svg
