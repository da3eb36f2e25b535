#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "stclust/zone_map.hpp"

namespace stclust::svg {

/// Fixed categorical palette; label l is drawn with kPalette[l % 16].
inline constexpr std::array<std::string_view, 16> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173", "#3182bd"};

inline constexpr std::string_view kUnlabeledColor = "#ffffff";

/// First line after the XML prolog of every SVG; the only line allowed to
/// differ between builds.
std::string version_comment();

struct MapOptions {
    std::string title;
    int cell_pixels = 12;
};

/// One rectangle per cell, north (highest row) at the top, with a legend.
std::string render_zone_map(const ZoneMap& map, const MapOptions& options);

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

struct ScatterSeries {
    std::string name;
    std::vector<ScatterPoint> points;
};

struct ScatterOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 480;
};

std::string render_scatter(const std::vector<ScatterSeries>& series, const ScatterOptions& options);

std::string xml_escape(std::string_view text);

}  // namespace stclust::svg
