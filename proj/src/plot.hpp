#pragma once

#include "core.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rlens::plot {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Polygon = std::vector<Point2>;

struct Segment {
    Point2 a;
    Point2 b;
};

/// The attainable region in (adherence, final accuracy) coordinates, split by
/// the horizontal line at the AI accuracy into an impairment part (below) and
/// a complementarity part (above).
struct RegionPair {
    Polygon below;
    Polygon above;
};

struct GuideLines {
    Segment nondiscern;
    Segment matched;
};

struct Palette {
    std::string region_below = "#d62728";
    std::string region_above = "#2ca02c";
    std::string line = "#000000";
    std::string marker = "#1f77b4";
};

/// Parses "below=COLOR,above=COLOR,line=COLOR,marker=COLOR" (any subset, any
/// order; empty string keeps defaults). Unknown keys raise ConfigError.
Palette palette_from_string(std::string_view text);

struct PlotPoint {
    std::string label;
    double adherence = 0.0;
    double final_accuracy = 0.0;
};

/// Directed intervention arrow between two points, by index into PlotSpec::points.
struct Arrow {
    std::size_t from = 0;
    std::size_t to = 0;
};

struct PlotSpec {
    double acc = 0.0;
    std::vector<PlotPoint> points;
    std::vector<Arrow> arrows;
    double width = 640.0;
    double height = 480.0;
    Palette palette;
};

/// Region corners: the full quadrilateral is (0, 1-acc), (acc, 1), (1, acc),
/// (1-acc, 0). The split line sits at final accuracy = acc; the "above"
/// triangle is (2*acc-1, acc), (acc, 1), (1, acc); "below" is the rest.
RegionPair region_geometry(double acc);

/// Non-discernment expectation from (0, 1-acc) to (1, acc), and the vertical
/// matched-adherence segment at A = acc clipped to the region.
GuideLines guide_lines(double acc);

/// Renders the framework as standalone SVG 1.1. Deterministic: identical
/// specs yield identical bytes. Throws PointOutsideEnvelope when a point's
/// final accuracy leaves its envelope, DomainError for bad inputs.
std::string render(const PlotSpec& spec);

} // namespace rlens::plot
