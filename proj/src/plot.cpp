#include "plot.hpp"

#include "errors.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace rlens::plot {

namespace {

constexpr double kMarginFraction = 0.1;
constexpr double kBoundaryBand = kDefaultTolerance;
constexpr double kPointRadius = 5.0;
const char* const kNeutralColor = "#7f7f7f";
const char* const kAxisColor = "#666666";
const char* const kTextColor = "#333333";

/// Fixed two-decimal formatting via integer math, immune to locale settings.
std::string fmt2(double v) {
    long long scaled = std::llround(v * 100.0);
    const char* sign = "";
    if (scaled < 0) {
        sign = "-";
        scaled = -scaled;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", sign, scaled / 100, scaled % 100);
    return buf;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string id_safe(std::string_view label) {
    std::string out;
    out.reserve(label.size());
    for (const char c : label) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                          (c >= '0' && c <= '9') || c == '_' || c == '-';
        out += keep ? c : '_';
    }
    return out;
}

/// Affine map from the unit square to the canvas, 10% margins on every side,
/// y axis flipped for screen coordinates.
class Mapper {
public:
    Mapper(double width, double height)
        : x0_(kMarginFraction * width), y0_(kMarginFraction * height),
          xs_((1.0 - 2.0 * kMarginFraction) * width),
          ys_((1.0 - 2.0 * kMarginFraction) * height), height_(height) {}

    double px(double x) const { return x0_ + x * xs_; }
    double py(double y) const { return height_ - (y0_ + y * ys_); }

private:
    double x0_, y0_, xs_, ys_, height_;
};

std::string polygon_points(const Polygon& poly, const Mapper& map) {
    std::string out;
    for (const auto& p : poly) {
        if (!out.empty()) {
            out += ' ';
        }
        out += fmt2(map.px(p.x)) + ',' + fmt2(map.py(p.y));
    }
    return out;
}

void append_line(std::string& svg, const std::string& id, const Mapper& map, Point2 a, Point2 b,
                 const std::string& extra_attrs) {
    svg += "  <line id=\"" + id + "\" x1=\"" + fmt2(map.px(a.x)) + "\" y1=\"" +
           fmt2(map.py(a.y)) + "\" x2=\"" + fmt2(map.px(b.x)) + "\" y2=\"" + fmt2(map.py(b.y)) +
           "\" " + extra_attrs + "/>\n";
}

void append_axes(std::string& svg, const Mapper& map) {
    svg += "  <g id=\"axes\" stroke=\"" + std::string(kAxisColor) +
           "\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "    <line x1=\"" + fmt2(map.px(0)) + "\" y1=\"" + fmt2(map.py(0)) + "\" x2=\"" +
           fmt2(map.px(1)) + "\" y2=\"" + fmt2(map.py(0)) + "\"/>\n";
    svg += "    <line x1=\"" + fmt2(map.px(0)) + "\" y1=\"" + fmt2(map.py(0)) + "\" x2=\"" +
           fmt2(map.px(0)) + "\" y2=\"" + fmt2(map.py(1)) + "\"/>\n";
    for (int pct = 0; pct <= 100; pct += 25) {
        const double t = pct / 100.0;
        svg += "    <line x1=\"" + fmt2(map.px(t)) + "\" y1=\"" + fmt2(map.py(0)) + "\" x2=\"" +
               fmt2(map.px(t)) + "\" y2=\"" + fmt2(map.py(0) + 4.0) + "\"/>\n";
        svg += "    <line x1=\"" + fmt2(map.px(0)) + "\" y1=\"" + fmt2(map.py(t)) + "\" x2=\"" +
               fmt2(map.px(0) - 4.0) + "\" y2=\"" + fmt2(map.py(t)) + "\"/>\n";
    }
    svg += "  </g>\n";
    svg += "  <g id=\"axis-labels\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
           std::string(kTextColor) + "\">\n";
    for (int pct = 0; pct <= 100; pct += 25) {
        const double t = pct / 100.0;
        svg += "    <text x=\"" + fmt2(map.px(t)) + "\" y=\"" + fmt2(map.py(0) + 18.0) +
               "\" text-anchor=\"middle\">" + std::to_string(pct) + "%</text>\n";
        svg += "    <text x=\"" + fmt2(map.px(0) - 8.0) + "\" y=\"" + fmt2(map.py(t) + 4.0) +
               "\" text-anchor=\"end\">" + std::to_string(pct) + "%</text>\n";
    }
    svg += "    <text x=\"" + fmt2(map.px(0.5)) + "\" y=\"" + fmt2(map.py(0) + 36.0) +
           "\" text-anchor=\"middle\">adherence</text>\n";
    svg += "    <text x=\"" + fmt2(map.px(0) - 44.0) + "\" y=\"" + fmt2(map.py(0.5)) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 " + fmt2(map.px(0) - 44.0) + " " +
           fmt2(map.py(0.5)) + ")\">final accuracy</text>\n";
    svg += "  </g>\n";
}

} // namespace

Palette palette_from_string(std::string_view text) {
    Palette palette;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const std::string_view item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) {
            continue;
        }
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::ConfigError,
                        "palette entry '" + std::string(item) + "' is not of the form key=color");
        }
        const std::string_view key = item.substr(0, eq);
        const std::string value(item.substr(eq + 1));
        if (value.empty()) {
            throw Error(Errc::ConfigError,
                        "palette entry '" + std::string(item) + "' has an empty color");
        }
        if (key == "below") {
            palette.region_below = value;
        } else if (key == "above") {
            palette.region_above = value;
        } else if (key == "line") {
            palette.line = value;
        } else if (key == "marker") {
            palette.marker = value;
        } else {
            throw Error(Errc::ConfigError,
                        "unknown palette key '" + std::string(key) +
                            "' (expected below, above, line, or marker)");
        }
    }
    return palette;
}

RegionPair region_geometry(double acc) {
    require_ai_accuracy(acc);
    RegionPair region;
    region.below = {{0.0, 1.0 - acc}, {2.0 * acc - 1.0, acc}, {1.0, acc}, {1.0 - acc, 0.0}};
    region.above = {{2.0 * acc - 1.0, acc}, {acc, 1.0}, {1.0, acc}};
    return region;
}

GuideLines guide_lines(double acc) {
    require_ai_accuracy(acc);
    GuideLines lines;
    lines.nondiscern = {{0.0, 1.0 - acc}, {1.0, acc}};
    const Envelope env = envelope(acc, acc);
    lines.matched = {{acc, env.lo}, {acc, env.hi}};
    return lines;
}

std::string render(const PlotSpec& spec) {
    require_ai_accuracy(spec.acc);
    if (!(spec.width > 0.0) || !(spec.height > 0.0) || !std::isfinite(spec.width) ||
        !std::isfinite(spec.height)) {
        throw Error(Errc::DomainError, "canvas width and height must be positive");
    }
    for (const auto& p : spec.points) {
        const std::string adherence_what = "point '" + p.label + "' adherence";
        require_unit_interval(p.adherence, adherence_what.c_str());
        const std::string accuracy_what = "point '" + p.label + "' final accuracy";
        require_unit_interval(p.final_accuracy, accuracy_what.c_str());
        const Envelope env = envelope(spec.acc, p.adherence);
        if (!env.contains(p.final_accuracy)) {
            throw Error(Errc::PointOutsideEnvelope,
                        "point '" + p.label + "' (adherence " + fmt2(p.adherence) +
                            ", final accuracy " + fmt2(p.final_accuracy) +
                            ") lies outside the attainable region for AI accuracy " +
                            fmt2(spec.acc));
        }
    }
    for (std::size_t i = 0; i < spec.arrows.size(); ++i) {
        const auto& arrow = spec.arrows[i];
        if (arrow.from >= spec.points.size() || arrow.to >= spec.points.size()) {
            throw Error(Errc::DomainError,
                        "arrow " + std::to_string(i) + " references a point index out of range (" +
                            std::to_string(spec.points.size()) + " points)");
        }
    }

    const Mapper map(spec.width, spec.height);
    const RegionPair region = region_geometry(spec.acc);
    const GuideLines guides = guide_lines(spec.acc);
    const Palette& pal = spec.palette;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(spec.width) +
           "\" height=\"" + fmt2(spec.height) + "\" viewBox=\"0 0 " + fmt2(spec.width) + " " +
           fmt2(spec.height) + "\">\n";
    svg += "  <defs>\n"
           "    <marker id=\"arrowhead\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" "
           "refY=\"3\" orient=\"auto\">\n"
           "      <path d=\"M0,0 L7,3 L0,6 Z\" fill=\"" +
           xml_escape(pal.line) +
           "\"/>\n"
           "    </marker>\n"
           "  </defs>\n";
    append_axes(svg, map);
    svg += "  <polygon id=\"region-below\" points=\"" + polygon_points(region.below, map) +
           "\" fill=\"" + xml_escape(pal.region_below) + "\" fill-opacity=\"0.30\" stroke=\"" +
           xml_escape(pal.region_below) + "\" stroke-width=\"1\"/>\n";
    svg += "  <polygon id=\"region-above\" points=\"" + polygon_points(region.above, map) +
           "\" fill=\"" + xml_escape(pal.region_above) + "\" fill-opacity=\"0.30\" stroke=\"" +
           xml_escape(pal.region_above) + "\" stroke-width=\"1\"/>\n";
    append_line(svg, "line-nondiscern", map, guides.nondiscern.a, guides.nondiscern.b,
                "stroke=\"" + xml_escape(pal.line) + "\" stroke-width=\"2\"");
    append_line(svg, "line-matched", map, guides.matched.a, guides.matched.b,
                "stroke=\"" + xml_escape(pal.region_above) +
                    "\" stroke-width=\"2\" stroke-dasharray=\"6,4\"");
    for (const auto& p : spec.points) {
        std::string ring = kNeutralColor;
        if (p.final_accuracy > spec.acc + kBoundaryBand) {
            ring = pal.region_above;
        } else if (p.final_accuracy < spec.acc - kBoundaryBand) {
            ring = pal.region_below;
        }
        svg += "  <circle id=\"pt-" + id_safe(p.label) + "\" cx=\"" + fmt2(map.px(p.adherence)) +
               "\" cy=\"" + fmt2(map.py(p.final_accuracy)) + "\" r=\"" + fmt2(kPointRadius) +
               "\" fill=\"" + xml_escape(pal.marker) + "\" stroke=\"" + xml_escape(ring) +
               "\" stroke-width=\"2\"/>\n";
    }
    for (const auto& p : spec.points) {
        svg += "  <text x=\"" + fmt2(map.px(p.adherence) + 8.0) + "\" y=\"" +
               fmt2(map.py(p.final_accuracy) - 8.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
               std::string(kTextColor) + "\">" + xml_escape(p.label) + "</text>\n";
    }
    for (std::size_t i = 0; i < spec.arrows.size(); ++i) {
        const auto& arrow = spec.arrows[i];
        const auto& from = spec.points[arrow.from];
        const auto& to = spec.points[arrow.to];
        double x1 = map.px(from.adherence);
        double y1 = map.py(from.final_accuracy);
        double x2 = map.px(to.adherence);
        double y2 = map.py(to.final_accuracy);
        const double dx = x2 - x1;
        const double dy = y2 - y1;
        const double len = std::sqrt(dx * dx + dy * dy);
        if (len > kPointRadius) {
            const double trim = (kPointRadius + 2.0) / len;
            x2 -= dx * trim;
            y2 -= dy * trim;
            x1 += dx * trim;
            y1 += dy * trim;
        }
        svg += "  <line id=\"arrow-" + std::to_string(i) + "\" x1=\"" + fmt2(x1) + "\" y1=\"" +
               fmt2(y1) + "\" x2=\"" + fmt2(x2) + "\" y2=\"" + fmt2(y2) + "\" stroke=\"" +
               xml_escape(pal.line) +
               "\" stroke-width=\"1.5\" marker-end=\"url(#arrowhead)\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace rlens::plot
