#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "errors.hpp"
#include "plot.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace rlens;
using plot::Point2;
using plot::Polygon;

namespace {

bool near(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

bool near_point(Point2 p, double x, double y) { return near(p.x, x) && near(p.y, y); }

struct TestRng {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double next01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Convex point location by edge-side consistency: 1 inside, -1 outside, 0 when
// the point sits within eps of any edge line (callers skip those).
int locate(const Polygon& poly, double x, double y, double eps) {
    int want = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % poly.size()];
        const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        if (std::fabs(cross) <= eps) {
            return 0;
        }
        const int side = cross > 0.0 ? 1 : -1;
        if (want == 0) {
            want = side;
        } else if (side != want) {
            return -1;
        }
    }
    return 1;
}

plot::PlotSpec fig_spec() {
    plot::PlotSpec spec;
    spec.acc = 0.7;
    spec.points = {
        {"blue", 0.3, 0.6},
        {"control", 0.5, 0.5},
        {"purple", 0.9, 0.6},
    };
    spec.arrows = {{1, 0}, {1, 2}};
    return spec;
}

std::string data_file(const char* name) {
    const char* dir = std::getenv("RLENS_DATA_DIR");
    REQUIRE_MESSAGE(dir != nullptr, "RLENS_DATA_DIR must point at the test data directory");
    std::ifstream in(std::string(dir) + "/" + name, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing test data file: ", name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("region corners at worked accuracies") {
    const plot::RegionPair r7 = plot::region_geometry(0.7);
    REQUIRE(r7.below.size() == 4);
    CHECK(near_point(r7.below[0], 0.0, 0.3));
    CHECK(near_point(r7.below[1], 0.4, 0.7));
    CHECK(near_point(r7.below[2], 1.0, 0.7));
    CHECK(near_point(r7.below[3], 0.3, 0.0));
    REQUIRE(r7.above.size() == 3);
    CHECK(near_point(r7.above[0], 0.4, 0.7));
    CHECK(near_point(r7.above[1], 0.7, 1.0));
    CHECK(near_point(r7.above[2], 1.0, 0.7));

    const plot::RegionPair r9 = plot::region_geometry(0.9);
    CHECK(near_point(r9.below[0], 0.0, 0.1));
    CHECK(near_point(r9.below[3], 0.1, 0.0));
    CHECK(near_point(r9.above[0], 0.8, 0.9));
    CHECK(near_point(r9.above[1], 0.9, 1.0));

    CHECK_THROWS_AS(plot::region_geometry(0.5), Error);
}

TEST_CASE("guide lines trace the expectation and the matched segment") {
    const plot::GuideLines g = plot::guide_lines(0.7);
    CHECK(near_point(g.nondiscern.a, 0.0, 0.3));
    CHECK(near_point(g.nondiscern.b, 1.0, 0.7));
    CHECK(near_point(g.matched.a, 0.7, 0.4));
    CHECK(near_point(g.matched.b, 0.7, 1.0));

    const plot::GuideLines g9 = plot::guide_lines(0.9);
    CHECK(near_point(g9.matched.a, 0.9, 0.8));
    CHECK(near_point(g9.matched.b, 0.9, 1.0));
}

TEST_CASE("region membership agrees with the envelope on sampled points") {
    for (double acc : {0.55, 0.7, 0.9}) {
        const plot::RegionPair region = plot::region_geometry(acc);
        TestRng rng{static_cast<std::uint64_t>(acc * 1000.0)};
        int inside_seen = 0;
        int outside_seen = 0;
        for (int i = 0; i < 1000; ++i) {
            const double x = rng.next01();
            const double y = rng.next01();
            const Envelope env = envelope(acc, x);
            const bool outer = y >= env.lo - 1e-9 && y <= env.hi + 1e-9;
            const bool inner = y >= env.lo + 1e-9 && y <= env.hi - 1e-9;
            const int below = locate(region.below, x, y, 1e-9);
            const int above = locate(region.above, x, y, 1e-9);
            if (outer != inner || below == 0 || above == 0) {
                continue;
            }
            const bool in_region = below == 1 || above == 1;
            CHECK(in_region == outer);
            ++(in_region ? inside_seen : outside_seen);
        }
        CHECK(inside_seen > 100);
        CHECK(outside_seen > 100);
    }
}

TEST_CASE("the split line sits exactly at the AI accuracy") {
    for (double acc : {0.6, 0.7, 0.85}) {
        const plot::RegionPair region = plot::region_geometry(acc);
        TestRng rng{99ull};
        for (int i = 0; i < 500; ++i) {
            const double x = rng.next01();
            const double y = rng.next01();
            if (locate(region.above, x, y, 1e-9) == 1) {
                CHECK(y > acc);
            }
            if (locate(region.below, x, y, 1e-9) == 1) {
                CHECK(y < acc);
            }
        }
    }
}

TEST_CASE("palette strings parse by key") {
    const plot::Palette defaults = plot::palette_from_string("");
    CHECK(defaults.region_below == "#d62728");
    CHECK(defaults.region_above == "#2ca02c");
    CHECK(defaults.line == "#000000");
    CHECK(defaults.marker == "#1f77b4");

    const plot::Palette custom = plot::palette_from_string("marker=teal,below=#112233");
    CHECK(custom.marker == "teal");
    CHECK(custom.region_below == "#112233");
    CHECK(custom.region_above == "#2ca02c");

    CHECK_NOTHROW(plot::palette_from_string("line=red,"));
    CHECK_THROWS_AS(plot::palette_from_string("edge=red"), Error);
    CHECK_THROWS_AS(plot::palette_from_string("marker"), Error);
    CHECK_THROWS_AS(plot::palette_from_string("marker="), Error);
    try {
        plot::palette_from_string("edge=red");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ConfigError);
    }
}

TEST_CASE("render emits the framework layers with stable coordinates") {
    const std::string svg = plot::render(fig_spec());
    CHECK(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640.00\" "
                    "height=\"480.00\" viewBox=\"0 0 640.00 480.00\">",
                    0) == 0);
    CHECK(svg.find("id=\"region-below\" points=\"64.00,316.80 268.80,163.20 576.00,163.20 "
                   "217.60,432.00\"") != std::string::npos);
    CHECK(svg.find("id=\"region-above\" points=\"268.80,163.20 422.40,48.00 576.00,163.20\"") !=
          std::string::npos);
    CHECK(svg.find("id=\"line-nondiscern\" x1=\"64.00\" y1=\"316.80\" x2=\"576.00\" "
                   "y2=\"163.20\"") != std::string::npos);
    CHECK(svg.find("id=\"line-matched\" x1=\"422.40\" y1=\"278.40\" x2=\"422.40\" y2=\"48.00\"") !=
          std::string::npos);
    CHECK(svg.find("stroke-dasharray=\"6,4\"") != std::string::npos);
    CHECK(svg.find("id=\"pt-blue\" cx=\"217.60\" cy=\"201.60\"") != std::string::npos);
    CHECK(svg.find("id=\"pt-control\" cx=\"320.00\" cy=\"240.00\"") != std::string::npos);
    CHECK(svg.find("id=\"pt-purple\" cx=\"524.80\" cy=\"201.60\"") != std::string::npos);
    CHECK(svg.find(">control</text>") != std::string::npos);
    CHECK(svg.find("id=\"arrow-0\"") != std::string::npos);
    CHECK(svg.find("id=\"arrow-1\"") != std::string::npos);
    CHECK(svg.find("marker-end=\"url(#arrowhead)\"") != std::string::npos);
    CHECK(svg.find("id=\"axes\"") != std::string::npos);
    CHECK(svg.find(">adherence</text>") != std::string::npos);
    CHECK(svg.find(">final accuracy</text>") != std::string::npos);
    CHECK(svg.substr(svg.size() - 7) == "</svg>\n");
}

TEST_CASE("render is deterministic") {
    const std::string first = plot::render(fig_spec());
    const std::string second = plot::render(fig_spec());
    CHECK(first == second);
}

TEST_CASE("rendered bytes match the checked-in reference image") {
    CHECK(plot::render(fig_spec()) == data_file("golden_fig6.svg"));
}

TEST_CASE("point rings take the side of the region they sit in") {
    plot::PlotSpec spec;
    spec.acc = 0.7;
    spec.points = {
        {"low", 0.5, 0.5},
        {"high", 0.8, 0.75},
        {"edge", 0.8, 0.7},
    };
    const std::string svg = plot::render(spec);
    const auto ring_of = [&](const std::string& id) {
        const auto at = svg.find("id=\"pt-" + id + "\"");
        REQUIRE(at != std::string::npos);
        const auto stroke = svg.find("stroke=\"", at);
        const auto end = svg.find('"', stroke + 8);
        return svg.substr(stroke + 8, end - stroke - 8);
    };
    CHECK(ring_of("low") == "#d62728");
    CHECK(ring_of("high") == "#2ca02c");
    CHECK(ring_of("edge") == "#7f7f7f");
}

TEST_CASE("labels are escaped and ids sanitized") {
    plot::PlotSpec spec;
    spec.acc = 0.7;
    spec.points = {{"a<b & \"c\"", 0.5, 0.5}};
    const std::string svg = plot::render(spec);
    CHECK(svg.find("id=\"pt-a_b____c_\"") != std::string::npos);
    CHECK(svg.find(">a&lt;b &amp; &quot;c&quot;</text>") != std::string::npos);
    CHECK(svg.find("a<b") == std::string::npos);
}

TEST_CASE("custom palette reaches every layer") {
    plot::PlotSpec spec = fig_spec();
    spec.palette = plot::palette_from_string("below=#0a0b0c,above=#0d0e0f,line=#101112,marker=#131415");
    const std::string svg = plot::render(spec);
    CHECK(svg.find("#0a0b0c") != std::string::npos);
    CHECK(svg.find("#0d0e0f") != std::string::npos);
    CHECK(svg.find("#101112") != std::string::npos);
    CHECK(svg.find("#131415") != std::string::npos);
    CHECK(svg.find("#d62728") == std::string::npos);
}

TEST_CASE("render rejects points off the attainable region") {
    plot::PlotSpec spec;
    spec.acc = 0.7;
    spec.points = {{"stray", 0.2, 0.9}};
    try {
        plot::render(spec);
        FAIL("expected PointOutsideEnvelope");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::PointOutsideEnvelope);
        CHECK(std::string(e.what()).find("stray") != std::string::npos);
        CHECK(std::string(e.what()).find("lies outside the attainable region") !=
              std::string::npos);
    }

    spec.points = {{"edge", 0.2, 0.5}};
    CHECK_NOTHROW(plot::render(spec));
}

TEST_CASE("render rejects malformed specs") {
    plot::PlotSpec bad_acc = fig_spec();
    bad_acc.acc = 0.5;
    CHECK_THROWS_AS(plot::render(bad_acc), Error);

    plot::PlotSpec bad_canvas = fig_spec();
    bad_canvas.width = 0.0;
    CHECK_THROWS_AS(plot::render(bad_canvas), Error);

    plot::PlotSpec bad_point = fig_spec();
    bad_point.points[0].adherence = 1.2;
    CHECK_THROWS_AS(plot::render(bad_point), Error);

    plot::PlotSpec bad_arrow = fig_spec();
    bad_arrow.arrows.push_back({0, 9});
    try {
        plot::render(bad_arrow);
        FAIL("expected DomainError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::DomainError);
        CHECK(std::string(e.what()).find("arrow 2") != std::string::npos);
    }
}

TEST_CASE("a bare region renders without markers") {
    plot::PlotSpec spec;
    spec.acc = 0.8;
    const std::string svg = plot::render(spec);
    CHECK(svg.find("<circle") == std::string::npos);
    CHECK(svg.find("id=\"arrow-") == std::string::npos);
    CHECK(svg.find("id=\"region-below\"") != std::string::npos);
    CHECK(svg.find("id=\"region-above\"") != std::string::npos);
}
