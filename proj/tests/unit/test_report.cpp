#include "doctest.h"
#include "stclust/error.hpp"
#include "stclust/report.hpp"
#include "stclust/svg.hpp"
#include "support.hpp"

using namespace stclust;
using testing::planar;
using testing::TempDir;

TEST_CASE("label csv omits unlabeled cells and round-trips") {
    TempDir dir;
    const auto g = planar(2, 2);
    const ZoneMap map{g, {1, -1, 0, 1}, 2, {}};
    const auto text = report::label_csv(map);
    CHECK(text == "row,col,label\n0,0,1\n1,0,0\n1,1,1\n");
    testing::write_text(dir / "a.csv", text);
    const auto back = report::read_label_csv(dir / "a.csv", g);
    CHECK(back.labels == map.labels);
    CHECK(back.zone_count == 2);

    const auto inferred = report::read_label_csv(dir / "a.csv", std::nullopt);
    CHECK(inferred.geometry.nrows == 2);
    CHECK(inferred.geometry.ncols == 2);
}

TEST_CASE("label csv errors") {
    TempDir dir;
    testing::write_text(dir / "bad_header.csv", "r,c,l\n");
    CHECK_THROWS_AS(report::read_label_csv(dir / "bad_header.csv", std::nullopt), ValidationError);
    testing::write_text(dir / "dup.csv", "row,col,label\n0,0,1\n0,0,2\n");
    CHECK_THROWS_AS(report::read_label_csv(dir / "dup.csv", std::nullopt), ValidationError);
    testing::write_text(dir / "junk.csv", "row,col,label\n0,x,1\n");
    CHECK_THROWS_AS(report::read_label_csv(dir / "junk.csv", std::nullopt), ValidationError);
    testing::write_text(dir / "outside.csv", "row,col,label\n5,0,1\n");
    CHECK_THROWS_AS(report::read_label_csv(dir / "outside.csv", planar(2, 2)), ShapeError);
    CHECK_THROWS_AS(report::read_label_csv(dir / "missing.csv", std::nullopt), IoError);
}

TEST_CASE("sha256 of known inputs") {
    CHECK(report::sha256_bytes("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(report::sha256_bytes("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    TempDir dir;
    testing::write_text(dir / "x.txt", "abc");
    CHECK(report::sha256_file(dir / "x.txt") == report::sha256_bytes("abc"));
}

TEST_CASE("zone map svg is deterministic and uses the palette") {
    const auto g = planar(2, 3);
    const ZoneMap map{g, {0, 1, 2, -1, 17, 0}, 4, {}};
    const auto a = svg::render_zone_map(map, {"Zones <A&B>", 10});
    CHECK(a == svg::render_zone_map(map, {"Zones <A&B>", 10}));
    CHECK(a.find(std::string(svg::kPalette[0])) != std::string::npos);
    CHECK(a.find(std::string(svg::kPalette[17 % 16])) != std::string::npos);
    CHECK(a.find("Zones &lt;A&amp;B&gt;") != std::string::npos);
    CHECK(a.find(svg::version_comment()) != std::string::npos);
    CHECK(a.rfind("</svg>") != std::string::npos);
}

TEST_CASE("scatter svg draws one marker per point") {
    const std::vector<svg::ScatterSeries> series{{"A", {{100, 2, "zone 0"}, {900, 5, "zone 1"}}},
                                                 {"B", {{400, 1, "zone 0"}}}};
    const auto s = svg::render_scatter(series, {"t", "x", "y"});
    std::size_t markers = 0;
    for (auto pos = s.find("<circle"); pos != std::string::npos; pos = s.find("<circle", pos + 1)) ++markers;
    CHECK(markers >= 3);
    CHECK(svg::xml_escape("a\"b<c") == "a&quot;b&lt;c");
}
