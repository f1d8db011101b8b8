#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "llr/errors.hpp"
#include "llr/lattice.hpp"
#include "llr/rng.hpp"
#include "llr/simulator.hpp"

#include <filesystem>
#include <fstream>

using namespace llr;

namespace {

Eigen::VectorXd x1(double v) {
    Eigen::VectorXd x(1);
    x(0) = v;
    return x;
}

LatticeField small_field() {
    std::vector<FieldRecord> recs;
    recs.push_back({Site{{1, 1}}, 1.0, x1(0.5)});
    recs.push_back({Site{{1, 2}}, 2.0, x1(-0.25)});
    recs.push_back({Site{{2, 1}}, 3.0, x1(1.5)});
    recs.push_back({Site{{2, 2}}, 4.0, x1(0.0)});
    return LatticeField::from_records(recs, LatticeShape({2, 2}), 1);
}

} // namespace

TEST_CASE("minimal 1x1 lattice") {
    std::vector<FieldRecord> recs;
    recs.push_back({Site{{1, 1}}, 0.0, x1(0.0)});
    const LatticeField f = LatticeField::from_records(recs, LatticeShape({1, 1}), 1);
    CHECK(f.size() == 1);
    CHECK(f.shape().total_sites() == 1);
}

TEST_CASE("coverage violations") {
    std::vector<FieldRecord> recs;
    recs.push_back({Site{{1, 1}}, 0.0, x1(0.0)});
    recs.push_back({Site{{1, 2}}, 0.0, x1(0.0)});
    recs.push_back({Site{{2, 1}}, 0.0, x1(0.0)});
    CHECK_THROWS_AS(LatticeField::from_records(recs, LatticeShape({2, 2}), 1),
                    MissingSiteError);

    recs.push_back(recs.back());
    CHECK_THROWS_AS(LatticeField::from_records(recs, LatticeShape({2, 2}), 1),
                    DuplicateSiteError);
}

TEST_CASE("record validation") {
    std::vector<FieldRecord> recs;
    Eigen::VectorXd wrong(2);
    wrong << 0.0, 1.0;
    recs.push_back({Site{{1}}, 0.0, wrong});
    CHECK_THROWS_AS(LatticeField::from_records(recs, LatticeShape({1}), 1),
                    DimensionMismatchError);

    recs.clear();
    recs.push_back({Site{{1}}, std::nan(""), x1(0.0)});
    CHECK_THROWS_AS(LatticeField::from_records(recs, LatticeShape({1}), 1),
                    NonFiniteValueError);
}

TEST_CASE("site iteration is lexicographic and total") {
    const LatticeShape shape({2, 3, 2});
    CHECK(shape.total_sites() == 12);
    std::vector<Site> sites;
    for (std::int64_t j = 0; j < shape.total_sites(); ++j) {
        sites.push_back(shape.site_at(j));
        CHECK(shape.flat_index(sites.back()) == j);
    }
    CHECK(sites.front().coords == std::vector<int>{1, 1, 1});
    CHECK(sites[1].coords == std::vector<int>{1, 1, 2});
    CHECK(sites[2].coords == std::vector<int>{1, 2, 1});
    CHECK(sites.back().coords == std::vector<int>{2, 3, 2});
    for (std::size_t i = 1; i < sites.size(); ++i) {
        CHECK(sites[i - 1].coords < sites[i].coords);
    }
}

TEST_CASE("csv schema round-trip") {
    const LatticeField f = small_field();
    const std::string text = field_csv(f);
    CHECK(text.starts_with("i1,i2,y,x1\n"));
    const LatticeField g = parse_field_csv(text);
    CHECK(g.shape() == f.shape());
    CHECK(g.ys() == f.ys());
    CHECK(g.xs() == f.xs());
}

TEST_CASE("csv parse errors carry line numbers") {
    CHECK_THROWS_AS(parse_field_csv("i1,i2,y\n1,1,0\n"), ParseError);

    try {
        parse_field_csv("i1,i2,y,x1\n1,1,0,0\n1,2,0,abc\n2,1,0,0\n2,2,0,0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("model1 simulation round-trips bit-identically") {
    ModelSpec spec;
    spec.kind = ModelKind::model1;
    spec.m = 10;
    spec.n = 20;
    spec.protocol.seed = 98765;
    const LatticeField f = simulate(spec);

    const auto path = std::filesystem::temp_directory_path() / "llr_roundtrip_m1.csv";
    write_field_csv(f, path);
    const LatticeField g = read_field_csv(path);
    std::filesystem::remove(path);

    REQUIRE(g.size() == f.size());
    for (std::int64_t j = 0; j < f.size(); ++j) {
        CHECK(g.y(j) == f.y(j));
        CHECK(g.xs()(j, 0) == f.xs()(j, 0));
    }
}

TEST_CASE("model2 30x40 round-trip preserves all values") {
    ModelSpec spec;
    spec.kind = ModelKind::model2;
    spec.m = 30;
    spec.n = 40;
    spec.protocol.seed = 31337;
    const LatticeField f = simulate(spec);
    const LatticeField g = parse_field_csv(field_csv(f));
    CHECK(g.ys() == f.ys());
    CHECK(g.xs() == f.xs());
}

TEST_CASE("parse rejects text that is not a full rectangle") {
    // 2x2 header shape but row (2,2) missing: max indices imply a hole.
    CHECK_THROWS_AS(parse_field_csv("i1,i2,y,x1\n1,1,0,0\n1,2,0,0\n2,1,0,0\n"),
                    MissingSiteError);
}
