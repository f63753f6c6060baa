#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <limits>
#include <stdexcept>

#include "nlcalib/lattice.hpp"

using nlcalib::GridBox;
using nlcalib::IndicatorField;
using nlcalib::Lattice;
using nlcalib::LevelField;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("grid boxes") {
    TEST_CASE("emptiness and membership") {
        CHECK(GridBox::empty().is_empty());
        CHECK_FALSE(GridBox{{0, 0}, {0, 0}}.is_empty());
        const GridBox box{{-1, 2}, {3, 4}};
        CHECK(box.contains({0, 3}, 2));
        CHECK_FALSE(box.contains({0, 5}, 2));
        CHECK_FALSE(box.contains({4, 3}, 2));
        // dimension 1 ignores axis 1 entirely
        CHECK(box.contains({0, 99}, 1));
    }
}

TEST_SUITE("lattice geometry") {
    TEST_CASE("ids, indices, and centers round trip in dimension 1") {
        const Lattice lat(1, 0.5, {{-2, 0}, {3, 0}}, GridBox{{0, 0}, {1, 0}});
        CHECK(lat.dimension() == 1);
        CHECK(lat.cell_count() == 6);
        CHECK(lat.cell_volume() == 0.5);
        CHECK(lat.spans() == std::array<int, 2>{5, 0});
        for (long id = 0; id < lat.cell_count(); ++id)
            CHECK(lat.id_of(lat.index_of(id)) == id);
        CHECK(lat.index_of(0) == std::array<int, 2>{-2, 0});
        CHECK(lat.center(0)[0] == doctest::Approx(-0.75).epsilon(1e-15));
        CHECK(lat.center(0)[1] == 0.0);
        CHECK(lat.displacement(0, 5) == std::array<int, 2>{5, 0});
        CHECK(lat.window_cells().size() == 2);
        CHECK(lat.exterior_cells().size() == 4);
        CHECK(lat.in_window(lat.id_of({0, 0})));
        CHECK_FALSE(lat.in_window(lat.id_of({-1, 0})));
    }

    TEST_CASE("ids run row major with axis 0 major in dimension 2") {
        const Lattice lat(2, 1.0, {{-1, 0}, {2, 1}}, GridBox{{0, 0}, {1, 1}});
        CHECK(lat.cell_count() == 8);
        CHECK(lat.cell_volume() == 1.0);
        CHECK(lat.id_of({-1, 0}) == 0);
        CHECK(lat.id_of({-1, 1}) == 1);
        CHECK(lat.id_of({0, 0}) == 2);
        for (long id = 0; id < lat.cell_count(); ++id)
            CHECK(lat.id_of(lat.index_of(id)) == id);
        CHECK(lat.center(lat.id_of({2, 1}))[0] == doctest::Approx(2.5).epsilon(1e-15));
        CHECK(lat.center(lat.id_of({2, 1}))[1] == doctest::Approx(1.5).epsilon(1e-15));
        CHECK(lat.displacement(lat.id_of({0, 0}), lat.id_of({2, 1})) ==
              std::array<int, 2>{2, 1});
        CHECK(lat.spans() == std::array<int, 2>{3, 1});
        CHECK(lat.window_cells().size() == 4);
    }

    TEST_CASE("explicit window cell lists match the equivalent box") {
        const GridBox universe{{0, 0}, {3, 3}};
        const Lattice boxed(2, 1.0, universe, GridBox{{1, 1}, {2, 2}});
        const Lattice listed(2, 1.0, universe,
                             std::vector<std::array<int, 2>>{
                                 {1, 1}, {1, 2}, {2, 1}, {2, 2}, {2, 2}});
        CHECK(boxed.window_cells() == listed.window_cells());
        CHECK(boxed.exterior_cells() == listed.exterior_cells());
    }

    TEST_CASE("an empty window box leaves every cell exterior") {
        const Lattice lat(1, 1.0, {{0, 0}, {4, 0}}, GridBox::empty());
        CHECK(lat.window_cells().empty());
        CHECK(lat.exterior_cells().size() == 5);
    }

    TEST_CASE("construction validates its inputs") {
        const GridBox u{{0, 0}, {3, 0}};
        CHECK_THROWS_AS(Lattice(3, 1.0, u, GridBox::empty()), std::invalid_argument);
        CHECK_THROWS_AS(Lattice(1, 0.0, u, GridBox::empty()), std::invalid_argument);
        CHECK_THROWS_AS(Lattice(1, -1.0, u, GridBox::empty()), std::invalid_argument);
        CHECK_THROWS_AS(Lattice(1, kInf, u, GridBox::empty()), std::invalid_argument);
        CHECK_THROWS_AS(Lattice(1, 1.0, GridBox::empty(), GridBox::empty()),
                        std::invalid_argument);
        CHECK_THROWS_AS(Lattice(1, 1.0, u, GridBox{{0, 0}, {4, 0}}), std::invalid_argument);
        CHECK_THROWS_AS(Lattice(2, 1.0, {{0, 0}, {3, 3}},
                                std::vector<std::array<int, 2>>{{0, 4}}),
                        std::invalid_argument);
    }
}

TEST_SUITE("indicator fields") {
    TEST_CASE("reads, writes, counts, and complements") {
        const Lattice lat(1, 1.0, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        IndicatorField e(lat);
        CHECK(e.count() == 0);
        e.set(0, true);
        e.set(2, true);
        CHECK(e.get(0));
        CHECK_FALSE(e.get(1));
        CHECK(e.count() == 2);

        const IndicatorField full(lat, true);
        CHECK(full.count() == 4);

        const IndicatorField flipped = e.complemented();
        CHECK(flipped.count() == 2);
        CHECK_FALSE(flipped.get(0));
        CHECK(flipped.get(1));
        CHECK_FALSE(flipped == e);
        CHECK(flipped.complemented() == e);
    }

    TEST_CASE("freezing protects exterior cells but not window cells") {
        const Lattice lat(1, 1.0, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        IndicatorField e(lat);
        e.set(0, true);
        IndicatorField frozen = freeze_exterior(e);
        CHECK(frozen.frozen());
        CHECK_FALSE(e.frozen());
        CHECK_THROWS_AS(frozen.set(0, false), std::logic_error);
        CHECK_THROWS_AS(frozen.set(3, true), std::logic_error);
        frozen.set(1, true);
        CHECK(frozen.get(1));
        // the original is still fully writable
        e.set(0, false);
        CHECK_FALSE(e.get(0));
    }

    TEST_CASE("window bits pack in window cell order") {
        const Lattice lat(1, 1.0, {{-1, 0}, {4, 0}}, GridBox{{0, 0}, {2, 0}});
        IndicatorField e(lat);
        CHECK(e.window_bits() == 0u);
        e.set_window_bits(0b101u);
        CHECK(e.get(lat.id_of({0, 0})));
        CHECK_FALSE(e.get(lat.id_of({1, 0})));
        CHECK(e.get(lat.id_of({2, 0})));
        CHECK(e.window_bits() == 0b101u);
        for (uint32_t bits = 0; bits < 8; ++bits) {
            e.set_window_bits(bits);
            CHECK(e.window_bits() == bits);
        }
        // exterior cells are untouched by pattern writes
        e.set(lat.id_of({-1, 0}), true);
        e.set_window_bits(0u);
        CHECK(e.get(lat.id_of({-1, 0})));
    }

    TEST_CASE("windows beyond 32 cells reject bit packing") {
        const Lattice lat(1, 1.0, {{0, 0}, {39, 0}}, GridBox{{0, 0}, {34, 0}});
        IndicatorField e(lat);
        CHECK_THROWS_AS(e.window_bits(), std::logic_error);
        CHECK_THROWS_AS(e.set_window_bits(1u), std::logic_error);
    }
}

TEST_SUITE("level fields") {
    TEST_CASE("stores extended reals and rejects NaN") {
        const Lattice lat(1, 1.0, {{0, 0}, {2, 0}}, GridBox{{1, 0}, {1, 0}});
        LevelField phi(lat, 1.5);
        CHECK(phi.get(0) == 1.5);
        phi.set(0, kInf);
        phi.set(1, -kInf);
        CHECK(phi.get(0) == kInf);
        CHECK(phi.get(1) == -kInf);
        CHECK_THROWS_AS(phi.set(2, std::numeric_limits<double>::quiet_NaN()),
                        std::invalid_argument);
        CHECK_THROWS_AS(LevelField(lat, std::numeric_limits<double>::quiet_NaN()),
                        std::invalid_argument);
    }

    TEST_CASE("level comparisons never form inf minus inf") {
        CHECK(nlcalib::sign_diff(kInf, kInf) == 0);
        CHECK(nlcalib::sign_diff(-kInf, -kInf) == 0);
        CHECK(nlcalib::sign_diff(kInf, -kInf) == 1);
        CHECK(nlcalib::sign_diff(-kInf, kInf) == -1);
        CHECK(nlcalib::sign_diff(2.0, 1.0) == 1);
        CHECK(nlcalib::sign_diff(1.0, 1.0) == 0);
        CHECK(nlcalib::sign_diff(kInf, 5.0) == 1);
    }
}
