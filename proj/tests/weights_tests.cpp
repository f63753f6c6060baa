#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nlcalib/kernel.hpp"
#include "nlcalib/lattice.hpp"
#include "nlcalib/weights.hpp"
#include "oracle_helpers.hpp"

using nlcalib::build_weights;
using nlcalib::ClassAccumulator;
using nlcalib::GridBox;
using nlcalib::Kernel;
using nlcalib::Lattice;
using nlcalib::QuadratureMode;
using nlcalib::WeightTable;

TEST_SUITE("midpoint weights") {
    TEST_CASE("equal the kernel at the center displacement times the volume squared") {
        const Lattice lat(1, 0.5, {{-4, 0}, {4, 0}}, GridBox{{0, 0}, {1, 0}});
        const Kernel kernel = Kernel::exponential(1, 1.3);
        const WeightTable table = build_weights(lat, kernel, QuadratureMode::Midpoint);
        CHECK(table.mode() == QuadratureMode::Midpoint);
        for (int m = 1; m <= lat.spans()[0]; ++m)
            CHECK(table.weight({m, 0}) ==
                  doctest::Approx(testref::midpoint_weight(kernel, 0.5, m)).epsilon(1e-15));
    }

    TEST_CASE("cover every displacement of a planar universe") {
        const Lattice lat(2, 0.25, {{-3, -2}, {3, 2}}, GridBox{{0, 0}, {0, 0}});
        const Kernel kernel = Kernel::fractional_power(2, 0.5, 2.0);
        const WeightTable table = build_weights(lat, kernel, QuadratureMode::Midpoint);
        for (int d1 = -6; d1 <= 6; ++d1)
            for (int d2 = -4; d2 <= 4; ++d2) {
                if (d1 == 0 && d2 == 0) continue;
                CHECK(table.weight({d1, d2}) ==
                      doctest::Approx(testref::midpoint_weight(kernel, 0.25, d1, d2))
                          .epsilon(1e-14));
            }
    }

    TEST_CASE("unit spacing fractional values are the bare kernel values") {
        const Lattice lat(1, 1.0, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::fractional_power(1, 0.5), QuadratureMode::Midpoint);
        CHECK(table.weight({1, 0}) == 1.0);
        CHECK(table.weight({2, 0}) == std::pow(2.0, -1.5));
    }
}

TEST_SUITE("cell averaged weights") {
    TEST_CASE("fractional line weights match the exact pair integral") {
        const double h = 0.5, alpha = 0.5, scale = 2.0;
        const Lattice lat(1, h, {{-5, 0}, {5, 0}}, GridBox{{0, 0}, {0, 0}});
        const WeightTable table = build_weights(
            lat, Kernel::fractional_power(1, alpha, scale), QuadratureMode::CellAveraged);
        for (int m = 1; m <= lat.spans()[0]; ++m)
            CHECK(table.weight({m, 0}) ==
                  doctest::Approx(testref::averaged_weight_1d_fractional(alpha, scale, h, m))
                      .epsilon(1e-14));
    }

    TEST_CASE("the touching cell pair at unit spacing carries 8 minus 4 root 2") {
        const Lattice lat(1, 1.0, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::fractional_power(1, 0.5), QuadratureMode::CellAveraged);
        CHECK(table.weight({1, 0}) ==
              doctest::Approx(testref::kAveragedUnitWeight).epsilon(1e-13));
    }

    TEST_CASE("the touching weight survives a substituted quadrature cross check") {
        const double h = 0.5, alpha = 0.3, scale = 1.7;
        const Lattice lat(1, h, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        const WeightTable table = build_weights(
            lat, Kernel::fractional_power(1, alpha, scale), QuadratureMode::CellAveraged);
        // left panel desingularized by z = u^2, right panel is smooth
        const double left = testref::simpson(
            [&](double u) { return 2.0 * scale * std::pow(u, 1.0 - 2.0 * alpha); }, 0.0,
            std::sqrt(h), 1e-13);
        const double right = testref::simpson(
            [&](double z) { return scale * std::pow(z, -1.0 - alpha) * (2.0 * h - z); }, h,
            2.0 * h, 1e-13);
        CHECK(table.weight({1, 0}) == doctest::Approx(left + right).epsilon(1e-10));
    }

    TEST_CASE("smooth kernels match an independent Simpson hat integral") {
        const double h = 0.5;
        const Lattice lat(1, h, {{-3, 0}, {3, 0}}, GridBox{{0, 0}, {0, 0}});
        const Kernel kernel = Kernel::exponential(1, 0.9);
        const WeightTable table = build_weights(lat, kernel, QuadratureMode::CellAveraged);
        for (int m = 1; m <= lat.spans()[0]; ++m)
            CHECK(table.weight({m, 0}) ==
                  doctest::Approx(testref::averaged_weight_1d(kernel, h, m, 1e-12))
                      .epsilon(1e-8));
    }

    TEST_CASE("planar weights match the tensor hat integral") {
        const double h = 0.5;
        const Lattice lat(2, h, {{-2, -2}, {2, 2}}, GridBox{{0, 0}, {0, 0}});
        const Kernel smooth = Kernel::exponential(2, 1.1);
        const WeightTable table = build_weights(lat, smooth, QuadratureMode::CellAveraged);
        for (int m = 0; m <= 2; ++m)
            for (int s = 0; s <= m; ++s) {
                if (m == 0 && s == 0) continue;
                CHECK(table.weight({m, s}) ==
                      doctest::Approx(testref::averaged_weight_2d(smooth, h, m, s, 1e-10))
                          .epsilon(1e-7));
            }

        // near the singular corner the Simpson reference is run at a loose
        // absolute tolerance; the comparison bound is loosened to match
        const Kernel singular = Kernel::fractional_power(2, 0.5);
        const WeightTable frac = build_weights(lat, singular, QuadratureMode::CellAveraged);
        CHECK(frac.weight({1, 0}) ==
              doctest::Approx(testref::averaged_weight_2d(singular, h, 1, 0, 3e-6))
                  .epsilon(1e-4));
        CHECK(frac.weight({1, 1}) ==
              doctest::Approx(testref::averaged_weight_2d(singular, h, 1, 1, 3e-6))
                  .epsilon(1e-4));
        CHECK(frac.weight({2, 1}) ==
              doctest::Approx(testref::averaged_weight_2d(singular, h, 2, 1, 1e-9))
                  .epsilon(1e-6));
    }
}

TEST_SUITE("weight table structure") {
    TEST_CASE("lattice symmetries of the kernel are exact by construction") {
        const Lattice lat(2, 0.5, {{-3, -3}, {3, 3}}, GridBox{{0, 0}, {0, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::fractional_power(2, 0.3), QuadratureMode::CellAveraged);
        for (int a = 0; a <= 6; ++a)
            for (int b = 0; b <= a; ++b) {
                if (a == 0 && b == 0) continue;
                const double w = table.weight({a, b});
                CHECK(table.weight({-a, b}) == w);
                CHECK(table.weight({a, -b}) == w);
                CHECK(table.weight({-a, -b}) == w);
                CHECK(table.weight({b, a}) == w);
                CHECK(table.weight({-b, -a}) == w);
            }
    }

    TEST_CASE("class lookup rejects zero and out of range displacements") {
        const Lattice lat(1, 1.0, {{0, 0}, {3, 0}}, GridBox{{1, 0}, {2, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::exponential(1, 1.0), QuadratureMode::Midpoint);
        CHECK_THROWS_AS(table.class_id({0, 0}), std::domain_error);
        CHECK_THROWS_AS(table.class_id({4, 0}), std::out_of_range);
        CHECK(table.class_count() == 3);
        for (int cid = 0; cid < table.class_count(); ++cid) CHECK(table.class_norm2(cid) > 0);
    }

    TEST_CASE("weight between cells equals the weight of their displacement") {
        const Lattice lat(2, 0.5, {{0, 0}, {3, 2}}, GridBox{{1, 1}, {2, 1}});
        const WeightTable table =
            build_weights(lat, Kernel::exponential(2, 0.8), QuadratureMode::Midpoint);
        for (long a = 0; a < lat.cell_count(); ++a)
            for (long b = 0; b < lat.cell_count(); ++b) {
                if (a == b) continue;
                CHECK(table.weight_between(a, b) == table.weight(lat.displacement(a, b)));
            }
    }

    TEST_CASE("min and max bound every class weight") {
        const Lattice lat(1, 1.0, {{0, 0}, {9, 0}}, GridBox{{4, 0}, {5, 0}});
        const WeightTable table = build_weights(lat, Kernel::compact_support(1, 2.5, 1.5),
                                                QuadratureMode::Midpoint);
        CHECK(table.min_weight() == 0.0);  // displacements beyond the support
        CHECK(table.max_weight() == 1.5);
        for (int cid = 0; cid < table.class_count(); ++cid) {
            CHECK(table.class_weight(cid) >= table.min_weight());
            CHECK(table.class_weight(cid) <= table.max_weight());
        }
    }
}

TEST_SUITE("class accumulators") {
    TEST_CASE("dot products equal the plain count weighted sum") {
        const Lattice lat(1, 1.0, {{0, 0}, {6, 0}}, GridBox{{2, 0}, {4, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::fractional_power(1, 0.4), QuadratureMode::Midpoint);
        ClassAccumulator acc(table);
        std::vector<long> counts = {3, -1, 7, 0, 2, -5};
        double plain = 0.0;
        for (int cid = 0; cid < table.class_count(); ++cid) {
            const long c = counts[static_cast<size_t>(cid) % counts.size()];
            acc.add(cid, c);
            plain += static_cast<double>(c) * table.class_weight(cid);
            CHECK(acc.count(cid) == c);
        }
        CHECK(acc.dot() == doctest::Approx(plain).epsilon(1e-14));
        acc.clear();
        CHECK(acc.dot() == 0.0);
    }

    TEST_CASE("symmetric cancellations produce exact zeros") {
        const Lattice lat(2, 0.5, {{-2, -2}, {2, 2}}, GridBox{{0, 0}, {0, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::fractional_power(2, 0.5), QuadratureMode::CellAveraged);
        ClassAccumulator acc(table);
        for (int cid = 0; cid < table.class_count(); ++cid) {
            acc.add(cid, 11);
            acc.add(cid, -11);
        }
        CHECK(acc.dot() == 0.0);
    }

    TEST_CASE("the truncation filter keeps only classes at or beyond the floor") {
        const Lattice lat(1, 1.0, {{0, 0}, {4, 0}}, GridBox{{1, 0}, {3, 0}});
        const WeightTable table =
            build_weights(lat, Kernel::exponential(1, 0.5), QuadratureMode::Midpoint);
        ClassAccumulator acc(table);
        for (int cid = 0; cid < table.class_count(); ++cid) acc.add(cid, 1);
        double beyond = 0.0;
        for (int cid = 0; cid < table.class_count(); ++cid)
            if (table.class_norm2(cid) >= 4) beyond += table.class_weight(cid);
        CHECK(acc.dot_min_norm2(4.0) == doctest::Approx(beyond).epsilon(1e-14));
        CHECK(acc.dot_min_norm2(0.0) == acc.dot());
        CHECK(acc.dot_min_norm2(1e9) == 0.0);
    }
}
