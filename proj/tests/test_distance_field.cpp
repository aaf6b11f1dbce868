#include <doctest.h>

#include "oracles.hpp"
#include "smcl/distance_field.hpp"

using namespace smcl;

TEST_CASE("single occupied cell: neighbor decodes to one cell width")
{
    SemanticGridMap map(21, 21, 0.05, {0.0, 0.0});
    map.set_occupancy(10, 10, Occupancy::occupied);

    const double r_max = 0.5;
    const DistanceField edt = compute_edt(map, r_max);

    CHECK(edt.raw_at(10, 10) == 0);
    CHECK(std::abs(edt.distance_at(11, 10) - (0.05)) <= r_max / 255.0);
    CHECK(std::abs(edt.distance_at(10, 9) - (0.05)) <= r_max / 255.0);
    // far corner is sqrt(200) cells ~ 0.707 m, beyond r_max
    CHECK(edt.raw_at(0, 0) == 255);
}

TEST_CASE("all cells occupied decode to zero")
{
    SemanticGridMap map(9, 7, 0.05, {0.0, 0.0});
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 9; ++x)
            map.set_occupancy(x, y, Occupancy::occupied);
    const DistanceField edt = compute_edt(map, 1.0);
    for (const uint8_t v : edt.values())
        CHECK(v == 0);
}

TEST_CASE("no occupied cell is an error")
{
    SemanticGridMap map(8, 8, 0.05, {0.0, 0.0});
    CHECK_THROWS_AS(compute_edt(map, 2.0), std::invalid_argument);
}

TEST_CASE("decoded field matches the brute-force oracle within quantization tolerance")
{
    // 64x64 at 20% occupancy mirrors the documented case; more sizes and
    // densities below in the property test.
    const auto map = oracles::random_noise_map(17, 64, 64, 0.2);
    const double r_max = 2.0;
    const DistanceField edt = compute_edt(map, r_max);
    const oracles::BruteForceDistance oracle(map);

    const double tol = r_max / 255.0 + map.resolution() * std::sqrt(2.0);
    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
        {
            const double exact =
                std::min(oracle.distance_cells(x, y) * map.resolution(), r_max);
            const double decoded = edt.distance_at(x, y);
            CHECK(std::abs(decoded - exact) <= tol);
        }
}

TEST_CASE("property: EDT equals oracle on random maps up to 128x128")
{
    for (uint64_t seed = 1; seed <= 12; ++seed)
    {
        RandomStream rs(seed, 0xabc);
        const int w = 8 + static_cast<int>(rs.next_index(121));
        const int h = 8 + static_cast<int>(rs.next_index(121));
        const double density = 0.01 + 0.3 * rs.next_uniform();
        const double r_max = 0.5 + 2.0 * rs.next_uniform();

        const auto map = oracles::random_noise_map(seed, w, h, density);
        const DistanceField edt = compute_edt(map, r_max);
        const oracles::BruteForceDistance oracle(map);

        const double tol = r_max / 255.0 + map.resolution() * std::sqrt(2.0);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
            {
                const double exact =
                    std::min(oracle.distance_cells(x, y) * map.resolution(), r_max);
                REQUIRE(std::abs(edt.distance_at(x, y) - exact) <= tol);
            }
    }
}

TEST_CASE("stored codes honor the invariants")
{
    const auto map = oracles::random_noise_map(3, 48, 40, 0.1);
    const double r_max = 1.5;
    const DistanceField edt = compute_edt(map, r_max);
    const oracles::BruteForceDistance oracle(map);

    for (int y = 0; y < map.height(); ++y)
        for (int x = 0; x < map.width(); ++x)
        {
            if (map.is_occupied(x, y))
            {
                CHECK(edt.raw_at(x, y) == 0);
            }
            else
            {
                CHECK(edt.raw_at(x, y) > 0);
                if (oracle.distance_cells(x, y) * map.resolution() >= r_max)
                    CHECK(edt.raw_at(x, y) == 255);
            }
        }
}

TEST_CASE("world lookups decode through the map transform")
{
    SemanticGridMap map(16, 16, 0.1, {-0.5, -0.5});
    map.set_occupancy(8, 8, Occupancy::occupied);
    const DistanceField edt = compute_edt(map, 1.0);

    const WorldPoint on_cell = map.world_of({8, 8});
    CHECK(edt.distance_at_world(on_cell).value() == 0.0);
    CHECK_FALSE(edt.distance_at_world({99.0, 99.0}).has_value());
}
