#include <doctest.h>

#include "oracles.hpp"
#include "smcl/geometry.hpp"

using namespace smcl;

namespace {

CameraIntrinsics test_camera()
{
    CameraIntrinsics cam;
    cam.fx = 200.0;
    cam.fy = 200.0;
    cam.cx = 128.0;
    cam.cy = 96.0;
    cam.image_width = 256;
    cam.image_height = 192;
    return cam;
}

} // namespace

TEST_CASE("angle wrapping lands in (-pi, pi]")
{
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(wrap_angle(2.0 * kPi + 0.3) == doctest::Approx(0.3));
    CHECK(wrap_angle(-2.0 * kPi - 0.3) == doctest::Approx(-0.3));
}

TEST_CASE("pixel bearings: center, unit tangent, inverse")
{
    const CameraIntrinsics cam = test_camera();

    CHECK(pixel_to_bearing(cam, cam.cx, 10.0) == 0.0);
    CHECK(pixel_to_bearing(cam, cam.cx, 180.0) == 0.0);
    CHECK(pixel_to_bearing(cam, cam.cx + cam.fx, 96.0) == doctest::Approx(kPi / 4.0));
    // invert the forward formula
    CHECK(pixel_to_bearing(cam, cam.cx - cam.fx * std::tan(0.3), 96.0) ==
          doctest::Approx(-0.3));
}

TEST_CASE("bearing to pixel and back is exact to 1e-9")
{
    const CameraIntrinsics cam = test_camera();
    for (double b = -0.5; b <= 0.5; b += 0.01)
    {
        const double u = bearing_to_pixel_u(cam, b);
        CHECK(std::abs(pixel_to_bearing(cam, u, 0.0) - (b)) <= 1e-9);
    }
}

TEST_CASE("camera intrinsics validation")
{
    CameraIntrinsics cam = test_camera();
    CHECK_NOTHROW(cam.validate());
    cam.fx = -1.0;
    CHECK_THROWS(cam.validate());
    cam = test_camera();
    cam.cx = 300.0;
    CHECK_THROWS(cam.validate());
}

TEST_CASE("perpendicular wall hit at one meter")
{
    // wall column at x = 1.0 m from the start
    SemanticGridMap map(40, 20, 0.05, {0.0, 0.0});
    for (int y = 0; y < 20; ++y)
        map.set_occupancy(30, y, Occupancy::occupied);

    const WorldPoint start{30 * 0.05 - 1.0, 0.5};
    const TraceResult r = ray_cast_occupancy(map, start, 0.0, 5.0);
    CHECK(r.outcome == TraceOutcome::blocked_by_wall);
    CHECK(std::abs(r.distance - (1.0)) <= 0.05);
}

TEST_CASE("empty map reaches max range")
{
    SemanticGridMap map(40, 40, 0.05, {0.0, 0.0});
    const TraceResult r = ray_cast_occupancy(map, {1.0, 1.0}, 0.4, 0.7);
    CHECK(r.outcome == TraceOutcome::max_range_reached);
    CHECK(r.distance == doctest::Approx(0.7));
}

TEST_CASE("ray exits map when unobstructed")
{
    SemanticGridMap map(20, 20, 0.05, {0.0, 0.0});
    const TraceResult r = ray_cast_occupancy(map, {0.5, 0.5}, 0.0, 50.0);
    CHECK(r.outcome == TraceOutcome::exited_map);
    CHECK(r.distance == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("start outside map throws")
{
    SemanticGridMap map(20, 20, 0.05, {0.0, 0.0});
    CHECK_THROWS_AS(ray_cast_occupancy(map, {-1.0, 0.5}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("DDA matches the fine-step oracle on random rays")
{
    int compared = 0;
    for (uint64_t seed = 1; seed <= 10; ++seed)
    {
        const auto map = oracles::random_structured_map(seed, 60, 48);
        RandomStream rs(seed, 0x11);
        const double max_range = 6.0;
        const double diag = map.resolution() * std::sqrt(2.0);

        for (int trial = 0; trial < 10; ++trial)
        {
            // random free start
            int cx, cy;
            do
            {
                cx = static_cast<int>(rs.next_index(map.width()));
                cy = static_cast<int>(rs.next_index(map.height()));
            } while (!map.is_free(cx, cy));
            const WorldPoint start = map.world_of({cx, cy});
            const double bearing = rs.next_uniform() * 2.0 * kPi;

            const TraceResult dda = ray_cast_occupancy(map, start, bearing, max_range);
            const auto sampled =
                oracles::sample_ray(map, start, bearing, max_range, map.resolution() / 4.0);

            if (dda.outcome == TraceOutcome::blocked_by_wall && sampled.hit)
            {
                CHECK(std::abs(dda.distance - sampled.distance) <= diag);
                ++compared;
            }
            else if (dda.outcome == TraceOutcome::blocked_by_wall)
            {
                // the sampler stepped over a corner clip; the wall must sit
                // right at its stopping point
                CHECK(sampled.distance >= dda.distance - diag);
            }
            else
            {
                CHECK_FALSE(sampled.hit);
            }
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("semantic trace hits a sofa two meters ahead")
{
    SemanticGridMap map(100, 40, 0.05, {0.0, 0.0}, {"sofa"});
    for (int y = 10; y < 20; ++y)
        for (int x = 60; x < 70; ++x)
            map.set_class_bit(x, y, 0);

    const Pose2D pose{60 * 0.05 - 2.0, 15 * 0.05, 0.0};
    const TraceResult r = trace_semantic(map, pose, 0.0, 0, 10.0);
    CHECK(r.outcome == TraceOutcome::hit_class);
    CHECK(std::abs(r.distance - (2.0)) <= 0.05);
}

TEST_CASE("wall interposed before the object blocks the trace")
{
    SemanticGridMap map(100, 40, 0.05, {0.0, 0.0}, {"sofa"});
    for (int y = 10; y < 20; ++y)
        for (int x = 60; x < 70; ++x)
            map.set_class_bit(x, y, 0);
    for (int y = 0; y < 40; ++y)
        map.set_occupancy(40, y, Occupancy::occupied);

    const Pose2D pose{40 * 0.05 - 1.0, 15 * 0.05, 0.0};
    const TraceResult r = trace_semantic(map, pose, 0.0, 0, 10.0);
    CHECK(r.outcome == TraceOutcome::blocked_by_wall);
    CHECK(std::abs(r.distance - (1.0)) <= 0.05);
}

TEST_CASE("class bit on a wall cell wins over occupancy")
{
    SemanticGridMap map(40, 10, 0.05, {0.0, 0.0}, {"cabinet"});
    for (int y = 0; y < 10; ++y)
        map.set_occupancy(30, y, Occupancy::occupied);
    map.set_class_bit(30, 5, 0);

    const Pose2D pose{0.5, 5 * 0.05 + 0.025, 0.0};
    const TraceResult r = trace_semantic(map, pose, 0.0, 0, 10.0);
    CHECK(r.outcome == TraceOutcome::hit_class);
}

TEST_CASE("bad class index throws")
{
    SemanticGridMap map(10, 10, 0.05, {0.0, 0.0}, {"sofa"});
    CHECK_THROWS_AS(trace_semantic(map, {0.2, 0.2, 0.0}, 0.0, 3, 1.0), std::out_of_range);
}

TEST_CASE("bearing into map frame uses the particle heading")
{
    SemanticGridMap map(40, 40, 0.05, {0.0, 0.0}, {"door"});
    // object north of the start (positive y)
    for (int x = 18; x < 22; ++x)
        map.set_class_bit(x, 30, 0);

    // facing +y, object straight ahead
    const Pose2D facing_obj{1.0, 0.5, kPi / 2.0};
    CHECK(trace_semantic(map, facing_obj, 0.0, 0, 10.0).outcome == TraceOutcome::hit_class);

    // facing +x, object at +pi/2 camera bearing
    const Pose2D facing_east{1.0, 0.5, 0.0};
    CHECK(trace_semantic(map, facing_east, kPi / 2.0, 0, 10.0).outcome ==
          TraceOutcome::hit_class);
    CHECK(trace_semantic(map, facing_east, 0.0, 0, 10.0).outcome !=
          TraceOutcome::hit_class);
}

TEST_CASE("trace distance grows with obstacle distance")
{
    double last = 0.0;
    for (int wall = 40; wall <= 180; wall += 20)
    {
        SemanticGridMap m(200, 20, 0.05, {0.0, 0.0});
        for (int y = 0; y < 20; ++y)
            m.set_occupancy(wall, y, Occupancy::occupied);
        const TraceResult r = ray_cast_occupancy(m, {0.5, 0.5}, 0.0, 20.0);
        CHECK(r.distance > last);
        last = r.distance;
    }
}
