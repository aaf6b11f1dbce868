"""Python smoke tests for the smcl extension module."""

import math
import os

import pytest

import smcl


@pytest.fixture(scope="module")
def box_map():
    m = smcl.SemanticGridMap(100, 80, 0.05, smcl.WorldPoint(0.0, 0.0), ["sofa"])
    for x in range(100):
        m.set_occupancy(x, 0, smcl.Occupancy.OCCUPIED)
        m.set_occupancy(x, 79, smcl.Occupancy.OCCUPIED)
    for y in range(80):
        m.set_occupancy(0, y, smcl.Occupancy.OCCUPIED)
        m.set_occupancy(99, y, smcl.Occupancy.OCCUPIED)
    for y in range(30, 50):
        for x in range(70, 80):
            m.set_class_bit(x, y, 0)
    return m


def test_map_queries(box_map):
    assert box_map.width == 100
    assert box_map.occupancy_at(0, 0) == smcl.Occupancy.OCCUPIED
    assert box_map.occupancy_at(50, 40) == smcl.Occupancy.FREE
    assert box_map.has_class_at(75, 40, 0)
    assert box_map.cell_at(smcl.WorldPoint(-1.0, 0.0)) == smcl.OUT_OF_BOUNDS
    assert box_map.class_index("sofa") == 0
    assert box_map.class_index("desk") == -1


def test_edt_decodes_distances(box_map):
    edt = smcl.compute_edt(box_map, 2.0)
    assert edt.raw_at(0, 0) == 0
    d = edt.distance_at(5, 40)
    assert abs(d - 5 * 0.05) < 2.0 / 255.0 + 0.05 * math.sqrt(2.0)


def test_ray_casting(box_map):
    hit = smcl.ray_cast_occupancy(box_map, smcl.WorldPoint(2.5, 2.0), 0.0, 10.0)
    assert hit.outcome == smcl.TraceOutcome.BLOCKED_BY_WALL
    assert abs(hit.distance - (99 * 0.05 - 2.5)) <= 0.08

    trace = smcl.trace_semantic(box_map, smcl.Pose2D(2.5, 2.0, 0.0), 0.0, 0, 10.0)
    assert trace.outcome == smcl.TraceOutcome.HIT_CLASS
    assert abs(trace.distance - (70 * 0.05 - 2.5)) <= 0.08


def test_beam_end_peak(box_map):
    edt = smcl.compute_edt(box_map, 2.0)
    params = smcl.SensorModelParams()
    frame = smcl.TofFrame()
    # all 32 middle-row beams valid at 1 m
    for col in range(8):
        frame.set_front_zone(3, col, 1.0, True)
        for sensor in range(3):
            frame.set_side_beam(sensor, col, 1.0, True)

    log_l = smcl.beam_end_log_likelihood(smcl.Pose2D(2.5, 2.0, 0.0), frame, edt, params)
    assert log_l is not None
    peak = 32.0 * math.log(1.0 / math.sqrt(2.0 * math.pi * params.sigma_g))
    assert log_l <= peak + 1e-9


def test_filter_loop(box_map):
    cfg = smcl.FilterConfig()
    cfg.n_particles = 256
    cfg.rng_seed = 3
    pf = smcl.ParticleFilter(box_map, cfg)
    pf.init_uniform()
    assert len(pf.particles) == 256
    assert abs(sum(p.weight for p in pf.particles) - 1.0) < 1e-5

    pf.motion_update(smcl.OdometryDelta(0.1, 0.0, 0.05))
    pf.measurement_update([0.0] * 255 + [5.0])
    assert pf.particles[255].weight > pf.particles[0].weight
    pf.resample()
    est = pf.estimate_pose()
    assert math.isfinite(est.x) and math.isfinite(est.theta)


def test_simulation_and_run(box_map, tmp_path):
    sim = smcl.SimConfig()
    sim.rng_seed = 5
    wps = [smcl.WorldPoint(1.0, 1.0), smcl.WorldPoint(3.0, 1.0), smcl.WorldPoint(3.0, 2.5)]
    record = smcl.generate_sequence(box_map, wps, sim, 0.5, 1.2)
    assert len(record.ground_truth) > 100
    assert len(record.checkpoints) >= 2

    cfg = smcl.FilterConfig()
    cfg.n_particles = 512
    cfg.rng_seed = 5
    out = smcl.run_record(box_map, record, "fusion", cfg)
    assert len(out.estimates) > 0
    assert len(out.checkpoints) == len(record.checkpoints)

    # sequence file round-trip through the ndjson format
    seq_path = tmp_path / "seq.ndjson"
    smcl.write_sequence(seq_path, record, box_map, sim)
    out2 = smcl.run_sequence_file(box_map, seq_path, "fusion", cfg)
    assert len(out2.estimates) == len(out.estimates)
    assert out2.estimates[-1].pose.x == out.estimates[-1].pose.x


def test_evaluation_round():
    estimates = [(float(t), [0.1, 0.0, 0.0]) for t in range(10)]
    checkpoints = [(float(t), [0.0, 0.0, 0.0]) for t in range(10)]
    result = smcl.evaluate_run(estimates, checkpoints)
    assert result.success
    assert result.convergence_time == 0.0
    assert abs(result.ate_after_convergence - 0.1) < 1e-9

    summary = smcl.aggregate([result])
    assert summary.success_rate == 1.0


def test_clusters():
    parts = []
    for i in range(100):
        p = smcl.Particle()
        p.x, p.y, p.weight = 1.0 + 0.01 * i, 1.0, 1.0
        parts.append(p)
    for i in range(100):
        p = smcl.Particle()
        p.x, p.y, p.weight = 9.0 + 0.01 * i, 5.0, 1.0
        parts.append(p)
    clusters = smcl.find_particle_clusters(parts, 0.5, 0.1)
    assert len(clusters) == 2
    assert smcl.count_separated_clusters(clusters, 3.0) == 2


def test_bundled_world_loads():
    data_dir = os.environ.get("SMCL_DATA_DIR")
    if not data_dir:
        pytest.skip("SMCL_DATA_DIR not set")
    m = smcl.load_map(os.path.join(data_dir, "office.pgm"),
                      os.path.join(data_dir, "office.json"))
    assert m.width == 371 and m.height == 302
    assert len(m.class_table) == 10
    area = m.width * m.height * m.resolution * m.resolution
    assert abs(area - 280.0) < 3.0


def test_render_png(box_map, tmp_path):
    out = tmp_path / "map.png"
    smcl.render_map_png(box_map, out, 2)
    assert out.exists() and out.stat().st_size > 100
