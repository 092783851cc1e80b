// Synthetic benchmark scenes, sliding simulation, studies, and the RANSAC
// baseline.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "tacloc/bench.hpp"
#include "tacloc/rng.hpp"

namespace tacloc {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<double> cumulative_areas(const TriangleMesh& mesh) {
  std::vector<double> cum(mesh.num_faces());
  double acc = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    acc += mesh.face_area(f);
    cum[f] = acc;
  }
  return cum;
}

int pick_face_by_area(const std::vector<double>& cum, Rng& rng) {
  const double r = rng.uniform() * cum.back();
  const auto it = std::lower_bound(cum.begin(), cum.end(), r);
  return static_cast<int>(std::min<std::size_t>(it - cum.begin(), cum.size() - 1));
}

/// Faces sharing an edge (two vertex indices) are neighbors.
std::vector<std::vector<int>> face_adjacency(const TriangleMesh& mesh) {
  std::unordered_map<std::uint64_t, int> edge_owner;
  edge_owner.reserve(mesh.num_faces() * 3);
  std::vector<std::vector<int>> adj(mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    for (int e = 0; e < 3; ++e) {
      const int a = mesh.faces[f][e];
      const int b = mesh.faces[f][(e + 1) % 3];
      const std::uint64_t key =
          (static_cast<std::uint64_t>(std::min(a, b)) << 32) |
          static_cast<std::uint64_t>(std::max(a, b));
      const auto [it, inserted] = edge_owner.try_emplace(key, static_cast<int>(f));
      if (!inserted && it->second != static_cast<int>(f)) {
        adj[f].push_back(it->second);
        adj[it->second].push_back(static_cast<int>(f));
      }
    }
  }
  return adj;
}

TriangleMesh submesh(const TriangleMesh& mesh, const std::vector<int>& faces) {
  TriangleMesh out;
  std::unordered_map<int, int> remap;
  remap.reserve(faces.size() * 3);
  for (int f : faces) {
    std::array<int, 3> tri{};
    for (int e = 0; e < 3; ++e) {
      const int v = mesh.faces[f][e];
      const auto [it, inserted] = remap.try_emplace(v, static_cast<int>(out.vertices.size()));
      if (inserted) out.vertices.push_back(mesh.vertices[v]);
      tri[e] = it->second;
    }
    out.faces.push_back(tri);
  }
  return out;
}

/// Geodesic-ish growth: Dijkstra over edge-adjacent faces by centroid
/// distance from an area-weighted seed, stopping once the popped area
/// reaches the target.
std::vector<int> grow_patch(const TriangleMesh& mesh,
                            const std::vector<std::vector<int>>& adj, int seed_face,
                            double target_area) {
  const double total = mesh.total_area();
  std::vector<double> dist(mesh.num_faces(), std::numeric_limits<double>::infinity());
  std::vector<char> done(mesh.num_faces(), 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[seed_face] = 0.0;
  heap.push({0.0, seed_face});

  std::vector<int> picked;
  double area = 0.0;
  while (!heap.empty() && area < target_area) {
    const auto [d, f] = heap.top();
    heap.pop();
    if (done[f]) continue;
    done[f] = 1;
    picked.push_back(f);
    area += mesh.face_area(f);
    for (int g : adj[f]) {
      if (done[g]) continue;
      const double nd = d + (mesh.face_centroid(g) - mesh.face_centroid(f)).norm();
      if (nd < dist[g]) {
        dist[g] = nd;
        heap.push({nd, g});
      }
    }
  }
  if (area < target_area * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "generate_scene: requested patch area " << target_area
        << " m^2 but the seed triangle's connected component only has " << area
        << " m^2 (mesh area " << total << " m^2; mesh appears disconnected)";
    throw std::runtime_error(msg.str());
  }
  return picked;
}

int surface_sample_count(double area, double voxel_size, double density_mult) {
  const double per_voxel = area / (voxel_size * voxel_size);
  return std::max(50, static_cast<int>(std::ceil(density_mult * per_voxel)));
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Shared front end for the graph studies: identical correspondences for
/// every threshold setting.
struct FrontEnd {
  OrientedPointCloud src_kp;
  OrientedPointCloud tgt_kp;
  std::vector<Correspondence> matches;
};

OrientedPointCloud gather(const OrientedPointCloud& cloud, const std::vector<int>& idx) {
  OrientedPointCloud out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(cloud.points[i], cloud.normals[i]);
  return out;
}

std::vector<int> keypoints_with_fallback(const OrientedPointCloud& cloud,
                                         const PipelineConfig& cfg) {
  std::vector<int> idx =
      iss_keypoints(cloud, cfg.effective_iss_salient_radius(),
                    cfg.effective_iss_nms_radius(), cfg.iss_gamma21, cfg.iss_gamma32);
  if (static_cast<int>(idx.size()) < 10) {
    idx = uniform_keypoints(cloud, 3.0 * cfg.voxel_size);
  }
  return idx;
}

FrontEnd run_front_end(const SyntheticScene& scene, const PipelineConfig& cfg) {
  FrontEnd fe;
  const OrientedPointCloud src = voxel_downsample(scene.source, cfg.voxel_size);
  const OrientedPointCloud tgt = voxel_downsample(scene.target, cfg.voxel_size);
  const std::vector<int> src_idx = keypoints_with_fallback(src, cfg);
  const std::vector<int> tgt_idx = keypoints_with_fallback(tgt, cfg);
  const std::vector<Descriptor> src_desc = fpfh(src, src_idx, cfg.fpfh_radius);
  const std::vector<Descriptor> tgt_desc = fpfh(tgt, tgt_idx, cfg.fpfh_radius);
  fe.src_kp = gather(src, src_idx);
  fe.tgt_kp = gather(tgt, tgt_idx);
  fe.matches = match_features(src_desc, tgt_desc, cfg.num_initial_correspondences);
  return fe;
}

struct GraphStats {
  double edges = 0.0;
  double cliques = 0.0;
  double clique_ms = 0.0;
};

GraphStats graph_stats(const FrontEnd& fe, const PipelineConfig& cfg, double delta_d,
                       double delta_alpha) {
  GraphStats s;
  if (fe.matches.size() < 2) return s;
  const CompatibilityGraph g =
      build_graph(fe.matches, fe.src_kp, fe.tgt_kp, delta_d, delta_alpha);
  s.edges = static_cast<double>(g.edge_count());
  const auto t0 = Clock::now();
  const CliqueEnumeration enumeration =
      maximal_cliques(g, std::numeric_limits<int>::max(), cfg.clique_budget);
  s.clique_ms = ms_since(t0);
  s.cliques = static_cast<double>(enumeration.cliques.size());
  return s;
}

void check_noise(const NoiseSpec& noise) {
  if (noise.point_sigma < 0.0 || noise.ee_trans_sigma < 0.0 || noise.ee_rot_sigma < 0.0) {
    throw std::invalid_argument("noise sigmas must be non-negative");
  }
}

}  // namespace

SyntheticScene generate_scene(const TriangleMesh& mesh, double patch_fraction,
                              const NoiseSpec& noise, std::uint64_t seed,
                              double voxel_size) {
  if (!(patch_fraction > 0.0) || patch_fraction > 1.0) {
    throw std::invalid_argument("generate_scene: patch_fraction must be in (0, 1]");
  }
  check_noise(noise);
  if (!(voxel_size > 0.0)) {
    throw std::invalid_argument("generate_scene: voxel_size must be positive");
  }
  mesh.validate();

  SyntheticScene scene;
  scene.patch_fraction = patch_fraction;
  scene.noise = noise;
  scene.seed = seed;

  Rng rng(seed);
  const std::uint64_t target_seed = rng.raw();
  const std::uint64_t patch_seed = rng.raw();

  const double area = mesh.total_area();
  scene.target = sample_mesh(mesh, surface_sample_count(area, voxel_size, 3.0), target_seed);

  const std::vector<double> cum = cumulative_areas(mesh);
  const int seed_face = pick_face_by_area(cum, rng);
  const std::vector<int> patch_faces =
      grow_patch(mesh, face_adjacency(mesh), seed_face, patch_fraction * area);
  const TriangleMesh patch_mesh = submesh(mesh, patch_faces);

  // Tactile sampling is much denser than the model cloud (10x here).
  OrientedPointCloud patch = sample_mesh(
      patch_mesh, surface_sample_count(patch_mesh.total_area(), voxel_size, 30.0),
      patch_seed);
  if (noise.point_sigma > 0.0) {
    for (auto& p : patch.points) p += noise.point_sigma * rng.gaussian_vec3();
  }

  const Mat3 rotation = rng.random_rotation();
  const auto [lo, hi] = mesh.bounding_box();
  const double reach = (hi - lo).norm();
  const Vec3 translation(rng.uniform(-reach, reach), rng.uniform(-reach, reach),
                         rng.uniform(-reach, reach));
  const RigidTransform displace(rotation, translation);
  scene.source = apply(displace, patch);
  scene.gt = displace.inverse();
  return scene;
}

double rotation_error_deg(const RigidTransform& gt, const RigidTransform& est) {
  const Mat3 rel = gt.rotation().transpose() * est.rotation();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

double translation_error(const RigidTransform& gt, const RigidTransform& est) {
  return (gt.translation() - est.translation()).norm();
}

bool registration_success(double re_deg, double te, double re_max_deg, double te_max) {
  return re_deg < re_max_deg && te < te_max;
}

RecallCurve recall_curve(const std::vector<RegistrationMetrics>& results,
                         const std::vector<double>& re_thresholds_deg,
                         const std::vector<double>& te_thresholds) {
  if (results.empty()) throw std::invalid_argument("recall_curve: no results");
  RecallCurve curve;
  curve.re_thresholds_deg = re_thresholds_deg;
  curve.te_thresholds = te_thresholds;
  const double n = static_cast<double>(results.size());
  // Inclusive comparison so a zero threshold counts exactly-zero errors.
  for (double t : re_thresholds_deg) {
    long hits = std::count_if(results.begin(), results.end(),
                              [t](const RegistrationMetrics& m) { return m.re_deg <= t; });
    curve.re_recall.push_back(hits / n);
  }
  for (double t : te_thresholds) {
    long hits = std::count_if(results.begin(), results.end(),
                              [t](const RegistrationMetrics& m) { return m.te <= t; });
    curve.te_recall.push_back(hits / n);
  }
  return curve;
}

RansacResult ransac_baseline(const std::vector<Correspondence>& correspondences,
                             const OrientedPointCloud& src_kp,
                             const OrientedPointCloud& tgt_kp,
                             const PipelineConfig& config, std::uint64_t seed) {
  RansacResult result;
  const int n = static_cast<int>(correspondences.size());
  if (n < 3) {
    throw std::invalid_argument("ransac_baseline: need >= 3 correspondences");
  }

  Rng rng(seed);
  auto model_inliers = [&](const RigidTransform& T) {
    std::vector<int> inl;
    for (int i = 0; i < n; ++i) {
      const Vec3& p = src_kp.points[correspondences[i].src_index];
      const Vec3& q = tgt_kp.points[correspondences[i].tgt_index];
      if ((q - T * p).norm() < config.delta_d) inl.push_back(i);
    }
    return inl;
  };
  auto fit = [&](const std::vector<int>& sample, RigidTransform& T) {
    std::vector<Vec3> p, q;
    p.reserve(sample.size());
    q.reserve(sample.size());
    Vec3 pc = Vec3::Zero(), qc = Vec3::Zero();
    for (int i : sample) {
      p.push_back(src_kp.points[correspondences[i].src_index]);
      q.push_back(tgt_kp.points[correspondences[i].tgt_index]);
      pc += p.back();
      qc += q.back();
    }
    pc /= static_cast<double>(sample.size());
    qc /= static_cast<double>(sample.size());
    std::vector<Vec3> pcen(p), qcen(q);
    for (auto& v : pcen) v -= pc;
    for (auto& v : qcen) v -= qc;
    const RotationEstimate rot = estimate_rotation(pcen, qcen, {}, {}, 0.0);
    if (rot.degenerate) return false;
    T = RigidTransform(rot.rotation, estimate_translation(p, q, rot.rotation));
    return true;
  };

  int best_count = -1;
  RigidTransform best_T;
  for (int iter = 0; iter < config.ransac_iters; ++iter) {
    const int i0 = static_cast<int>(rng.uniform_index(n));
    int i1 = i0, i2 = i0;
    while (i1 == i0) i1 = static_cast<int>(rng.uniform_index(n));
    while (i2 == i0 || i2 == i1) i2 = static_cast<int>(rng.uniform_index(n));
    RigidTransform T;
    if (!fit({i0, i1, i2}, T)) continue;
    const int count = static_cast<int>(model_inliers(T).size());
    if (count > best_count) {
      best_count = count;
      best_T = T;
    }
  }
  if (best_count < 3) return result;

  RigidTransform refined;
  if (fit(model_inliers(best_T), refined)) best_T = refined;
  result.transform = best_T;
  result.inliers = static_cast<int>(model_inliers(best_T).size());
  result.success = result.inliers >= 3;
  return result;
}

std::vector<PruningRow> run_pruning_study(const std::vector<SyntheticScene>& scenes,
                                          const std::vector<double>& delta_alpha_values,
                                          const PipelineConfig& config) {
  if (scenes.empty()) throw std::invalid_argument("run_pruning_study: no scenes");
  std::vector<FrontEnd> fronts;
  fronts.reserve(scenes.size());
  for (const auto& s : scenes) fronts.push_back(run_front_end(s, config));

  std::vector<PruningRow> rows;
  for (double da : delta_alpha_values) {
    PruningRow row;
    row.delta_alpha = da;
    for (const auto& fe : fronts) {
      const GraphStats s = graph_stats(fe, config, config.delta_d, da);
      row.mean_edges += s.edges;
      row.mean_cliques += s.cliques;
      row.mean_clique_ms += s.clique_ms;
    }
    const double n = static_cast<double>(fronts.size());
    row.mean_edges /= n;
    row.mean_cliques /= n;
    row.mean_clique_ms /= n;
    rows.push_back(row);
  }
  return rows;
}

std::vector<ThresholdSweepRow> run_threshold_sweep(
    const std::vector<SyntheticScene>& scenes, const std::vector<double>& delta_d_values,
    const std::vector<double>& delta_alpha_values, const PipelineConfig& config) {
  if (scenes.empty()) throw std::invalid_argument("run_threshold_sweep: no scenes");
  std::vector<FrontEnd> fronts;
  fronts.reserve(scenes.size());
  for (const auto& s : scenes) fronts.push_back(run_front_end(s, config));

  std::vector<ThresholdSweepRow> rows;
  for (double dd : delta_d_values) {
    for (double da : delta_alpha_values) {
      ThresholdSweepRow row;
      row.delta_d = dd;
      row.delta_alpha = da;
      for (const auto& fe : fronts) {
        const GraphStats s = graph_stats(fe, config, dd, da);
        row.mean_edges += s.edges;
        row.mean_cliques += s.cliques;
        row.mean_clique_ms += s.clique_ms;
      }
      const double n = static_cast<double>(fronts.size());
      row.mean_edges /= n;
      row.mean_cliques /= n;
      row.mean_clique_ms /= n;
      rows.push_back(row);
    }
  }
  return rows;
}

SlidingSequence simulate_sliding(const MeshDistanceIndex& surface, double length,
                                 double frame_spacing, double patch_radius,
                                 const NoiseSpec& noise, std::uint64_t seed,
                                 double voxel_size) {
  if (!(length > 0.0) || !(frame_spacing > 0.0) || !(patch_radius > 0.0)) {
    throw std::invalid_argument("simulate_sliding: lengths must be positive");
  }
  check_noise(noise);
  const TriangleMesh& mesh = surface.mesh();
  Rng rng(seed);

  // Start point: area-weighted face, uniform barycentric sample.
  const std::vector<double> cum = cumulative_areas(mesh);
  const int f0 = pick_face_by_area(cum, rng);
  double bu = rng.uniform(), bv = rng.uniform();
  if (bu + bv > 1.0) {
    bu = 1.0 - bu;
    bv = 1.0 - bv;
  }
  const auto& tri0 = mesh.faces[f0];
  Vec3 pos = mesh.vertices[tri0[0]] +
             bu * (mesh.vertices[tri0[1]] - mesh.vertices[tri0[0]]) +
             bv * (mesh.vertices[tri0[2]] - mesh.vertices[tri0[0]]);
  Vec3 normal = mesh.face_normal(f0);
  Vec3 dir;
  do {
    const Vec3 g = rng.gaussian_vec3();
    dir = g - g.dot(normal) * normal;
  } while (dir.norm() < 1e-9);
  dir.normalize();

  // Local face lookup for patch extraction.
  std::vector<Vec3> centroids(mesh.num_faces());
  double max_face_radius = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    centroids[f] = mesh.face_centroid(f);
    for (int v : mesh.faces[f]) {
      max_face_radius = std::max(max_face_radius, (mesh.vertices[v] - centroids[f]).norm());
    }
  }
  const KdTree centroid_tree(centroids);

  SlidingSequence seq;
  auto capture = [&](const Vec3& at, const Vec3& n, const Vec3& d) {
    // Sensor frame: z along the outward normal, x along the slide direction.
    Mat3 R;
    const Vec3 x = (d - d.dot(n) * n).normalized();
    R.col(0) = x;
    R.col(1) = n.cross(x);
    R.col(2) = n;
    const RigidTransform exact(R, at);

    std::vector<int> near;
    double reach = patch_radius;
    do {
      near = centroid_tree.radius_search(at, reach + max_face_radius);
      reach *= 2.0;
    } while (near.empty());
    const TriangleMesh local = submesh(mesh, near);
    const OrientedPointCloud dense = sample_mesh(
        local, surface_sample_count(local.total_area(), voxel_size, 30.0), rng.raw());

    TouchFrame frame;
    const RigidTransform to_sensor = exact.inverse();
    for (std::size_t i = 0; i < dense.size(); ++i) {
      if ((dense.points[i] - at).norm() > patch_radius) continue;
      frame.cloud.push_back(to_sensor * dense.points[i],
                            to_sensor.rotate(dense.normals[i]));
    }
    if (frame.cloud.empty()) {
      // Degenerate patch (huge faces relative to the radius): keep the
      // nearest sample so the frame stays valid.
      const KdTree dense_tree(dense.points);
      const int j = dense_tree.nearest(at).index;
      frame.cloud.push_back(to_sensor * dense.points[j], to_sensor.rotate(dense.normals[j]));
    }

    frame.ee_pose = exact;
    if (!seq.frames.empty() &&
        (noise.ee_trans_sigma > 0.0 || noise.ee_rot_sigma > 0.0)) {
      Vec3 axis;
      do {
        axis = rng.gaussian_vec3();
      } while (axis.norm() < 1e-9);
      axis.normalize();
      const RigidTransform jitter(
          RigidTransform::from_axis_angle(axis, rng.gaussian() * noise.ee_rot_sigma)
              .rotation(),
          rng.gaussian_vec3() * noise.ee_trans_sigma);
      frame.ee_pose = compose(exact, jitter);
    }
    if (seq.frames.empty()) seq.gt = exact;
    seq.frames.push_back(std::move(frame));
  };

  const double step = 0.5e-3;
  const int max_steps = static_cast<int>(std::ceil(length / step)) + 8;
  double traveled = 0.0, next_capture = 0.0;
  capture(pos, normal, dir);
  next_capture += frame_spacing;
  for (int k = 0; k < max_steps && traveled < length; ++k) {
    const Vec3 probe = pos + step * dir;
    const MeshDistanceIndex::Closest c = surface.closest(probe);
    const Vec3 n2 = mesh.face_normal(c.face);
    const Vec3 tangent = dir - dir.dot(n2) * n2;
    if (tangent.norm() > 1e-9) dir = tangent.normalized();
    pos = c.point;
    normal = n2;
    traveled += step;
    if (traveled + 1e-12 >= next_capture) {
      capture(pos, normal, dir);
      next_capture += frame_spacing;
    }
  }
  return seq;
}

std::vector<SensitivityRow> run_sensitivity_study(
    const TriangleMesh& mesh, const std::vector<double>& sliding_lengths,
    const std::vector<NoiseSpec>& noise_levels, int trials,
    const PipelineConfig& config, std::uint64_t base_seed, int threads) {
  if (sliding_lengths.empty() || noise_levels.empty() || trials < 1) {
    throw std::invalid_argument("run_sensitivity_study: empty grid");
  }
  const MeshDistanceIndex surface(mesh);
  const OrientedPointCloud target = sample_mesh(
      mesh, surface_sample_count(mesh.total_area(), config.voxel_size, 3.0), base_seed);
  const auto [lo, hi] = mesh.bounding_box();
  const double diagonal = (hi - lo).norm();
  // Wide pad: short swaths must still capture enough relief to disambiguate
  // the pose, otherwise zero-noise cells fail on feature-poor paths.
  const double frame_spacing = 2e-3, patch_radius = 6e-3;

  const int cells = static_cast<int>(sliding_lengths.size() * noise_levels.size());
  std::vector<double> te(static_cast<std::size_t>(cells) * trials);
  std::vector<double> re(te.size());
  parallel_for(cells * trials, threads, [&](int idx) {
    const int cell = idx / trials;
    const double length = sliding_lengths[cell / noise_levels.size()];
    const NoiseSpec& noise = noise_levels[cell % noise_levels.size()];
    const std::uint64_t seed = base_seed + 1 + static_cast<std::uint64_t>(idx);
    const SlidingSequence seq = simulate_sliding(surface, length, frame_spacing,
                                                 patch_radius, noise, seed,
                                                 config.voxel_size);
    const OrientedPointCloud submap =
        build_submap(seq.frames, RigidTransform::identity(), config.voxel_size);
    const RegistrationResult r = register_clouds(submap, target, config);
    te[idx] = translation_error(seq.gt, r.best.transform) / diagonal;
    re[idx] = rotation_error_deg(seq.gt, r.best.transform);
  });

  std::vector<SensitivityRow> rows;
  for (int cell = 0; cell < cells; ++cell) {
    SensitivityRow row;
    row.sliding_length = sliding_lengths[cell / noise_levels.size()];
    row.noise = noise_levels[cell % noise_levels.size()];
    std::vector<double> cell_te(te.begin() + static_cast<std::ptrdiff_t>(cell) * trials,
                                te.begin() + static_cast<std::ptrdiff_t>(cell + 1) * trials);
    std::vector<double> cell_re(re.begin() + static_cast<std::ptrdiff_t>(cell) * trials,
                                re.begin() + static_cast<std::ptrdiff_t>(cell + 1) * trials);
    row.median_te_normalized = median(cell_te);
    row.median_re_deg = median(cell_re);
    rows.push_back(row);
  }
  return rows;
}

std::vector<RegistrationMetrics> run_registration_trials(
    const TriangleMesh& mesh, double patch_fraction, const NoiseSpec& noise,
    int trials, const PipelineConfig& config, std::uint64_t base_seed, int threads) {
  if (trials < 1) throw std::invalid_argument("run_registration_trials: trials < 1");
  std::vector<RegistrationMetrics> metrics(trials);
  parallel_for(trials, threads, [&](int i) {
    const SyntheticScene scene = generate_scene(mesh, patch_fraction, noise,
                                                base_seed + static_cast<std::uint64_t>(i),
                                                config.voxel_size);
    const auto t0 = Clock::now();
    const RegistrationResult r = register_clouds(scene.source, scene.target, config);
    RegistrationMetrics& m = metrics[i];
    m.total_seconds = ms_since(t0) / 1000.0;
    m.wallclock = r.timings;
    m.re_deg = rotation_error_deg(scene.gt, r.best.transform);
    m.te = translation_error(scene.gt, r.best.transform);
    m.success = registration_success(m.re_deg, m.te);
  });
  return metrics;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tacloc
