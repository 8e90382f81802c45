#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "sceneforge/catalog.hpp"
#include "sceneforge/error.hpp"
#include "sceneforge/geometry.hpp"
#include "sceneforge/json_util.hpp"
#include "sceneforge/math.hpp"

namespace sceneforge {

inline constexpr int kViewCandidates = 12;
inline constexpr double kViewRadiusFactor = 1.2;
inline constexpr double kViewHeightFactor = 0.25;
inline constexpr double kNearPlane = 0.05;
inline constexpr int kVisibleProbes = 5;

struct Camera {
  Vec3 position{0.0, -5.5, 3.0};
  Vec3 target{0.0, 0.0, 0.8};
  Vec3 up{0.0, 0.0, 1.0};
  double fovDegrees = 60.0;
  bool operator==(const Camera&) const = default;

  Vec3 forward() const { return normalized(target - position); }
  Vec3 right() const { return normalized(cross(forward(), up)); }
};

inline OrderedJson to_json(const Camera& c) {
  OrderedJson j;
  j["position"] = detail::to_json(c.position);
  j["target"] = detail::to_json(c.target);
  j["up"] = detail::to_json(c.up);
  j["fovDegrees"] = c.fovDegrees;
  return j;
}

template <class J>
Camera camera_from_json(const J& j, const std::string& where = "camera") {
  Camera c;
  c.position = detail::vec3_from(detail::require(j, "position", where), where + ".position");
  c.target = detail::vec3_from(detail::require(j, "target", where), where + ".target");
  c.up = detail::vec3_from(detail::require(j, "up", where), where + ".up");
  c.fovDegrees = j.value("fovDegrees", 60.0);
  return c;
}

/// Screen-coverage bonus: 0 up to 0.2, linear to 1 at 0.4, 1 beyond.
inline double ramp_b(double x) {
  if (x <= 0.2) return 0.0;
  if (x >= 0.4) return 1.0;
  return (x - 0.2) / 0.2;
}

struct ViewScore {
  double f = 0.0;
  int visSel = 0;
  double visAll = 0.0;
  double scrSel = 0.0;
};

namespace detail {

/// Camera-space coordinates (right, up, depth).
inline Vec3 to_camera(const Camera& c, Vec3 p) {
  const Vec3 f = c.forward();
  const Vec3 r = c.right();
  const Vec3 u = cross(r, f);
  const Vec3 d = p - c.position;
  return {dot(d, r), dot(d, u), dot(d, f)};
}

inline bool in_frustum(const Camera& c, Vec3 p) {
  const Vec3 q = to_camera(c, p);
  if (q.z <= kNearPlane) return false;
  const double t = std::tan(c.fovDegrees * kPi / 360.0);
  return std::abs(q.x) <= t * q.z && std::abs(q.y) <= t * q.z;
}

/// Whether the open segment from a to b passes through the box.
inline bool segment_hits(Vec3 a, Vec3 b, const OrientedBox& box) {
  const Vec3 la = box.to_local(a);
  const Vec3 lb = box.to_local(b);
  const Vec3 d = lb - la;
  double t0 = 1e-9, t1 = 1.0 - 1e-9;
  const std::array<double, 3> o{la.x, la.y, la.z}, dir{d.x, d.y, d.z}, h{box.half.x, box.half.y, box.half.z};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(dir[k]) < 1e-15) {
      if (o[k] < -h[k] || o[k] > h[k]) return false;
      continue;
    }
    double ta = (-h[k] - o[k]) / dir[k], tb = (h[k] - o[k]) / dir[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

/// Center and corners, pulled 1% toward the center so that points on a
/// shared contact face are not blocked by the supporting box.
inline std::array<Vec3, 9> probe_points(const OrientedBox& b) {
  std::array<Vec3, 9> out;
  out[0] = b.center;
  const auto corners = b.corners();
  for (int k = 0; k < 8; ++k) out[k + 1] = b.center + (corners[k] - b.center) * 0.99;
  return out;
}

}  // namespace detail

/// Instances that count as objects for visibility: everything with a
/// support parent (the room and other roots are scenery).
inline std::vector<const ModelInstance*> view_objects(const GeometricScene& s) {
  std::vector<const ModelInstance*> out;
  for (const auto& i : s.instances) {
    if (i.placement.supportParent) out.push_back(&i);
  }
  return out;
}

inline bool is_visible(const Camera& cam, const GeometricScene& s, const Catalog& c, const std::string& id) {
  const OrientedBox box = world_box(s, c, id);
  std::vector<OrientedBox> occluders;
  for (const auto* o : view_objects(s)) {
    if (o->id != id) occluders.push_back(world_box(*o, c.at(o->modelId)));
  }
  int visible = 0;
  for (const Vec3& p : detail::probe_points(box)) {
    if (!detail::in_frustum(cam, p)) continue;
    bool blocked = false;
    for (const auto& ob : occluders) {
      if (detail::segment_hits(cam.position, p, ob)) {
        blocked = true;
        break;
      }
    }
    if (!blocked && ++visible >= kVisibleProbes) return true;
  }
  return false;
}

/// World axis-aligned bounds of a set of instances.
inline std::pair<Vec3, Vec3> selection_bounds(const GeometricScene& s, const Catalog& c, const std::set<std::string>& sel) {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (const auto& id : sel) {
    for (const Vec3& p : world_box(s, c, id).corners()) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
    }
  }
  return {lo, hi};
}

/// Fraction of the image covered by the projected selection bounds.
inline double screen_fraction(const Camera& cam, Vec3 lo, Vec3 hi) {
  const double t = std::tan(cam.fovDegrees * kPi / 360.0);
  Polygon2 pts;
  for (double x : {lo.x, hi.x})
    for (double y : {lo.y, hi.y})
      for (double z : {lo.z, hi.z}) {
        const Vec3 q = detail::to_camera(cam, {x, y, z});
        if (q.z <= kNearPlane) continue;
        pts.push_back({q.x / (q.z * t), q.y / (q.z * t)});
      }
  if (pts.size() < 3) return 0.0;
  const Polygon2 hull = convex_hull(pts);
  if (hull.size() < 3) return 0.0;
  return polygon_area(clip_to_box(hull, 1.0, 1.0)) / 4.0;
}

/// f = visSel + b(scrSel) + visAll.
inline ViewScore view_score(const Camera& cam, const GeometricScene& s, const Catalog& c,
                            const std::set<std::string>& sel) {
  ViewScore v;
  const auto objects = view_objects(s);
  int seen = 0;
  for (const auto* o : objects) {
    const bool vis = is_visible(cam, s, c, o->id);
    if (vis) ++seen;
    if (vis && sel.count(o->id)) ++v.visSel;
  }
  for (const auto& id : sel) {
    const ModelInstance* i = s.find(id);
    if (i && !i->placement.supportParent && is_visible(cam, s, c, id)) ++v.visSel;
  }
  v.visAll = objects.empty() ? 0.0 : static_cast<double>(seen) / static_cast<double>(objects.size());
  if (!sel.empty()) {
    auto [lo, hi] = selection_bounds(s, c, sel);
    v.scrSel = screen_fraction(cam, lo, hi);
  }
  v.f = v.visSel + ramp_b(v.scrSel) + v.visAll;
  return v;
}

/// Candidate k of the 12 viewpoints around the selection.
inline Camera view_candidate(const GeometricScene& s, const Catalog& c, const std::set<std::string>& sel, int k) {
  if (sel.empty()) throw Error(ErrorCode::invalid_argument, "look at: empty selection");
  auto [lo, hi] = selection_bounds(s, c, sel);
  const Vec3 center = (lo + hi) * 0.5;
  const double diag = norm(hi - lo);
  const double az = k * kTwoPi / kViewCandidates;
  Camera cam;
  cam.target = center;
  cam.position = {center.x + kViewRadiusFactor * diag * std::cos(az), center.y + kViewRadiusFactor * diag * std::sin(az),
                  hi.z + kViewHeightFactor * diag};
  return cam;
}

struct LookAtResult {
  Camera camera;
  int index = 0;
  std::vector<ViewScore> scores;
};

/// Best of the 12 candidates by f; ties go to the smallest index.
inline LookAtResult lookat_ex(const GeometricScene& s, const Catalog& c, const std::set<std::string>& sel) {
  LookAtResult r;
  for (int k = 0; k < kViewCandidates; ++k) {
    const Camera cam = view_candidate(s, c, sel, k);
    r.scores.push_back(view_score(cam, s, c, sel));
    if (k == 0 || r.scores[k].f > r.scores[r.index].f) {
      r.index = k;
      r.camera = cam;
    }
  }
  return r;
}

inline Camera lookat(const GeometricScene& s, const Catalog& c, const std::set<std::string>& sel) {
  return lookat_ex(s, c, sel).camera;
}

}  // namespace sceneforge
