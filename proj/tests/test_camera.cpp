#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sceneforge/camera.hpp"
#include "support.hpp"

using namespace sceneforge;

TEST(Camera, CoverageRamp) {
  EXPECT_EQ(ramp_b(0.0), 0.0);
  EXPECT_EQ(ramp_b(0.2), 0.0);
  EXPECT_NEAR(ramp_b(0.3), 0.5, 1e-12);
  EXPECT_EQ(ramp_b(0.4), 1.0);
  EXPECT_EQ(ramp_b(0.9), 1.0);
}

TEST(Camera, OccluderFixturesMatchOracle) {
  const Catalog& c = sftest::catalog();
  for (int k = 0; k < 4; ++k) {
    const GeometricScene s = sftest::camera_fixture(k);
    const LookAtResult r = lookat_ex(s, c, {"plant_1"});
    const auto want = sftest::oracle_views(s, c, {"plant_1"});
    int best = 0;
    for (int i = 1; i < kViewCandidates; ++i)
      if (want[i].f > want[best].f + 1e-9) best = i;
    EXPECT_EQ(r.index, best) << "fixture " << k;
    for (int i = 0; i < kViewCandidates; ++i) {
      EXPECT_EQ(r.scores[i].visSel, want[i].visSel) << k << " view " << i;
      EXPECT_NEAR(r.scores[i].visAll, want[i].visAll, 1e-12) << k << " view " << i;
      EXPECT_NEAR(r.scores[i].scrSel, want[i].scrSel, 0.01) << k << " view " << i;
    }
  }
}

TEST(Camera, CandidatesCircleTheSelection) {
  const Catalog& c = sftest::catalog();
  const GeometricScene s = sftest::camera_fixture(0);
  const OrientedBox b = world_box(s, c, "plant_1");
  Vec3 lo{1e9, 1e9, 1e9}, hi{-1e9, -1e9, -1e9};
  for (const Vec3& p : b.corners()) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
  }
  const double diag = norm(hi - lo);
  for (int k = 0; k < kViewCandidates; ++k) {
    const Camera cam = view_candidate(s, c, {"plant_1"}, k);
    EXPECT_NEAR(norm((cam.position - cam.target).xy()), 1.2 * diag, 1e-9);
    EXPECT_NEAR(cam.position.z, hi.z + 0.25 * diag, 1e-9);
    EXPECT_NEAR(std::atan2(cam.position.y - cam.target.y, cam.position.x - cam.target.x),
                std::remainder(k * kTwoPi / 12, kTwoPi), 1e-9);
  }
}

TEST(Camera, UnoccludedViewSeesSelection) {
  const Catalog& c = sftest::catalog();
  GeometricScene s = sftest::camera_fixture(0);
  std::erase_if(s.instances, [](const ModelInstance& i) { return i.id.rfind("occ_", 0) == 0; });
  const LookAtResult r = lookat_ex(s, c, {"plant_1"});
  EXPECT_EQ(r.index, 0);  // all views tie
  for (const auto& v : r.scores) EXPECT_EQ(v.visSel, 1);
}

TEST(Camera, JsonRoundTrip) {
  Camera cam;
  cam.position = {1, 2, 3};
  cam.fovDegrees = 45;
  EXPECT_EQ(camera_from_json(Json::parse(to_json(cam).dump())), cam);
}
