#include "cqrl/observation.hpp"

namespace cqrl {

std::vector<float> road_mask(const WorldState& state, const SimParams& params, const Ogm& like) {
  std::vector<float> mask(static_cast<size_t>(like.h) * like.w, 0.0f);
  const Pose ego = state.ego_pose();
  for (int r = 0; r < like.h; ++r)
    for (int c = 0; c < like.w; ++c) {
      const Vec2 world = ego.pos + like.center_of(r, c).rotated(ego.heading);
      const Frenet f = state.route->project(world);
      if (std::abs(f.l) <= params.lane_half_width && f.s > 1e-9 &&
          f.s < state.route->length() - 1e-9)
        mask[static_cast<size_t>(r) * like.w + c] = 1.0f;
    }
  return mask;
}

namespace {

void pool_into(const std::vector<float>& src, int h, int w, int k, float* dst) {
  const int ho = h / k, wo = w / k;
  const float inv = 1.0f / static_cast<float>(k * k);
  for (int i = 0; i < ho; ++i)
    for (int j = 0; j < wo; ++j) {
      float acc = 0.0f;
      for (int di = 0; di < k; ++di)
        for (int dj = 0; dj < k; ++dj) acc += src[static_cast<size_t>(i * k + di) * w + j * k + dj];
      dst[static_cast<size_t>(i) * wo + j] = acc * inv;
    }
}

}  // namespace

Observation build_observation(const Ogm& ogm_t, const Ogm& ogm_prev,
                              const std::vector<float>& road, double v, double v_lim,
                              int pool) {
  if (ogm_t.h != ogm_prev.h || ogm_t.w != ogm_prev.w || ogm_t.cell != ogm_prev.cell)
    throw Error("build_observation: OGM geometry mismatch");
  if (road.size() != ogm_t.cells.size())
    throw Error("build_observation: road mask geometry mismatch");
  if (ogm_t.h % pool != 0 || ogm_t.w % pool != 0)
    throw Error("build_observation: pool factor must divide the grid");

  Observation obs;
  obs.h = ogm_t.h / pool;
  obs.w = ogm_t.w / pool;
  obs.data.assign(static_cast<size_t>(obs.channels) * obs.h * obs.w, 0.0f);
  const long plane = static_cast<long>(obs.h) * obs.w;
  pool_into(ogm_t.cells, ogm_t.h, ogm_t.w, pool, obs.data.data());
  pool_into(ogm_prev.cells, ogm_t.h, ogm_t.w, pool, obs.data.data() + plane);
  pool_into(road, ogm_t.h, ogm_t.w, pool, obs.data.data() + 2 * plane);
  const float speed_plane = static_cast<float>(v / v_lim);
  std::fill(obs.data.begin() + 3 * plane, obs.data.end(), speed_plane);
  obs.raw_v = static_cast<float>(v);
  return obs;
}

}  // namespace cqrl
