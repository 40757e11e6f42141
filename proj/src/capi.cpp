#include "accessmap.h"

#include <cstring>
#include <fstream>
#include <string>

#include "core/pipeline.hpp"
#include "core/scale.hpp"
#include "core/synth.hpp"
#include "core/volume_store.hpp"

struct amap_session {
  amap::PipelineConfig config;
  std::string error;
};

namespace {

amap_status status_from(amap::ErrorKind kind) {
  switch (kind) {
    case amap::ErrorKind::Io: return AMAP_ERR_IO;
    case amap::ErrorKind::Parse: return AMAP_ERR_PARSE;
    case amap::ErrorKind::Config: return AMAP_ERR_CONFIG;
    case amap::ErrorKind::Geometry:
    case amap::ErrorKind::Pipeline: return AMAP_ERR_RUNTIME;
  }
  return AMAP_ERR_RUNTIME;
}

template <typename F>
amap_status guarded(amap_session* s, F&& fn) {
  if (!s) return AMAP_ERR_USAGE;
  s->error.clear();
  try {
    fn();
    return AMAP_OK;
  } catch (const amap::Error& e) {
    s->error = e.what();
    return status_from(e.kind());
  } catch (const std::exception& e) {
    s->error = e.what();
    return AMAP_ERR_RUNTIME;
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) amap::throw_io("cannot write file: " + path.string());
  out << text;
  if (!out) amap::throw_io("write failed: " + path.string());
}

struct ScaledSession {
  amap::SessionData data;
  amap::ScaleEstimate estimate;
  std::vector<amap::SparseMapPoint> cloud;
  std::vector<amap::TrajectoryEntry> trajectory;
};

ScaledSession load_scaled(const amap::PipelineConfig& cfg) {
  ScaledSession s;
  s.data = amap::load_session(cfg);
  s.estimate = amap::estimate_scale(s.data.events, s.data.odometry,
                                    s.data.trajectory, cfg.odometry_frame);
  s.cloud = amap::apply_scale(s.estimate.factor, s.data.cloud);
  s.trajectory = amap::apply_scale(s.estimate.factor, s.data.trajectory);
  return s;
}

}  // namespace

extern "C" {

const char* amap_version(void) { return "0.1.0"; }

amap_status amap_session_open(const char* config_path, amap_session** out) {
  if (!config_path || !out) return AMAP_ERR_USAGE;
  *out = nullptr;
  auto* s = new amap_session();
  amap_status st = guarded(s, [&] {
    s->config = amap::load_pipeline_config(config_path);
  });
  if (st != AMAP_OK) {
    delete s;
    return st;
  }
  *out = s;
  return AMAP_OK;
}

void amap_session_close(amap_session* s) { delete s; }

const char* amap_session_error(const amap_session* s) {
  return s ? s->error.c_str() : "null session";
}

amap_status amap_session_set_output_dir(amap_session* s, const char* dir) {
  if (!s || !dir) return AMAP_ERR_USAGE;
  s->config.output_dir = dir;
  return AMAP_OK;
}

amap_status amap_session_set_number(amap_session* s, const char* key,
                                    double value) {
  if (!s || !key) return AMAP_ERR_USAGE;
  return guarded(s, [&] {
    std::string k = key;
    amap::PipelineConfig& c = s->config;
    if (k == "vol_min") c.refine.vol_min = value;
    else if (k == "vol_max") c.refine.vol_max = value;
    else if (k == "containment_margin") c.refine.containment_margin = value;
    else if (k == "volume_ratio_max") c.refine.volume_ratio_max = value;
    else if (k == "app_min") c.refine.app_min = static_cast<int>(value);
    else if (k == "render_resolution") c.render_resolution = value;
    else if (k == "pose_match_tolerance") c.pose_match_tolerance = value;
    else if (k == "front_depth_percentile") c.front_depth_percentile = value;
    else amap::throw_config("unknown option '" + k + "'");
  });
}

amap_status amap_run(amap_session* s, int dry_run, amap_log_fn log,
                     void* log_user) {
  return guarded(s, [&] {
    amap::StageLogger logger;
    if (log)
      logger = [log, log_user](const std::string& line) {
        log(line.c_str(), log_user);
      };
    if (dry_run) {
      amap::dry_run(s->config, logger);
    } else {
      if (s->config.output_dir.empty())
        amap::throw_config("no output directory set");
      s->config.refine.validate();
      amap::run_pipeline(s->config, logger);
    }
  });
}

amap_status amap_estimate_scale(amap_session* s, double* factor,
                                double* odom_displacement,
                                double* slam_displacement, double* t_start,
                                double* t_end) {
  return guarded(s, [&] {
    amap::SessionData data = amap::load_session(s->config);
    amap::ScaleEstimate est = amap::estimate_scale(
        data.events, data.odometry, data.trajectory, s->config.odometry_frame);
    if (factor) *factor = est.factor;
    if (odom_displacement) *odom_displacement = est.odom_displacement;
    if (slam_displacement) *slam_displacement = est.slam_displacement;
    if (t_start) *t_start = est.t_start;
    if (t_end) *t_end = est.t_end;
  });
}

amap_status amap_lift(amap_session* s, const char* volumes_json_out,
                      const char* annotated_ply_out) {
  if (!volumes_json_out) return AMAP_ERR_USAGE;
  return guarded(s, [&] {
    ScaledSession sc = load_scaled(s->config);
    amap::LiftStats stats;
    auto volumes =
        amap::lift_session(s->config, sc.data.calibration, sc.data.detections,
                           sc.trajectory, sc.cloud, &stats);
    amap::associate_points(volumes, sc.cloud);
    amap::save_volumes(volumes_json_out, volumes);
    if (annotated_ply_out) {
      amap::AccessibilityMap map;
      map.volumes = volumes;
      map.cloud = sc.cloud;
      map.trajectory = sc.trajectory;
      map.scale = sc.estimate;
      map.session_id = s->config.session_id;
      map.drone_id = s->config.drone_id;
      write_text_file(annotated_ply_out, amap::emit_annotated_cloud(map));
    }
  });
}

amap_status amap_refine_volumes(amap_session* s, const char* volumes_json_in,
                                const char* volumes_json_out,
                                uint64_t stage_counts[4]) {
  if (!volumes_json_in || !volumes_json_out) return AMAP_ERR_USAGE;
  return guarded(s, [&] {
    auto volumes = amap::load_volumes(volumes_json_in);
    amap::RefineResult res = amap::refine(std::move(volumes), s->config.refine);
    amap::save_volumes(volumes_json_out, res.volumes);
    if (stage_counts)
      for (int i = 0; i < 4; ++i) stage_counts[i] = res.report.stage_counts[i];
  });
}

amap_status amap_render(amap_session* s, const char* volumes_json_in,
                        const char* svg_out) {
  if (!volumes_json_in || !svg_out) return AMAP_ERR_USAGE;
  return guarded(s, [&] {
    ScaledSession sc = load_scaled(s->config);
    amap::AccessibilityMap map;
    map.volumes = amap::load_volumes(volumes_json_in);
    map.cloud = sc.cloud;
    map.trajectory = sc.trajectory;
    map.scale = sc.estimate;
    map.session_id = s->config.session_id;
    map.drone_id = s->config.drone_id;
    write_text_file(svg_out,
                    amap::render_topdown_svg(map, s->config.render_resolution));
  });
}

amap_status amap_synth(const char* scene_spec_path, const char* out_dir,
                       uint64_t seed_override, int has_seed_override,
                       char* errbuf, size_t errbuf_len) {
  if (!scene_spec_path || !out_dir) return AMAP_ERR_USAGE;
  auto fail = [&](amap_status st, const char* msg) {
    if (errbuf && errbuf_len > 0) {
      std::strncpy(errbuf, msg, errbuf_len - 1);
      errbuf[errbuf_len - 1] = '\0';
    }
    return st;
  };
  try {
    amap::SceneSpec spec = amap::load_scene_spec(scene_spec_path);
    if (has_seed_override) spec.seed = seed_override;
    amap::generate_session(spec, out_dir);
    return AMAP_OK;
  } catch (const amap::Error& e) {
    return fail(status_from(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail(AMAP_ERR_RUNTIME, e.what());
  }
}

}  // extern "C"
