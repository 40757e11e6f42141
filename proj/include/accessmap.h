/* accessmap - indoor accessibility mapping from drone flight logs.
 *
 * C API over the C++ core. All functions return AMAP_OK (0) on success or a
 * nonzero amap_status; the per-session error message is retrievable with
 * amap_session_error(). Handles are opaque and must be released with
 * amap_session_close().
 */

#ifndef ACCESSMAP_H
#define ACCESSMAP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct amap_session amap_session;

typedef enum {
  AMAP_OK = 0,
  AMAP_ERR_IO = 2,      /* missing or unreadable/unwritable files */
  AMAP_ERR_PARSE = 3,   /* malformed input content */
  AMAP_ERR_CONFIG = 4,  /* invalid configuration values */
  AMAP_ERR_RUNTIME = 5, /* stage failures (degenerate baseline, ...) */
  AMAP_ERR_USAGE = 6    /* null handle / bad argument */
} amap_status;

const char* amap_version(void);

/* Loads the pipeline config file; relative input paths resolve against the
 * config file's directory. */
amap_status amap_session_open(const char* config_path, amap_session** out);
void amap_session_close(amap_session* s);

/* Message for the most recent failing call on this session. */
const char* amap_session_error(const amap_session* s);

amap_status amap_session_set_output_dir(amap_session* s, const char* dir);

/* Numeric overrides. Keys: vol_min, vol_max, containment_margin,
 * volume_ratio_max, app_min, render_resolution, pose_match_tolerance,
 * front_depth_percentile. */
amap_status amap_session_set_number(amap_session* s, const char* key,
                                    double value);

/* Full pipeline: ingest, scale, lift, associate, refine, emit report.json,
 * map.svg, map.pgm and annotated.ply into the output directory. With
 * dry_run != 0 all inputs are validated and nothing is written. Per-stage
 * log lines go to the callback when set. */
typedef void (*amap_log_fn)(const char* line, void* user);
amap_status amap_run(amap_session* s, int dry_run, amap_log_fn log,
                     void* log_user);

/* Metric scale recovery only. Any output pointer may be NULL. */
amap_status amap_estimate_scale(amap_session* s, double* factor,
                                double* odom_displacement,
                                double* slam_displacement, double* t_start,
                                double* t_end);

/* Lifts detections to unrefined world-frame volumes; writes the volumes JSON
 * file and, when annotated_ply_out is non-NULL, an annotated point cloud. */
amap_status amap_lift(amap_session* s, const char* volumes_json_out,
                      const char* annotated_ply_out);

/* Runs the three-stage refinement on a volumes JSON file. stage_counts, when
 * non-NULL, receives input / after-stage-1 / after-stage-2 / final counts. */
amap_status amap_refine_volumes(amap_session* s, const char* volumes_json_in,
                                const char* volumes_json_out,
                                uint64_t stage_counts[4]);

/* Renders a top-down SVG for a volumes JSON file over the session's scaled
 * cloud and trajectory. */
amap_status amap_render(amap_session* s, const char* volumes_json_in,
                        const char* svg_out);

/* Generates a synthetic session directory from a scene spec JSON file.
 * seed_override is used when has_seed_override != 0. Error text is copied
 * into errbuf when provided. */
amap_status amap_synth(const char* scene_spec_path, const char* out_dir,
                       uint64_t seed_override, int has_seed_override,
                       char* errbuf, size_t errbuf_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ACCESSMAP_H */
