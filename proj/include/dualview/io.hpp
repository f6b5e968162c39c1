#pragma once

// CSV and JSON outputs. CSV is RFC-4180 with LF line endings and 17
// significant digits, so identical runs produce identical bytes.

#include <string>
#include <vector>

#include "dualview/pipeline.hpp"

namespace dualview {

std::string format_double(double x);

/// step,t,px,py,pz,rx,ry,rz,wx,wy,wz,vx,vy,vz,cov_rot,cov_trans,cov_vel
/// (rotation as a rotation vector, cov_* are traces of the rotation,
/// translation and linear-velocity blocks).
std::string track_csv(const std::vector<StateEstimate>& track, double dt);
std::string truth_csv(const std::vector<TargetState>& truth, double dt);

/// step,time,source,m00..m23: the upper 3x4 block of each pose, row-major.
std::string measurement_log_csv(const std::vector<MeasurementEvent>& events);
/// Throws ConfigError on malformed rows or rotations that are not orthonormal.
std::vector<MeasurementEvent> parse_measurement_log(const std::string& csv);
std::vector<MeasurementEvent> read_measurement_log(const std::string& path);

std::string metrics_json(const RunResult& result);

/// Writes truth/hand/base/fused/baseline CSVs (whichever exist), measurements.csv
/// and metrics.json into `dir`, creating it if needed.
void write_run_outputs(const std::string& dir, const RunResult& result);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace dualview
