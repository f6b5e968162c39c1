#include "dualview/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

constexpr const char* kTrackHeader =
    "step,t,px,py,pz,rx,ry,rz,wx,wy,wz,vx,vy,vz,cov_rot,cov_trans,cov_vel\n";

void append_row(std::string& out, int step, double dt, const TargetState& x, const Matrix12& cov) {
    const Vector3 rv = so3_log(x.pose.rotation);
    out += std::to_string(step);
    auto field = [&](double v) {
        out += ',';
        out += format_double(v);
    };
    field(step * dt);
    for (int i = 0; i < 3; ++i) field(x.pose.translation[i]);
    for (int i = 0; i < 3; ++i) field(rv[i]);
    for (int i = 0; i < 3; ++i) field(x.omega[i]);
    for (int i = 0; i < 3; ++i) field(x.velocity[i]);
    field(cov.block<3, 3>(0, 0).trace());
    field(cov.block<3, 3>(3, 3).trace());
    field(cov.block<3, 3>(9, 9).trace());
    out += '\n';
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    return {{"rmse_position", num(m.rmse_position)},
            {"rmse_rotation", num(m.rmse_rotation)},
            {"rmse_velocity", num(m.rmse_velocity)},
            {"rmse_angular_velocity", num(m.rmse_angular_velocity)},
            {"nees_mean", num(m.nees_mean)},
            {"nees_samples", m.nees_samples},
            {"nees_omitted", m.nees_omitted},
            {"update_rate", num(m.update_rate)}};
}

nlohmann::json counts_to_json(const EventCounts& c) {
    return {{"generated", c.generated}, {"applied", c.applied}, {"rejected", c.rejected}, {"unused", c.unused}};
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_number(const std::string& s, int line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
        throw ConfigError("measurement log line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string track_csv(const std::vector<StateEstimate>& track, double dt) {
    std::string out = kTrackHeader;
    for (std::size_t k = 0; k < track.size(); ++k) {
        append_row(out, static_cast<int>(k), dt, track[k].mean, track[k].cov);
    }
    return out;
}

std::string truth_csv(const std::vector<TargetState>& truth, double dt) {
    std::string out = kTrackHeader;
    for (std::size_t k = 0; k < truth.size(); ++k) {
        append_row(out, static_cast<int>(k), dt, truth[k], Matrix12::Zero());
    }
    return out;
}

std::string measurement_log_csv(const std::vector<MeasurementEvent>& events) {
    std::string out = "step,time,source";
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) out += ",m" + std::to_string(r) + std::to_string(c);
    out += '\n';
    for (const auto& e : events) {
        out += std::to_string(e.step) + ',' + format_double(e.time) + ',' + to_string(e.source);
        const Matrix4 m = e.pose.matrix();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) out += ',' + format_double(m(r, c));
        out += '\n';
    }
    return out;
}

std::vector<MeasurementEvent> parse_measurement_log(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::vector<MeasurementEvent> events;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty() || line == "\r") continue;
        const auto f = split_fields(line);
        if (f.size() != 15) {
            throw ConfigError("measurement log line " + std::to_string(line_no) + ": expected 15 fields");
        }
        MeasurementEvent e;
        const double step = parse_number(f[0], line_no);
        if (step != std::floor(step)) throw ConfigError("measurement log line " + std::to_string(line_no) + ": step must be an integer");
        e.step = static_cast<int>(step);
        e.time = parse_number(f[1], line_no);
        if (f[2] == "hand") e.source = Source::Hand;
        else if (f[2] == "base") e.source = Source::Base;
        else throw ConfigError("measurement log line " + std::to_string(line_no) + ": unknown source '" + f[2] + "'");
        Matrix4 m = Matrix4::Identity();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = parse_number(f[static_cast<std::size_t>(3 + 4 * r + c)], line_no);
        try {
            e.pose = Pose::fromMatrix(m);
        } catch (const ContractViolation& ex) {
            throw ConfigError("measurement log line " + std::to_string(line_no) + ": " + ex.what());
        }
        events.push_back(e);
    }
    return events;
}

std::vector<MeasurementEvent> read_measurement_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open measurement log " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_measurement_log(ss.str());
}

std::string metrics_json(const RunResult& result) {
    nlohmann::json j;
    j["metrics"] = nlohmann::json::object();
    for (const auto& [name, m] : result.metrics) j["metrics"][name] = metrics_to_json(m);
    j["events"] = {{"hand", counts_to_json(result.hand_counts)}, {"base", counts_to_json(result.base_counts)}};
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
    if (!out) throw std::runtime_error("write failed for " + path);
}

void write_run_outputs(const std::string& dir, const RunResult& result) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path d(dir);
    if (!result.truth.empty()) write_text_file((d / "truth.csv").string(), truth_csv(result.truth, result.dt));
    const std::pair<const char*, const std::vector<StateEstimate>*> tracks[] = {
        {"hand.csv", &result.hand}, {"base.csv", &result.base}, {"fused.csv", &result.fused},
        {"baseline.csv", &result.baseline}};
    for (const auto& [name, track] : tracks) {
        if (!track->empty()) write_text_file((d / name).string(), track_csv(*track, result.dt));
    }
    write_text_file((d / "measurements.csv").string(), measurement_log_csv(result.events));
    write_text_file((d / "metrics.json").string(), metrics_json(result));
}

}  // namespace dualview
