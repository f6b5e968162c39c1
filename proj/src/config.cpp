#include "dualview/config.hpp"

#include <Eigen/Eigenvalues>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualview/errors.hpp"

namespace dualview {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, Eigen::Index dim, const std::string& name) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
    if (j.is_object()) {
        if (j.contains("diag")) {
            const auto& d = j.at("diag");
            if (!d.is_array() || static_cast<Eigen::Index>(d.size()) != dim) {
                throw ConfigError(name + ".diag must have " + std::to_string(dim) + " entries");
            }
            for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = d.at(static_cast<std::size_t>(i)).get<double>();
            return m;
        }
        if (j.contains("scaled_identity")) {
            m.diagonal().setConstant(j.at("scaled_identity").get<double>());
            return m;
        }
        throw ConfigError(name + " must be a nested array, {\"diag\": [...]} or {\"scaled_identity\": x}");
    }
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
        throw ConfigError(name + " must be a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            throw ConfigError(name + " row " + std::to_string(r) + " has the wrong length");
        }
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

Vector3 parse_vec3(const json& j, const std::string& name) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(name + " must be a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Pose parse_pose(const json& j, const std::string& name) {
    if (j.contains("matrix")) {
        Matrix4 m = parse_matrix(j.at("matrix"), 4, name + ".matrix");
        try {
            return Pose::fromMatrix(m);
        } catch (const ContractViolation& e) {
            throw ConfigError(name + ": " + e.what());
        }
    }
    Pose p;
    if (j.contains("rotation_vector")) p.rotation = so3_exp(parse_vec3(j.at("rotation_vector"), name + ".rotation_vector"));
    if (j.contains("translation")) p.translation = parse_vec3(j.at("translation"), name + ".translation");
    return p;
}

AvailabilityModel parse_availability(const json& j, const std::string& name) {
    const std::string mode = j.value("mode", "always");
    if (mode == "always") return AvailabilityModel::always();
    if (mode == "bernoulli") return AvailabilityModel::bernoulli(j.at("rate").get<double>());
    if (mode == "replay") return AvailabilityModel::replay(j.at("mask").get<std::vector<bool>>());
    throw ConfigError(name + ".mode must be always, bernoulli or replay");
}

KinematicChain parse_chain(const json& j) {
    KinematicChain chain;
    for (const auto& joint : j.at("joints")) {
        try {
            if (joint.contains("twist")) {
                const auto t = joint.at("twist").get<std::vector<double>>();
                if (t.size() != 6) throw ConfigError("joint twist must have 6 entries");
                chain.screws.push_back(JointScrew::fromTwist(Eigen::Map<const Twist6>(t.data())));
            } else {
                chain.screws.emplace_back(parse_vec3(joint.at("axis"), "joint.axis"),
                                          parse_vec3(joint.at("point"), "joint.point"));
            }
        } catch (const ContractViolation& e) {
            throw ConfigError(std::string("arm chain: ") + e.what());
        }
    }
    if (chain.screws.empty()) throw ConfigError("arm chain needs at least one joint");
    chain.home = parse_pose(j.at("home"), "chain.home");
    return chain;
}

NoiseConfig parse_filter_noise(const json& j, const std::string& name) {
    const Matrix3 q_nw = parse_matrix(j.at("q_nw"), 3, name + ".q_nw");
    const Matrix3 q_nv = parse_matrix(j.at("q_nv"), 3, name + ".q_nv");
    const Matrix6 r0 = parse_matrix(j.at("r0"), 6, name + ".r0");
    return NoiseConfig::fromBlocks(q_nw, q_nv, r0, j.at("f_q").get<double>(), j.at("f_r").get<double>());
}

ScenarioConfig parse_scenario(const json& j) {
    ScenarioConfig s;
    s.dt = j.at("dt").get<double>();
    s.steps = j.at("steps").get<int>();
    s.seed = j.value("seed", std::uint64_t{1});
    const auto& init = j.at("initial_state");
    s.initial_state.pose = parse_pose(init, "initial_state");
    if (init.contains("omega")) s.initial_state.omega = parse_vec3(init.at("omega"), "initial_state.omega");
    if (init.contains("velocity")) s.initial_state.velocity = parse_vec3(init.at("velocity"), "initial_state.velocity");
    s.q_nw = parse_matrix(j.at("q_nw"), 3, "scenario.q_nw");
    s.q_nv = parse_matrix(j.at("q_nv"), 3, "scenario.q_nv");
    s.r_true_hand = parse_matrix(j.at("r_true_hand"), 6, "scenario.r_true_hand");
    s.r_true_base = parse_matrix(j.at("r_true_base"), 6, "scenario.r_true_base");
    if (j.contains("availability")) {
        const auto& a = j.at("availability");
        if (a.contains("hand")) s.avail_hand = parse_availability(a.at("hand"), "availability.hand");
        if (a.contains("base")) s.avail_base = parse_availability(a.at("base"), "availability.base");
    }
    if (j.contains("bursts")) {
        for (const auto& b : j.at("bursts")) {
            BurstWindow w;
            w.start = b.at("start").get<int>();
            w.end = b.at("end").get<int>();
            w.factor = b.value("factor", 10.0);
            w.hand = false;
            w.base = false;
            for (const auto& src : b.value("sources", std::vector<std::string>{"hand"})) {
                if (src == "hand") w.hand = true;
                else if (src == "base") w.base = true;
                else throw ConfigError("burst source must be hand or base");
            }
            s.bursts.push_back(w);
        }
    }
    if (j.contains("arm")) {
        const auto& arm = j.at("arm");
        if (arm.contains("chain")) s.chain = parse_chain(arm.at("chain"));
        s.arm.theta0 = arm.at("theta0").get<std::vector<double>>();
        s.arm.amplitude = arm.value("amplitude", std::vector<double>{});
        s.arm.frequency_hz = arm.value("frequency_hz", 0.0);
    } else {
        s.arm.theta0.assign(s.chain.screws.size(), 0.0);
    }
    if (j.contains("extrinsics")) {
        const auto& e = j.at("extrinsics");
        s.extrinsics.t_EC_H = parse_pose(e.at("t_EC_H"), "extrinsics.t_EC_H");
        s.extrinsics.t_BC_B = parse_pose(e.at("t_BC_B"), "extrinsics.t_BC_B");
        s.extrinsics.t_AH_G = parse_pose(e.at("t_AH_G"), "extrinsics.t_AH_G");
        s.extrinsics.t_AB_G = parse_pose(e.at("t_AB_G"), "extrinsics.t_AB_G");
    }
    return s;
}

ReferencePolicy parse_reference(const json& f) {
    const std::string kind = f.value("reference", "min-trace");
    if (kind == "min-trace") return ReferencePolicy::minTrace();
    if (kind == "fixed") return ReferencePolicy::fixed(f.value("reference_index", std::size_t{0}));
    if (kind == "iterate") return ReferencePolicy::iterate();
    throw ConfigError("fusion.reference must be min-trace, fixed or iterate");
}

}  // namespace

Convention parse_convention(const std::string& s) {
    if (s == "minimal") return Convention::Minimal;
    if (s == "padded") return Convention::Padded;
    throw ConfigError("convention must be minimal or padded");
}

void RunConfig::validate() const {
    scenario.validate();
    try {
        filter_noise_hand.validate();
        filter_noise_base.validate();
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("filter noise: ") + e.what());
    }
    if (!p0.allFinite() || (p0 - p0.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw ConfigError("p0 must be finite and symmetric");
    }
    if (Eigen::SelfAdjointEigenSolver<Matrix12>(p0).eigenvalues().minCoeff() < 0.0) {
        throw ConfigError("p0 must be positive semidefinite");
    }
    if (!(fusion.normalization > 0.0)) throw ConfigError("fusion normalization must be positive");
}

RunConfig parse_run_config(const std::string& json_text, std::optional<Convention> convention_override) {
    RunConfig cfg;
    try {
        const json j = json::parse(json_text);
        const int version = j.at("schema_version").get<int>();
        if (version != kSchemaVersion) {
            throw ConfigError("unsupported schema_version " + std::to_string(version));
        }
        cfg.name = j.value("name", "run");
        cfg.scenario = parse_scenario(j.at("scenario"));

        const auto& f = j.at("filter");
        cfg.filter_noise_hand = parse_filter_noise(f.at("hand"), "filter.hand");
        cfg.filter_noise_base = parse_filter_noise(f.at("base"), "filter.base");
        const Convention conv = convention_override ? *convention_override
                                                    : parse_convention(f.value("convention", "minimal"));
        if (conv == Convention::Padded) {
            cfg.p0 = unpad_covariance(parse_matrix(f.at("p0"), 15, "filter.p0"));
        } else {
            cfg.p0 = parse_matrix(f.at("p0"), 12, "filter.p0");
        }
        cfg.filter_options.gate = f.value("gate", false);
        cfg.filter_options.adaptive = f.value("adaptive", true);
        const std::string r_cov = f.value("r_adaptation_covariance", "prior");
        if (r_cov == "prior") cfg.filter_options.r_adaptation_posterior = false;
        else if (r_cov == "posterior") cfg.filter_options.r_adaptation_posterior = true;
        else throw ConfigError("filter.r_adaptation_covariance must be prior or posterior");

        if (j.contains("fusion")) {
            const auto& fu = j.at("fusion");
            cfg.fusion.normalization = fu.value("normalization", 2.0);
            cfg.fusion.reference = parse_reference(fu);
        }
        if (j.contains("cross_covariance")) {
            const std::string coupling = j.at("cross_covariance").value("coupling", "shared-sqrt");
            if (coupling == "shared-sqrt") cfg.coupling = CouplingNoise::SharedSquareRoot;
            else if (coupling == "mean") cfg.coupling = CouplingNoise::Mean;
            else throw ConfigError("cross_covariance.coupling must be shared-sqrt or mean");
        }
        const std::string baseline = j.value("baseline", "fusion");
        if (baseline == "fusion") cfg.baseline = Baseline::Fusion;
        else if (baseline == "switching") cfg.baseline = Baseline::Switching;
        else throw ConfigError("baseline must be fusion or switching");

        const std::string pref = j.value("switch_preference", "base-first");
        if (pref == "base-first") cfg.switch_preference = SwitchPreference::BaseFirst;
        else if (pref == "hand-first") cfg.switch_preference = SwitchPreference::HandFirst;
        else throw ConfigError("switch_preference must be base-first or hand-first");

        cfg.output_dir = j.value("output_dir", "out");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, std::optional<Convention> convention_override) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str(), convention_override);
}

}  // namespace dualview
