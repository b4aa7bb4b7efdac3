#include "sclbf/cli/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "default_config.inc"

namespace sclbf::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing key '") + key + "'");
    return j.at(key);
}

double number(const json& j, const char* what) {
    if (!j.is_number()) fail(std::string("'") + what + "' must be a number");
    return j.get<double>();
}

Vec2 vec2(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) fail(std::string("'") + what + "' must be a 2-element array");
    return {number(j[0], what), number(j[1], what)};
}

std::pair<double, double> interval(const json& j, const char* what) {
    const Vec2 v = vec2(j, what);
    if (!(v[0] < v[1])) fail(std::string("'") + what + "' must be an increasing interval");
    return {v[0], v[1]};
}

}  // namespace

namespace {

RunConfig parse_document(const json& j);

}  // namespace

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    try {
        return parse_document(j);
    } catch (const json::exception& e) {
        fail(std::string("invalid config value: ") + e.what());
    }
}

namespace {

RunConfig parse_document(const json& j) {
    if (!j.is_object()) fail("config root must be an object");
    if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer() ||
        j.at("schema_version").get<int>() != kSchemaVersion)
        fail("unsupported or missing schema_version (expected " + std::to_string(kSchemaVersion) + ")");

    RunConfig c;
    c.scenario = j.value("scenario", std::string("two_link_safe_fl"));

    const json& m = require(j, "manipulator");
    c.manipulator = {number(require(m, "m1"), "m1"), number(require(m, "m2"), "m2"), number(require(m, "l1"), "l1"),
                     number(require(m, "l2"), "l2"), number(require(m, "g"), "g")};
    try {
        c.manipulator.validate();
    } catch (const Error& e) {
        fail(e.what());
    }

    c.goal = vec2(require(j, "goal"), "goal");
    c.d_hat = vec2(require(j, "d_hat"), "d_hat");

    const json& init = require(j, "initial");
    c.initial = {vec2(require(init, "p"), "initial.p"), vec2(require(init, "v"), "initial.v")};
    const std::string elbow = init.value("elbow", std::string("positive"));
    if (elbow == "positive") c.elbow = Elbow::Positive;
    else if (elbow == "negative") c.elbow = Elbow::Negative;
    else fail("initial.elbow must be 'positive' or 'negative'");

    const json& r = require(j, "region");
    const auto p1 = interval(require(r, "p1"), "region.p1");
    const auto p2 = interval(require(r, "p2"), "region.p2");
    const auto v1 = interval(require(r, "v1"), "region.v1");
    const auto v2 = interval(require(r, "v2"), "region.v2");
    c.region = {p1.first, p1.second, p2.first, p2.second, v1.first, v1.second, v2.first, v2.second};

    const json& gains = require(j, "gains");
    if (!gains.is_array() || gains.size() != 2) fail("'gains' must list two {kp, kd} entries");
    for (const json& g : gains) {
        const double kp = number(require(g, "kp"), "kp");
        const double kd = number(require(g, "kd"), "kd");
        if (!(kp > 0.0) || !(kd > 0.0)) fail("gains must be positive");
        c.gains.push_back({kp, kd, 0.0});
    }

    const json& q = require(j, "lyapunov_q");
    if (!q.is_array() || q.size() != 2) fail("'lyapunov_q' must be a 2x2 array");
    const Vec2 q0 = vec2(q[0], "lyapunov_q"), q1 = vec2(q[1], "lyapunov_q");
    c.lyapunov_q << q0[0], q0[1], q1[0], q1[1];
    if (!is_spd(c.lyapunov_q)) fail("'lyapunov_q' must be symmetric positive definite");

    const json& cl = require(j, "clbf");
    const std::string mode = cl.value("mode", std::string("auto"));
    if (mode == "auto") {
        c.clbf.automatic = true;
        c.clbf.v2.assign(2, std::nullopt);
        if (cl.contains("v2") && !cl.at("v2").is_null()) {
            const json& lv = cl.at("v2");
            if (!lv.is_array() || lv.size() != 2) fail("'clbf.v2' must be a 2-element array (null entries allowed)");
            for (std::size_t i = 0; i < 2; ++i)
                if (!lv[i].is_null()) c.clbf.v2[i] = number(lv[i], "clbf.v2");
        }
        c.clbf.delta_slack = cl.contains("delta_slack") ? number(cl.at("delta_slack"), "delta_slack") : 1.05;
        c.clbf.theta_slack = cl.contains("theta_slack") ? number(cl.at("theta_slack"), "theta_slack") : 1.05;
        if (!(c.clbf.delta_slack > 1.0) || !(c.clbf.theta_slack > 1.0))
            fail("slack factors must exceed 1 (bounds are strict)");
    } else if (mode == "explicit") {
        c.clbf.automatic = false;
        const json& subs = require(cl, "subsystems");
        if (!subs.is_array() || subs.size() != 2) fail("'clbf.subsystems' must have two entries");
        for (const json& s : subs) {
            ExplicitClbfParams e{number(require(s, "l"), "l"), number(require(s, "delta"), "delta"),
                                 number(require(s, "theta"), "theta"), std::nullopt, std::nullopt};
            if (s.contains("v2")) e.v2 = number(s.at("v2"), "v2");
            if (s.contains("k")) e.k = number(s.at("k"), "k");
            if (e.v2.has_value() == e.k.has_value()) fail("explicit CLBF entries need exactly one of 'v2' or 'k'");
            c.clbf.explicit_params.push_back(e);
        }
    } else {
        fail("'clbf.mode' must be 'auto' or 'explicit'");
    }

    const std::string drift = j.value("drift_sign", std::string("closed_loop"));
    if (drift == "closed_loop") c.drift_sign = DriftSign::ClosedLoop;
    else if (drift == "as_printed") c.drift_sign = DriftSign::AsPrinted;
    else fail("'drift_sign' must be 'closed_loop' or 'as_printed'");

    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        if (s.contains("dt")) c.sim.dt = number(s.at("dt"), "dt");
        if (s.contains("horizon")) c.sim.horizon = number(s.at("horizon"), "horizon");
        if (s.contains("record_stride")) {
            if (!s.at("record_stride").is_number_integer()) fail("'record_stride' must be an integer");
            c.sim.record_stride = s.at("record_stride").get<int>();
        }
        if (s.contains("k_safe")) {
            if (!s.at("k_safe").is_array()) fail("'k_safe' must be an array");
            for (const json& k : s.at("k_safe")) c.k_safe.push_back(number(k, "k_safe"));
        }
    }
    for (double k : c.k_safe)
        if (!(k >= 0.0)) fail("k_safe values must be non-negative");

    if (j.contains("verification")) {
        const json& v = j.at("verification");
        if (v.contains("grid")) c.grid = v.at("grid").get<int>();
        if (v.contains("c_omega_grid")) c.c_omega_grid = v.at("c_omega_grid").get<int>();
        if (v.contains("eps_origin_scale")) c.eps_origin_scale = number(v.at("eps_origin_scale"), "eps_origin_scale");
    }
    if (!(c.eps_origin_scale > 0.0)) fail("'eps_origin_scale' must be positive");

    if (j.contains("reference_initial_w"))
        for (const json& w : j.at("reference_initial_w")) c.reference_initial_w.push_back(number(w, "reference_initial_w"));
    c.output_dir = j.value("output_dir", std::string("out"));

    try {
        c.sim.validate();
    } catch (const Error& e) {
        fail(e.what());
    }
    return c;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

const std::string& default_config_text() {
    static const std::string text(kDefaultConfigJson);
    return text;
}

}  // namespace sclbf::cli
