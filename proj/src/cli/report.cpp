#include "sclbf/cli/report.hpp"

#include <cmath>

namespace sclbf::cli {

using nlohmann::json;

namespace {

// JSON has no infinity; unbounded limits are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const ConditionResult& c) {
    json j{{"id", c.id}, {"pass", c.pass}, {"worst_margin", finite_or_null(c.worst_margin)}, {"samples", c.samples}};
    j["witness"] = c.witness ? json::array({(*c.witness)[0], (*c.witness)[1]}) : json(nullptr);
    return j;
}

json to_json(const VerificationReport& r) {
    json conditions = json::array({to_json(r.positive_on_unsafe), to_json(r.decrease_on_lgw_zero),
                                   to_json(r.nonempty_sublevel), to_json(r.unique_stationary)});
    if (r.c_omega_subset) conditions.push_back(to_json(*r.c_omega_subset));
    return json{{"pass", r.all_pass()},
                {"conditions", conditions},
                {"grid", {{"points_per_axis", r.grid},
                          {"eps_origin", r.eps_origin},
                          {"x1", {r.region.x1_min, r.region.x1_max}},
                          {"x2", {r.region.x2_min, r.region.x2_max}}}}};
}

json to_json(const WeakClbf& w) {
    return json{{"P", {{w.p(0, 0), w.p(0, 1)}, {w.p(1, 0), w.p(1, 1)}}},
                {"l", w.shape.l},
                {"d", w.shape.d},
                {"delta", w.shape.delta},
                {"theta", w.theta},
                {"k", w.k},
                {"v1", w.levels.v1},
                {"v2", w.levels.v2},
                {"sigma1", w.levels.sigma1},
                {"sigma2", w.levels.sigma2},
                {"gamma", w.levels.gamma}};
}

json to_json(const ParameterCheck& c) {
    const ParameterBounds& b = c.bounds;
    return json{{"l_max", finite_or_null(b.l_max)},
                {"delta_min", finite_or_null(b.delta_min)},
                {"theta_min", finite_or_null(b.theta_min)},
                {"denominator", b.denominator},
                {"level_ok", c.level_ok},
                {"l_ok", c.l_ok},
                {"delta_ok", c.delta_ok},
                {"theta_ok", c.theta_ok},
                {"k_consistent", c.k_consistent},
                {"all_ok", c.all_ok()}};
}

}  // namespace sclbf::cli
