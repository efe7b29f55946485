#include "avate/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace avate {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& scope,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) known = known || it.key() == key;
        if (!known) {
            throw ConfigError("unknown config key '" + (scope.empty() ? it.key() : scope + "." + it.key()) + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, const std::string& scope, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + (scope.empty() ? key : scope + "." + key) + "' has the wrong type");
    }
}

DgpConfig parse_dgp(const json& j) {
    if (!j.is_object()) throw ConfigError("'dgp' must be an object");
    reject_unknown(j, "dgp", {"kind", "theta0"});
    if (!j.contains("kind")) throw ConfigError("config is missing the 'dgp.kind' key");

    DgpConfig dgp;
    const std::string kind = get_or<std::string>(j, "kind", "dgp", "");
    if (kind == "bernoulli") {
        dgp.kind = DgpConfig::Kind::Bernoulli;
    } else if (kind == "bounded") {
        dgp.kind = DgpConfig::Kind::Bounded;
    } else if (kind == "truncation_study") {
        dgp.kind = DgpConfig::Kind::TruncationStudy;
        if (j.contains("theta0")) {
            throw ConfigError("dgp.theta0 is not configurable for truncation_study (effect is fixed at 0.4)");
        }
    } else {
        throw ConfigError("dgp.kind must be one of bernoulli|bounded|truncation_study (got '" + kind + "')");
    }
    dgp.theta0 = get_or<double>(j, "theta0", "dgp", 0.1);
    dgp.validate();
    return dgp;
}

TruncationSchedule parse_schedule(const json& j) {
    if (!j.is_object()) throw ConfigError("'policy.schedule' must be an object");
    reject_unknown(j, "policy.schedule", {"kind", "k1", "decay", "pi_min"});

    TruncationSchedule sched;
    const std::string kind = get_or<std::string>(j, "kind", "policy.schedule", "geometric");
    if (kind == "geometric") {
        sched.kind = TruncationSchedule::Kind::Geometric;
    } else if (kind == "constant") {
        sched.kind = TruncationSchedule::Kind::Constant;
    } else {
        throw ConfigError("policy.schedule.kind must be geometric|constant (got '" + kind + "')");
    }
    if (j.contains("pi_min")) {
        if (j.contains("k1")) throw ConfigError("policy.schedule: give either k1 or pi_min, not both");
        const double pi_min = get_or<double>(j, "pi_min", "policy.schedule", 0.5);
        if (!(pi_min > 0.0 && pi_min <= 0.5)) throw ConfigError("policy.schedule.pi_min must lie in (0, 0.5]");
        sched.k1 = 1.0 / pi_min;
    } else {
        sched.k1 = get_or<double>(j, "k1", "policy.schedule", 2.0);
    }
    sched.decay = get_or<double>(j, "decay", "policy.schedule", 0.999);
    sched.validate();
    return sched;
}

PolicyConfig parse_policy(const json& j, std::int64_t default_warmup) {
    if (!j.is_object()) throw ConfigError("'policy' must be an object");
    reject_unknown(j, "policy", {"kind", "fixed_p", "warmup", "schedule"});

    PolicyConfig pol;
    const std::string kind = get_or<std::string>(j, "kind", "policy", "a2ipw");
    if (kind == "a2ipw") {
        pol.kind = PolicyConfig::Kind::A2ipw;
    } else if (kind == "fixed") {
        pol.kind = PolicyConfig::Kind::Fixed;
    } else if (kind == "oracle_aipw") {
        pol.kind = PolicyConfig::Kind::OracleAipw;
    } else {
        throw ConfigError("policy.kind must be a2ipw|fixed|oracle_aipw (got '" + kind + "')");
    }
    pol.fixed_p = get_or<double>(j, "fixed_p", "policy", 0.5);
    pol.warmup = get_or<std::int64_t>(j, "warmup", "policy", default_warmup);
    if (j.contains("schedule")) pol.schedule = parse_schedule(j.at("schedule"));
    pol.validate();
    return pol;
}

RegressionConfig parse_model(const json& j) {
    if (!j.is_object()) throw ConfigError("'model' must be an object");
    reject_unknown(j, "model", {"kind", "k", "warmup", "vfloor"});

    const std::string kind = get_or<std::string>(j, "kind", "model", "knn");
    if (kind != "knn") throw ConfigError("model.kind supports only 'knn' (got '" + kind + "')");

    RegressionConfig model;
    model.knn_k = static_cast<int>(get_or<std::int64_t>(j, "k", "model", 10));
    model.warmup = get_or<std::int64_t>(j, "warmup", "model", 100);
    model.vfloor = get_or<double>(j, "vfloor", "model", 0.01);
    model.validate();
    return model;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(j, "", {"dgp", "T", "n_iters", "alpha", "seed", "t_min", "methods", "policy",
                           "model", "confseq", "outcome_range", "emit_streams"});

    ExperimentConfig cfg;
    cfg.dgp.reset();
    if (j.contains("dgp")) cfg.dgp = parse_dgp(j.at("dgp"));

    cfg.horizon = get_or<std::int64_t>(j, "T", "", 5000);
    cfg.n_iters = get_or<std::int64_t>(j, "n_iters", "", 1000);
    cfg.alpha = get_or<double>(j, "alpha", "", 0.05);
    cfg.seed = get_or<std::uint64_t>(j, "seed", "", 20240801ULL);
    cfg.t_min = get_or<std::int64_t>(j, "t_min", "", 50);
    cfg.emit_streams = get_or<std::int64_t>(j, "emit_streams", "", 0);

    if (j.contains("methods")) {
        std::vector<std::string> names;
        try {
            names = j.at("methods").get<std::vector<std::string>>();
        } catch (const json::exception&) {
            throw ConfigError("'methods' must be an array of strings");
        }
        cfg.methods = MethodSet::parse(names);
    }

    cfg.model = j.contains("model") ? parse_model(j.at("model")) : RegressionConfig{};
    // One warmup knob governs both the fallback predictors and the policy
    // unless policy.warmup is set explicitly.
    if (j.contains("policy")) {
        cfg.policy = parse_policy(j.at("policy"), cfg.model.warmup);
    } else {
        cfg.policy = PolicyConfig{};
        cfg.policy.warmup = cfg.model.warmup;
    }

    if (j.contains("confseq")) {
        const json& cs = j.at("confseq");
        if (!cs.is_object()) throw ConfigError("'confseq' must be an object");
        reject_unknown(cs, "confseq", {"rho", "grid_size", "lambda_cap"});
        cfg.rho = get_or<double>(cs, "rho", "confseq", 0.5);
        cfg.hedged_grid = static_cast<int>(get_or<std::int64_t>(cs, "grid_size", "confseq", 1000));
        cfg.lambda_cap = get_or<double>(cs, "lambda_cap", "confseq", 0.5);
    }

    if (j.contains("outcome_range")) {
        std::vector<double> r;
        try {
            r = j.at("outcome_range").get<std::vector<double>>();
        } catch (const json::exception&) {
            throw ConfigError("'outcome_range' must be [lo, hi]");
        }
        if (r.size() != 2) throw ConfigError("'outcome_range' must be [lo, hi]");
        cfg.outcome_range = OutcomeRange{r[0], r[1]};
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

}  // namespace avate
