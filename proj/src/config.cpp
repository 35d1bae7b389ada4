#include "provsim/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace provsim {

namespace {

using nlohmann::json;

Distribution parse_distribution(const json& j) {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") return Distribution(Exponential{j.at("mean").get<double>()});
    if (kind == "deterministic") return Distribution(Deterministic{j.at("value").get<double>()});
    if (kind == "hyperexponential2") {
        HyperExp2 h;
        h.p1 = j.at("p1").get<double>();
        h.mean1 = j.at("mean1").get<double>();
        h.p2 = j.at("p2").get<double>();
        h.mean2 = j.at("mean2").get<double>();
        return Distribution(h);
    }
    throw std::invalid_argument("unknown distribution kind: " + kind);
}

ServiceClass parse_class(const json& j, int id) {
    ServiceClass c;
    c.id = id;
    c.charge = j.at("charge").get<double>();
    c.penalty = j.at("penalty").get<double>();
    c.obligation = j.at("obligation").get<double>();
    c.jobs_per_session = j.at("jobs_per_session").get<int>();
    c.job_rate = j.at("job_rate").get<double>();
    c.session_rate = j.at("session_rate").get<double>();
    c.weight = j.value("weight", 1.0);
    c.service_time = parse_distribution(j.at("service_time"));
    return c;
}

std::optional<OnOffParams> parse_arrivals(const json& j) {
    if (!j.contains("arrivals")) return std::nullopt;
    const json& a = j.at("arrivals");
    std::string kind = a.value("kind", "poisson");
    if (kind == "poisson") return std::nullopt;
    if (kind == "on_off") {
        OnOffParams p;
        p.rate_on = a.at("rate_on").get<double>();
        p.mean_on = a.at("mean_on").get<double>();
        p.mean_off = a.at("mean_off").get<double>();
        return p;
    }
    throw std::invalid_argument("unknown arrival kind: " + kind);
}

std::vector<double> parse_sweep_values(const json& s) {
    if (s.contains("values")) return s.at("values").get<std::vector<double>>();
    double from = s.at("from").get<double>();
    double to = s.at("to").get<double>();
    int points = s.at("points").get<int>();
    if (points < 2) throw std::invalid_argument("sweep needs at least 2 points");
    std::vector<double> values(points);
    for (int i = 0; i < points; ++i) values[i] = from + (to - from) * i / (points - 1);
    return values;
}

} // namespace

void ExperimentConfig::validate() const {
    base.validate();
    if (policies.empty()) throw std::invalid_argument("at least one policy is required");
    for (const auto& p : policies) make_policy(p); // throws on unknown names
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    if (sweep.active()) {
        if (sweep.values.empty()) throw std::invalid_argument("sweep has no values");
        for (double v : sweep.values)
            if (!std::isfinite(v)) throw std::invalid_argument("sweep values must be finite");
        SimConfig probe = base;
        apply_sweep_value(probe, sweep.variable, sweep.values.front()); // syntax check
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    ExperimentConfig cfg;

    const json& cluster = j.at("cluster");
    cfg.base.total_servers = cluster.at("servers").get<int>();
    cfg.base.horizon = j.value("horizon", 7200.0);
    cfg.base.bucket_width = j.value("bucket_width", 600.0);

    if (j.contains("estimation")) {
        const json& e = j.at("estimation");
        cfg.base.estimation_window = e.value("window", 10.0);
        cfg.base.smoothing = e.value("smoothing", 0.3);
        cfg.base.pin_service_means = e.value("pin_service_means", false);
    }

    int id = 0;
    for (const json& cj : j.at("classes")) {
        cfg.base.classes.push_back(parse_class(cj, id++));
        cfg.base.burst_arrivals.push_back(parse_arrivals(cj));
    }
    if (cluster.contains("initial_allocation"))
        cfg.base.initial_allocation = cluster.at("initial_allocation").get<std::vector<int>>();

    cfg.policies = j.at("policies").get<std::vector<std::string>>();
    if (j.contains("policy_params")) {
        const json& p = j.at("policy_params");
        cfg.threshold_search.epsilon = p.value("epsilon", 1e-6);
        cfg.threshold_search.m_max = p.value("m_max", 1000);
    }
    if (j.contains("sweep")) {
        cfg.sweep.variable = j.at("sweep").at("variable").get<std::string>();
        cfg.sweep.values = parse_sweep_values(j.at("sweep"));
    }
    cfg.replications = j.value("replications", 5);
    cfg.base_seed = j.value("base_seed", std::uint64_t{1});
    cfg.pdf_bin_width = j.value("pdf_bin_width", 0.05);

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void apply_sweep_value(SimConfig& config, const std::string& variable, double value) {
    auto dot = variable.find('.');
    if (dot == std::string::npos || variable.rfind("class", 0) != 0)
        throw std::invalid_argument("sweep variable must look like class<i>.<field>");
    int index = std::stoi(variable.substr(5, dot - 5)) - 1; // 1-based in configs
    if (index < 0 || index >= static_cast<int>(config.classes.size()))
        throw std::invalid_argument("sweep variable class index out of range");
    std::string field = variable.substr(dot + 1);
    ServiceClass& c = config.classes[index];
    if (field == "session_rate")
        c.session_rate = value;
    else if (field == "job_rate")
        c.job_rate = value;
    else if (field == "charge")
        c.charge = value;
    else if (field == "penalty")
        c.penalty = value;
    else if (field == "obligation")
        c.obligation = value;
    else if (field == "weight")
        c.weight = value;
    else
        throw std::invalid_argument("unknown sweep field: " + field);
}

} // namespace provsim
