#include "blowup/config.hpp"

#include "blowup/io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blowup {

using nlohmann::json;

namespace {

json to_json(const ExperimentConfig& c) {
    json j;
    j["phi"]["family"] = c.phi_family;
    j["phi"]["params"] = c.phi_params;
    j["f"]["family"] = c.f_family;
    if (c.f_family == "power") j["f"]["p"] = c.f_p;
    if (!c.f_expression.empty()) j["f"]["expression"] = c.f_expression;
    j["domain"]["dim"] = c.dim;
    j["domain"]["radius"] = c.radius;
    j["grid"]["N"] = c.grid_n;
    j["grid"]["gamma"] = c.grid_gamma;
    j["solver"]["tol"] = c.solver_tol;
    j["solver"]["iter_cap"] = c.solver_iter_cap;
    j["solver"]["schedule_base"] = c.schedule_base;
    j["solver"]["schedule_max"] = c.schedule_max;
    j["solver"]["schedule_tol"] = c.schedule_tol;
    j["solver"]["delta_stop_widths"] = c.delta_stop_widths;
    j["solver"]["cert_safety"] = c.cert_safety;
    j["solver"]["supersolution_eta"] = c.supersolution_eta;
    j["rate"]["delta_lo"] = c.rate_delta_lo;
    j["rate"]["delta_hi"] = c.rate_delta_hi;
    j["conditions"]["margin"] = c.cond_margin;
    j["conditions"]["ko_t_max"] = c.ko_t_max;
    j["conditions"]["per_decade"] = c.cond_per_decade;
    j["quadrature"]["rel_tol"] = c.quad_rel_tol;
    j["quadrature"]["near_window"] = c.near_window;
    j["report"]["alphas"] = c.report_alphas;
    j["report"]["ps"] = c.report_ps;
    j["out_dir"] = c.out_dir;
    j["cache"] = c.cache;
    j["threads"] = c.threads;
    j["seed"] = c.seed;
    return j;
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

ExperimentConfig parse(const json& j) {
    ExperimentConfig c;
    try {
        if (j.contains("phi")) {
            const auto& p = j.at("phi");
            get_if(p, "family", c.phi_family);
            if (p.contains("params"))
                c.phi_params = p.at("params").get<std::map<std::string, double>>();
        }
        if (j.contains("f")) {
            const auto& p = j.at("f");
            get_if(p, "family", c.f_family);
            get_if(p, "p", c.f_p);
            get_if(p, "expression", c.f_expression);
        }
        if (j.contains("domain")) {
            get_if(j.at("domain"), "dim", c.dim);
            get_if(j.at("domain"), "radius", c.radius);
        }
        if (j.contains("grid")) {
            get_if(j.at("grid"), "N", c.grid_n);
            get_if(j.at("grid"), "gamma", c.grid_gamma);
        }
        if (j.contains("solver")) {
            const auto& s = j.at("solver");
            get_if(s, "tol", c.solver_tol);
            get_if(s, "iter_cap", c.solver_iter_cap);
            get_if(s, "schedule_base", c.schedule_base);
            get_if(s, "schedule_max", c.schedule_max);
            get_if(s, "schedule_tol", c.schedule_tol);
            get_if(s, "delta_stop_widths", c.delta_stop_widths);
            get_if(s, "cert_safety", c.cert_safety);
            get_if(s, "supersolution_eta", c.supersolution_eta);
        }
        if (j.contains("rate")) {
            get_if(j.at("rate"), "delta_lo", c.rate_delta_lo);
            get_if(j.at("rate"), "delta_hi", c.rate_delta_hi);
        }
        if (j.contains("conditions")) {
            get_if(j.at("conditions"), "margin", c.cond_margin);
            get_if(j.at("conditions"), "ko_t_max", c.ko_t_max);
            get_if(j.at("conditions"), "per_decade", c.cond_per_decade);
        }
        if (j.contains("quadrature")) {
            get_if(j.at("quadrature"), "rel_tol", c.quad_rel_tol);
            get_if(j.at("quadrature"), "near_window", c.near_window);
        }
        if (j.contains("report")) {
            get_if(j.at("report"), "alphas", c.report_alphas);
            get_if(j.at("report"), "ps", c.report_ps);
        }
        get_if(j, "out_dir", c.out_dir);
        get_if(j, "cache", c.cache);
        get_if(j, "threads", c.threads);
        get_if(j, "seed", c.seed);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace

BernsteinSpec ExperimentConfig::make_spec() const {
    if (phi_family == "stable") return BernsteinSpec::stable(phi_params.at("alpha"));
    if (phi_family == "relativistic-stable")
        return BernsteinSpec::relativistic_stable(phi_params.at("alpha"));
    if (phi_family == "sum-of-stables")
        return BernsteinSpec::sum_of_stables(phi_params.at("alpha1"),
                                             phi_params.at("alpha2"));
    throw std::invalid_argument("config: unsupported phi family '" + phi_family +
                                "' (custom specs are constructed in code)");
}

Nonlinearity ExperimentConfig::make_nonlinearity() const {
    if (f_family == "power") return Nonlinearity::power(f_p);
    if (f_family == "custom") return Nonlinearity::custom(f_expression);
    throw std::invalid_argument("config: unsupported f family '" + f_family + "'");
}

SolverOptions ExperimentConfig::solver_options() const {
    SolverOptions o;
    o.tol = solver_tol;
    o.iter_cap = solver_iter_cap;
    o.schedule_base = schedule_base;
    o.schedule_max = schedule_max;
    o.schedule_tol = schedule_tol;
    o.delta_stop_widths = delta_stop_widths;
    o.cert_safety = cert_safety;
    return o;
}

ConditionOptions ExperimentConfig::condition_options() const {
    ConditionOptions o;
    o.margin = cond_margin;
    o.ko_t_max = ko_t_max;
    o.per_decade = cond_per_decade;
    return o;
}

AssembleOptions ExperimentConfig::assemble_options() const {
    AssembleOptions o;
    o.quad.rel_tol = quad_rel_tol;
    o.near_window = near_window;
    o.threads = threads;
    return o;
}

std::string ExperimentConfig::canonical_json() const { return to_json(*this).dump(); }

std::string ExperimentConfig::fingerprint() const {
    return io::hex64(io::fnv1a64(canonical_json()));
}

std::string ExperimentConfig::operator_fingerprint() const {
    json j;
    j["phi"]["family"] = phi_family;
    j["phi"]["params"] = phi_params;
    j["domain"]["dim"] = dim;
    j["domain"]["radius"] = radius;
    j["grid"]["N"] = grid_n;
    j["grid"]["gamma"] = grid_gamma;
    j["quadrature"]["rel_tol"] = quad_rel_tol;
    j["quadrature"]["near_window"] = near_window;
    return io::hex64(io::fnv1a64(j.dump()));
}

std::string ExperimentConfig::to_json_text() const { return to_json(*this).dump(2) + "\n"; }

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return parse(j);
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

void ExperimentConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("config: ") + name +
                                        " must be positive");
    };
    positive(radius, "domain.radius");
    positive(grid_gamma, "grid.gamma");
    positive(solver_tol, "solver.tol");
    positive(schedule_base - 1.0, "solver.schedule_base (must exceed 1)");
    positive(schedule_tol, "solver.schedule_tol");
    positive(delta_stop_widths, "solver.delta_stop_widths");
    positive(cert_safety, "solver.cert_safety");
    positive(supersolution_eta, "solver.supersolution_eta");
    positive(rate_delta_lo, "rate.delta_lo");
    positive(rate_delta_hi - rate_delta_lo, "rate window");
    positive(cond_margin, "conditions.margin");
    positive(quad_rel_tol, "quadrature.rel_tol");
    if (dim < 2) throw std::invalid_argument("config: domain.dim must be >= 2");
    if (grid_n < 32) throw std::invalid_argument("config: grid.N must be >= 32");
    if (grid_gamma < 1.0) throw std::invalid_argument("config: grid.gamma must be >= 1");
    if (solver_iter_cap < 1 || schedule_max < 1)
        throw std::invalid_argument("config: iteration caps must be >= 1");
}

}  // namespace blowup
