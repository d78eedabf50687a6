#include "blowup/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace blowup::io {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    fs::rename(tmp, p);
}

void write_solution_csv(const std::string& path, const RadialGrid& grid,
                        const std::vector<double>& u, const std::vector<double>& ubar,
                        const std::vector<double>& vstar_times_u,
                        const std::string& fingerprint) {
    const int n = grid.size();
    if (u.size() != static_cast<std::size_t>(n) || ubar.size() != u.size() ||
        vstar_times_u.size() != u.size())
        throw std::invalid_argument("write_solution_csv: column size mismatch");
    std::string out;
    out.reserve(static_cast<std::size_t>(n) * 96);
    out += "# fingerprint=" + fingerprint + "\n";
    out += "r,delta,u,ubar,vstar_times_u\n";
    for (int i = 0; i < n; ++i) {
        out += fmt17(grid.node(i));
        out += ',';
        out += fmt17(grid.delta(i));
        out += ',';
        out += fmt17(u[static_cast<std::size_t>(i)]);
        out += ',';
        out += fmt17(ubar[static_cast<std::size_t>(i)]);
        out += ',';
        out += fmt17(vstar_times_u[static_cast<std::size_t>(i)]);
        out += '\n';
    }
    atomic_write(path, out);
}

SolutionCsv read_solution_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_solution_csv: cannot open " + path);
    SolutionCsv csv;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# fingerprint=", 0) != 0)
        throw std::runtime_error("read_solution_csv: missing fingerprint line in " + path);
    csv.fingerprint = line.substr(std::strlen("# fingerprint="));
    if (!std::getline(in, line) || line != "r,delta,u,ubar,vstar_times_u")
        throw std::runtime_error("read_solution_csv: unexpected header in " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double v[5];
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3],
                        &v[4]) != 5)
            throw std::runtime_error("read_solution_csv: bad row in " + path);
        csv.r.push_back(v[0]);
        csv.delta.push_back(v[1]);
        csv.u.push_back(v[2]);
        csv.ubar.push_back(v[3]);
        csv.vstar_times_u.push_back(v[4]);
    }
    return csv;
}

namespace {
constexpr char kCacheMagic[8] = {'B', 'L', 'W', 'O', 'P', 'C', '0', '1'};
}

void save_operator_cache(const std::string& path, const DiscreteOperator& op,
                         const std::string& fingerprint) {
    json header;
    const auto& g = op.grid();
    header["fingerprint"] = fingerprint;
    header["n"] = g.size();
    header["gamma"] = g.gamma();
    header["dim"] = g.domain().dim;
    header["radius"] = g.domain().radius;
    std::string h = header.dump();
    std::string blob;
    blob.reserve(16 + h.size() + op.matrix().size() * 8 + op.kappa().size() * 8);
    blob.append(kCacheMagic, sizeof(kCacheMagic));
    std::uint64_t hl = h.size();
    blob.append(reinterpret_cast<const char*>(&hl), 8);
    blob += h;
    blob.append(reinterpret_cast<const char*>(op.matrix().data()),
                op.matrix().size() * sizeof(double));
    blob.append(reinterpret_cast<const char*>(op.kappa().data()),
                op.kappa().size() * sizeof(double));
    atomic_write(path, blob);
}

std::optional<DiscreteOperator> load_operator_cache(const std::string& path,
                                                    const std::string& fingerprint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kCacheMagic, 8) != 0) return std::nullopt;
    std::uint64_t hl = 0;
    if (!in.read(reinterpret_cast<char*>(&hl), 8) || hl > (1u << 20)) return std::nullopt;
    std::string h(hl, '\0');
    if (!in.read(h.data(), static_cast<std::streamsize>(hl))) return std::nullopt;
    json header;
    try {
        header = json::parse(h);
    } catch (...) {
        return std::nullopt;
    }
    if (header.value("fingerprint", "") != fingerprint) return std::nullopt;
    int n = header.value("n", 0);
    if (n < 4) return std::nullopt;
    BallDomain dom{header.value("dim", 2), header.value("radius", 1.0)};
    auto grid = RadialGrid::build(dom, n, header.value("gamma", 1.0));
    std::vector<double> matrix(static_cast<std::size_t>(n) * n);
    std::vector<double> kappa(static_cast<std::size_t>(n));
    if (!in.read(reinterpret_cast<char*>(matrix.data()),
                 static_cast<std::streamsize>(matrix.size() * sizeof(double))))
        return std::nullopt;
    if (!in.read(reinterpret_cast<char*>(kappa.data()),
                 static_cast<std::streamsize>(kappa.size() * sizeof(double))))
        return std::nullopt;
    return DiscreteOperator::from_parts(std::move(grid), std::move(matrix),
                                        std::move(kappa));
}

namespace {

json verdict_json(Verdict v) { return to_string(v); }

json condition_json(const ConditionReport& rep) {
    json j;
    j["scaling"] = {{"delta1", rep.scaling.delta1}, {"delta2", rep.scaling.delta2},
                    {"a1", rep.scaling.a1},         {"a2", rep.scaling.a2},
                    {"t_min", rep.scaling.t_min},   {"t_max", rep.scaling.t_max},
                    {"verdict", rep.scaling.verdict}};
    j["f1"] = {{"m_hat", rep.f1.m_hat}, {"M_hat", rep.f1.M_hat}, {"verdict", rep.f1.verdict}};
    j["ko_integral"] = {{"verdict", verdict_json(rep.ko.verdict)},
                        {"tail_exponent", rep.ko.tail_exponent},
                        {"partial_integral", rep.ko.partial_integral}};
    j["ko_refined"] = {{"verdict", verdict_json(rep.ko_refined.verdict)},
                       {"c1", rep.ko_refined.c1},
                       {"r_lo", rep.ko_refined.r_lo},
                       {"r_hi", rep.ko_refined.r_hi},
                       {"note", rep.ko_refined.note}};
    j["kato_m"] = {{"verdict", verdict_json(rep.kato_m.verdict)},
                   {"sup_ratio", rep.kato_m.sup_ratio},
                   {"head_exponent", rep.kato_m.head_exponent}};
    j["growth"] = {{"verdict", verdict_json(rep.growth.verdict)},
                   {"trend_exponent", rep.growth.trend_exponent}};
    j["int_criterion"] = {{"verdict", verdict_json(rep.int_criterion.verdict)},
                          {"integral", rep.int_criterion.integral},
                          {"head_exponent", rep.int_criterion.head_exponent}};
    j["admissible"] = rep.admissible;
    j["reason"] = rep.reason;
    return j;
}

}  // namespace

std::string condition_report_json(const ConditionReport& rep,
                                  const std::string& fingerprint) {
    json j = condition_json(rep);
    j["fingerprint"] = fingerprint;
    return j.dump(2) + "\n";
}

std::string condition_report_table(const ConditionReport& rep) {
    std::ostringstream os;
    auto row = [&](const std::string& name, const std::string& verdict,
                   const std::string& detail) {
        os << "  " << name;
        for (std::size_t i = name.size(); i < 22; ++i) os << ' ';
        os << verdict;
        for (std::size_t i = verdict.size(); i < 16; ++i) os << ' ';
        os << detail << "\n";
    };
    os << "condition              verdict         detail\n";
    os << "---------------------------------------------------------------\n";
    row("scaling", rep.scaling.verdict ? "holds" : "fails",
        "delta1=" + fmt17(rep.scaling.delta1) + " delta2=" + fmt17(rep.scaling.delta2));
    row("f1-exponents", rep.f1.verdict ? "holds" : "fails",
        "m=" + fmt17(rep.f1.m_hat) + " M=" + fmt17(rep.f1.M_hat));
    row("ko-integral", to_string(rep.ko.verdict),
        "tail_exponent=" + fmt17(rep.ko.tail_exponent));
    row("ko-refined", to_string(rep.ko_refined.verdict), "C1=" + fmt17(rep.ko_refined.c1));
    row("kato-m", to_string(rep.kato_m.verdict),
        "sup_ratio=" + fmt17(rep.kato_m.sup_ratio));
    row("boundary-growth", to_string(rep.growth.verdict),
        "trend=" + fmt17(rep.growth.trend_exponent));
    row("integral-criterion", to_string(rep.int_criterion.verdict),
        "integral=" + fmt17(rep.int_criterion.integral));
    os << "---------------------------------------------------------------\n";
    os << "admissible: " << (rep.admissible ? "yes" : "no");
    if (!rep.admissible && !rep.reason.empty()) os << "  (" << rep.reason << ")";
    os << "\n";
    return os.str();
}

std::string trace_json(const SolveTrace& trace, const SupersolutionBundle& bundle,
                       const RateInfo& rate, const std::string& fingerprint) {
    json j;
    j["fingerprint"] = fingerprint;
    j["converged"] = trace.converged;
    j["monotone_across"] = trace.monotone_across;
    j["dominated"] = trace.dominated;
    j["delta_stop"] = trace.delta_stop;
    j["trusted_last"] = trace.trusted_last;
    j["k_mesh"] = trace.k_mesh;
    j["note"] = trace.note;
    j["supersolution"] = {{"a", bundle.a},
                          {"b", bundle.b},
                          {"c2", bundle.c2},
                          {"eta1", bundle.eta1},
                          {"min_cert_margin", bundle.min_cert_margin},
                          {"k_cert_max", bundle.k_cert_max},
                          {"ubar_l1", bundle.ubar_l1}};
    j["rate"] = {{"beta", rate.beta},
                 {"residual_rms", rate.residual_rms},
                 {"expected", rate.expected},
                 {"window", {rate.window_lo, rate.window_hi}}};
    j["rounds"] = json::array();
    for (const auto& r : trace.rounds) {
        j["rounds"].push_back({{"k", r.k},
                               {"iterations", r.iterations},
                               {"final_change", r.final_change},
                               {"monotone_within", r.monotone_within},
                               {"domination_margin", r.domination_margin},
                               {"vstar_u_outer", r.vstar_u_outer},
                               {"round_change", r.round_change},
                               {"lambda_boosts", r.lambda_boosts},
                               {"clamp_events", r.clamp_events}});
    }
    return j.dump(2) + "\n";
}

TraceSummary read_trace_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_trace_json: cannot open " + path);
    json j = json::parse(in);
    TraceSummary t;
    t.fingerprint = j.value("fingerprint", "");
    t.converged = j.value("converged", false);
    t.monotone_across = j.value("monotone_across", false);
    t.dominated = j.value("dominated", false);
    if (j.contains("rounds"))
        for (const auto& r : j.at("rounds")) t.ks.push_back(r.value("k", 0.0));
    if (j.contains("rate")) t.beta = j.at("rate").value("beta", 0.0);
    return t;
}

std::string check_results_json(const std::vector<CheckResult>& results,
                               const std::string& fingerprint) {
    json j;
    j["fingerprint"] = fingerprint;
    j["checks"] = json::array();
    bool all = true;
    for (const auto& r : results) {
        j["checks"].push_back({{"name", r.name},
                               {"verdict", r.verdict},
                               {"applicable", r.applicable},
                               {"worst_margin", r.worst_margin},
                               {"worst_node", r.worst_node},
                               {"tolerance", r.tolerance},
                               {"note", r.note}});
        all = all && r.verdict;
    }
    j["all_pass"] = all;
    return j.dump(2) + "\n";
}

std::string check_results_table(const std::vector<CheckResult>& results) {
    std::ostringstream os;
    os << "check                        verdict  worst_margin            node  tol\n";
    os << "--------------------------------------------------------------------------\n";
    for (const auto& r : results) {
        os << "  " << r.name;
        for (std::size_t i = r.name.size(); i < 27; ++i) os << ' ';
        std::string v = r.applicable ? (r.verdict ? "pass" : "FAIL") : "n/a";
        os << v;
        for (std::size_t i = v.size(); i < 9; ++i) os << ' ';
        std::string m = fmt17(r.worst_margin);
        os << m;
        for (std::size_t i = m.size(); i < 24; ++i) os << ' ';
        os << r.worst_node << "  " << fmt17(r.tolerance);
        if (!r.note.empty()) os << "  (" << r.note << ")";
        os << "\n";
    }
    return os.str();
}

}  // namespace blowup::io
