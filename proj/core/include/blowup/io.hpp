#pragma once

#include "blowup/conditions.hpp"
#include "blowup/domain.hpp"
#include "blowup/op.hpp"
#include "blowup/solver.hpp"
#include "blowup/verify.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace blowup::io {

std::string fmt17(double x);  // "%.17g", locale-independent
std::uint64_t fnv1a64(std::string_view s);
std::string hex64(std::uint64_t v);

/// Write via temp file + rename; partial files never become visible.
void atomic_write(const std::string& path, const std::string& content);

// -- solution CSV -------------------------------------------------------
// First line: "# fingerprint=<hex>"; then the exact header
// r,delta,u,ubar,vstar_times_u with '.' decimals and LF endings.
void write_solution_csv(const std::string& path, const RadialGrid& grid,
                        const std::vector<double>& u, const std::vector<double>& ubar,
                        const std::vector<double>& vstar_times_u,
                        const std::string& fingerprint);

struct SolutionCsv {
    std::string fingerprint;
    std::vector<double> r, delta, u, ubar, vstar_times_u;
};
SolutionCsv read_solution_csv(const std::string& path);

// -- operator cache ------------------------------------------------------
// Binary container: magic, JSON header (grid + fingerprint), raw doubles.
void save_operator_cache(const std::string& path, const DiscreteOperator& op,
                         const std::string& fingerprint);
std::optional<DiscreteOperator> load_operator_cache(const std::string& path,
                                                    const std::string& fingerprint);

// -- reports -------------------------------------------------------------
std::string condition_report_json(const ConditionReport& rep,
                                  const std::string& fingerprint);
std::string condition_report_table(const ConditionReport& rep);

struct RateInfo {
    double beta = 0.0;
    double residual_rms = 0.0;
    double expected = 0.0;  // α/(p−1) when meaningful, else 0
    double window_lo = 0.0, window_hi = 0.0;
};

std::string trace_json(const SolveTrace& trace, const SupersolutionBundle& bundle,
                       const RateInfo& rate, const std::string& fingerprint);
struct TraceSummary {
    std::string fingerprint;
    bool converged = false;
    bool monotone_across = false;
    bool dominated = false;
    std::vector<double> ks;
    double beta = 0.0;
};
TraceSummary read_trace_json(const std::string& path);

std::string check_results_json(const std::vector<CheckResult>& results,
                               const std::string& fingerprint);
std::string check_results_table(const std::vector<CheckResult>& results);

}  // namespace blowup::io
