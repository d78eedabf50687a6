#pragma once

#include "blowup/bernstein.hpp"
#include "blowup/conditions.hpp"
#include "blowup/domain.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/solver.hpp"

#include <map>
#include <string>
#include <vector>

namespace blowup {

/// One experiment = one JSON document; no environment-variable knobs.
struct ExperimentConfig {
    // operator symbol
    std::string phi_family = "stable";  // stable | relativistic-stable | sum-of-stables | custom
    std::map<std::string, double> phi_params = {{"alpha", 1.0}};

    // source term
    std::string f_family = "power";  // power | custom
    double f_p = 2.5;
    std::string f_expression;

    // geometry and mesh
    int dim = 2;
    double radius = 1.0;
    int grid_n = 1024;
    double grid_gamma = 2.0;

    // solver knobs
    double solver_tol = 1e-10;
    int solver_iter_cap = 200;
    double schedule_base = 3.0;
    int schedule_max = 12;
    double schedule_tol = 1e-4;
    double delta_stop_widths = 3.0;
    double cert_safety = 3.0;
    double supersolution_eta = 0.1;  // band width (× radius) for the certificate

    // rate-fit window (× radius)
    double rate_delta_lo = 0.005;
    double rate_delta_hi = 0.05;

    // conditions knobs
    double cond_margin = 0.05;
    double ko_t_max = 1e8;
    int cond_per_decade = 16;

    // quadrature / assembly
    double quad_rel_tol = 1e-8;
    int near_window = 3;

    // sweep lattice for the `report` subcommand
    std::vector<double> report_alphas = {0.4, 0.8, 1.0, 1.2, 1.6};
    std::vector<double> report_ps = {1.2, 1.6, 2.0, 2.4, 2.8, 3.2, 4.0};

    std::string out_dir = "out";
    bool cache = true;
    int threads = 0;
    unsigned long long seed = 0x5eedULL;

    // -- derived objects -------------------------------------------------
    BernsteinSpec make_spec() const;
    Nonlinearity make_nonlinearity() const;
    BallDomain make_domain() const { return BallDomain{dim, radius}; }
    SolverOptions solver_options() const;
    ConditionOptions condition_options() const;
    AssembleOptions assemble_options() const;

    /// Canonical single-line JSON (sorted keys); basis of the fingerprint.
    std::string canonical_json() const;
    /// FNV-1a 64 content hash of the canonical form, as 16 hex digits.
    std::string fingerprint() const;
    /// Hash over the operator-determining subset (phi, domain, grid, quad).
    std::string operator_fingerprint() const;

    std::string to_json_text() const;  // pretty, round-trips bit-exactly
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);

    void validate() const;  // positive knobs; throws with field names
};

}  // namespace blowup
