#ifndef INFNET_SCENARIO_HPP
#define INFNET_SCENARIO_HPP

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infnet/dot.hpp"
#include "infnet/dynamics.hpp"
#include "infnet/geodesic.hpp"
#include "infnet/network_json.hpp"
#include "infnet/trajectory.hpp"

namespace infnet {

inline constexpr const char* scenario_schema = "scenario/1";
inline constexpr const char* report_schema = "report/1";
inline constexpr const char* output_dir_env = "INFNET_OUT_DIR";

enum class ScenarioMode { discrete, continuum, analytic, compare };

inline ScenarioMode scenario_mode_from_string(const std::string& text) {
    if (text == "discrete") return ScenarioMode::discrete;
    if (text == "continuum") return ScenarioMode::continuum;
    if (text == "analytic") return ScenarioMode::analytic;
    if (text == "compare") return ScenarioMode::compare;
    throw std::invalid_argument("unknown scenario mode: '" + text + "'");
}

struct ScenarioTolerances {
    double slope_rel = 0.02;
    double pointwise_rel = 1e-6;
};

struct Scenario {
    std::string name;
    ScenarioMode mode = ScenarioMode::discrete;

    std::string field_kind = "constant";  // constant | linear | gaussian
    RateSpec base_rates;
    double p_grad_t = 0.0, p_grad_x = 0.0;  // linear field gradients
    double q_grad_t = 0.0, q_grad_x = 0.0;
    double bump_amplitude = 0.0, bump_center_x = 0.0, bump_width = 1.0;

    Rational k0 = 1;
    std::optional<double> phi0;
    double t0 = 0.0, x0 = 0.0;

    long receptions = 0;
    double tau_span = 0.0;
    double step = 0.0;
    std::uint64_t seed = 0;
    bool seed_set = false;

    GapMode gap_mode = GapMode::deterministic;
    NumericMode numeric = NumericMode::floating;
    PotentialForm potential_form = PotentialForm::full;
    ScenarioTolerances tol;

    std::string out_dir;  // optional subdirectory below the output base
    std::string out_discrete_csv, out_continuum_csv, out_analytic_csv, out_report_json;

    bool wants_discrete() const {
        return mode == ScenarioMode::discrete || mode == ScenarioMode::compare;
    }
    bool wants_continuum() const {
        return mode == ScenarioMode::continuum || mode == ScenarioMode::compare;
    }
    bool wants_analytic() const {
        return mode == ScenarioMode::analytic || mode == ScenarioMode::compare;
    }
    /// The analytic pipeline exists only for a constant one-sided field.
    bool analytic_applicable() const {
        return field_kind == "constant" && base_rates.r_p == 0.0 && base_rates.r_q > 0.0;
    }

    RateField make_field() const {
        if (field_kind == "constant") {
            return RateField::constant(base_rates.r_p, base_rates.r_q);
        }
        if (field_kind == "linear") {
            return RateField::linear(base_rates, p_grad_t, p_grad_x, q_grad_t, q_grad_x);
        }
        if (field_kind == "gaussian") {
            return RateField::gaussian_bump(base_rates, bump_amplitude, bump_center_x,
                                            bump_width);
        }
        throw std::invalid_argument("unknown rate field kind: '" + field_kind + "'");
    }

    double start_rapidity() const { return phi0 ? *phi0 : log_rational(k0); }
};

namespace detail {

inline Rational rational_from_json(const nlohmann::json& j, const std::string& what) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number_float()) return Rational(j.get<double>());  // exact binary value
    throw std::invalid_argument(what + " must be a number or a 'p/q' string");
}

inline std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                c == '.')
                   ? c
                   : '_';
    }
    return out.empty() ? std::string("scenario") : out;
}

} // namespace detail

inline Scenario parse_scenario(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("scenario must be a JSON object");
    }
    if (j.value("schema", "") != scenario_schema) {
        throw std::invalid_argument(std::string("scenario must declare schema '") +
                                    scenario_schema + "'");
    }
    Scenario sc;
    sc.name = j.value("name", "unnamed");
    sc.mode = scenario_mode_from_string(j.at("mode").get<std::string>());

    const auto& jr = j.at("rates");
    sc.field_kind = jr.value("field", "constant");
    sc.base_rates.r_p = jr.value("r_p", 0.0);
    sc.base_rates.r_q = jr.value("r_q", 0.0);
    if (sc.field_kind == "linear") {
        sc.p_grad_t = jr.value("p_grad_t", 0.0);
        sc.p_grad_x = jr.value("p_grad_x", 0.0);
        sc.q_grad_t = jr.value("q_grad_t", 0.0);
        sc.q_grad_x = jr.value("q_grad_x", 0.0);
    } else if (sc.field_kind == "gaussian") {
        sc.bump_amplitude = jr.value("amplitude", 0.0);
        sc.bump_center_x = jr.value("center_x", 0.0);
        sc.bump_width = jr.value("width", 1.0);
    } else if (sc.field_kind != "constant") {
        throw std::invalid_argument("unknown rate field kind: '" + sc.field_kind + "'");
    }

    if (j.contains("initial")) {
        const auto& ji = j.at("initial");
        if (ji.contains("k0") && ji.contains("phi0")) {
            throw std::invalid_argument("initial state: give k0 or phi0, not both");
        }
        if (ji.contains("k0")) {
            sc.k0 = detail::rational_from_json(ji.at("k0"), "initial.k0");
            if (!(sc.k0 > 0)) throw std::invalid_argument("initial.k0 must be positive");
        }
        if (ji.contains("phi0")) {
            sc.phi0 = ji.at("phi0").get<double>();
            sc.k0 = Rational(std::exp(*sc.phi0));
        }
        sc.t0 = ji.value("t0", 0.0);
        sc.x0 = ji.value("x0", 0.0);
    }

    sc.receptions = j.value("receptions", 0L);
    sc.tau_span = j.value("tau_span", 0.0);
    sc.step = j.value("step", 0.0);
    if (j.contains("seed")) {
        sc.seed = j.at("seed").get<std::uint64_t>();
        sc.seed_set = true;
    }
    sc.gap_mode = gap_mode_from_string(j.value("gap_mode", "deterministic"));
    sc.numeric = numeric_mode_from_string(j.value("numeric_mode", "float"));
    sc.potential_form = potential_form_from_string(j.value("potential_form", "full"));
    if (j.contains("tolerances")) {
        const auto& jt = j.at("tolerances");
        sc.tol.slope_rel = jt.value("slope_rel", sc.tol.slope_rel);
        sc.tol.pointwise_rel = jt.value("pointwise_rel", sc.tol.pointwise_rel);
    }
    if (j.contains("outputs")) {
        const auto& jo = j.at("outputs");
        sc.out_dir = jo.value("dir", "");
        sc.out_discrete_csv = jo.value("discrete_csv", "");
        sc.out_continuum_csv = jo.value("continuum_csv", "");
        sc.out_analytic_csv = jo.value("analytic_csv", "");
        sc.out_report_json = jo.value("report", "");
    }

    // cross-field validation
    if (sc.wants_discrete()) {
        if (!sc.seed_set) {
            throw std::invalid_argument("scenario mode '" + std::string(j.at("mode")) +
                                        "' runs the discrete pipeline and requires a seed");
        }
        if (sc.receptions <= 0) {
            throw std::invalid_argument("discrete pipeline requires receptions > 0");
        }
        if (sc.numeric == NumericMode::exact && sc.phi0) {
            throw std::invalid_argument(
                "exact numeric mode requires an exact k0, not a rapidity");
        }
    }
    if (sc.wants_continuum() || sc.mode == ScenarioMode::analytic) {
        if (!(sc.tau_span > 0.0) || !(sc.step > 0.0)) {
            throw std::invalid_argument(
                "continuum/analytic pipelines require positive tau_span and step");
        }
    }
    if (sc.mode == ScenarioMode::analytic && !sc.analytic_applicable()) {
        throw std::invalid_argument(
            "analytic mode needs a constant field with r_p = 0 and r_q > 0");
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);  // throws with line/column info
    return parse_scenario(j);
}

struct ScenarioOutcome {
    int exit_code = 0;
    nlohmann::json report;
    std::vector<std::string> files_written;
    std::string diagnostic;
};

/// Output base precedence: explicit argument, then $INFNET_OUT_DIR, then cwd.
inline std::filesystem::path resolve_output_base(const std::string& cli_dir) {
    if (!cli_dir.empty()) return cli_dir;
    if (const char* env = std::getenv(output_dir_env); env && *env) return env;
    return ".";
}

namespace detail {

inline std::string write_text_file(const std::filesystem::path& path,
                                   const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "."
                                                                   : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << content;
    return path.string();
}

inline std::vector<TrajectoryPoint> sample_hyperbolic(const HyperbolicSolution& sol,
                                                      double tau_span, double step) {
    std::vector<TrajectoryPoint> points;
    const long steps = std::lround(tau_span / step);
    for (long i = 0; i <= steps; ++i) {
        const double tau = static_cast<double>(i) * step;
        const auto [t, x] = sol(tau);
        TrajectoryPoint p;
        p.tau = tau;
        p.t = t;
        p.x = x;
        p.rapidity = sol.rapidity(tau);
        p.v = std::tanh(p.rapidity);
        p.k = std::exp(p.rapidity);
        points.push_back(p);
    }
    return points;
}

} // namespace detail

/// Runs the pipelines a scenario asks for, writes trajectory CSVs, and in
/// compare mode evaluates the cross-pipeline checks against the scenario
/// tolerances.  Exit code 0: all good; 1: tolerance failure or mid-run domain
/// truncation; input problems surface as exceptions (the CLI maps them to 2).
inline ScenarioOutcome run_scenario(const Scenario& sc, const std::string& out_base = "") {
    namespace fs = std::filesystem;
    ScenarioOutcome outcome;
    const fs::path base = resolve_output_base(out_base) /
                          (sc.out_dir.empty() ? fs::path() : fs::path(sc.out_dir));
    const std::string stem = detail::sanitize_name(sc.name);
    const RateField field = sc.make_field();

    nlohmann::json pipelines;
    std::optional<LineFit> discrete_fit, continuum_fit;
    std::optional<HyperbolicSolution> analytic;
    std::optional<DeviationStats> continuum_vs_analytic;

    if (sc.wants_discrete()) {
        SimulationOptions opt;
        opt.seed = sc.seed;
        opt.gap_mode = sc.gap_mode;
        opt.numeric = sc.numeric;
        DiscreteRun run;
        bool truncated = false;
        try {
            run = simulate(InitialConditions{sc.k0, sc.t0, sc.x0}, field, sc.receptions, opt);
        } catch (SimulationTruncated& e) {
            run = std::move(e.partial);
            truncated = true;
            outcome.diagnostic = e.what();
            outcome.exit_code = 1;
        }
        const fs::path csv = base / (sc.out_discrete_csv.empty() ? stem + "_discrete.csv"
                                                                 : sc.out_discrete_csv);
        outcome.files_written.push_back(detail::write_text_file(csv, to_csv(run.points)));
        discrete_fit = run.points.size() >= 2 ? std::optional(fit_rapidity_slope(run.points))
                                              : std::nullopt;
        pipelines["discrete"] = {
            {"points", run.points.size()},
            {"collinearity_rejections", run.collinearity_rejections},
            {"truncated", truncated},
        };
        if (discrete_fit) {
            pipelines["discrete"]["rapidity_slope"] = discrete_fit->slope;
            pipelines["discrete"]["rapidity_intercept"] = discrete_fit->intercept;
        }
    }

    if (sc.wants_continuum()) {
        IntegrationOptions opt;
        opt.step = sc.step;
        opt.form = sc.potential_form;
        const ContinuumRun run = integrate(
            field, WorldlineStart{sc.t0, sc.x0, sc.start_rapidity()}, sc.tau_span, opt);
        if (run.truncated) {
            outcome.diagnostic = run.diagnostic;
            outcome.exit_code = 1;
        }
        const fs::path csv = base / (sc.out_continuum_csv.empty() ? stem + "_continuum.csv"
                                                                  : sc.out_continuum_csv);
        outcome.files_written.push_back(detail::write_text_file(csv, to_csv(run.points)));
        continuum_fit = run.points.size() >= 2 ? std::optional(fit_rapidity_slope(run.points))
                                               : std::nullopt;
        pipelines["continuum"] = {
            {"points", run.points.size()},
            {"max_norm_drift", run.max_norm_drift},
            {"truncated", run.truncated},
        };
        if (continuum_fit) pipelines["continuum"]["rapidity_slope"] = continuum_fit->slope;
        if (sc.wants_analytic() && sc.analytic_applicable() && !run.truncated) {
            const auto sol = HyperbolicSolution::from_constant_rate(
                sc.base_rates.r_q, sc.start_rapidity(), sc.t0, sc.x0);
            continuum_vs_analytic = deviation_from_solution(
                run.points, [&](double tau) { return sol(tau); });
        }
    }

    if (sc.wants_analytic()) {
        if (sc.analytic_applicable()) {
            analytic = HyperbolicSolution::from_constant_rate(
                sc.base_rates.r_q, sc.start_rapidity(), sc.t0, sc.x0);
            if (sc.tau_span > 0.0 && sc.step > 0.0) {
                const auto points = detail::sample_hyperbolic(*analytic, sc.tau_span, sc.step);
                const fs::path csv =
                    base / (sc.out_analytic_csv.empty() ? stem + "_analytic.csv"
                                                        : sc.out_analytic_csv);
                outcome.files_written.push_back(
                    detail::write_text_file(csv, to_csv(points)));
            }
            pipelines["analytic"] = {{"acceleration", analytic->accel},
                                     {"rapidity_slope", analytic->accel}};
        } else {
            pipelines["analytic"] = nullptr;  // no closed form for this field
        }
    }

    nlohmann::json checks = nlohmann::json::array();
    bool pass = outcome.exit_code == 0;
    auto add_check = [&](const std::string& name, double value, double tolerance) {
        const bool ok = value <= tolerance;
        checks.push_back(
            {{"name", name}, {"value", value}, {"tolerance", tolerance}, {"pass", ok}});
        pass = pass && ok;
    };
    if (sc.mode == ScenarioMode::compare) {
        if (analytic && discrete_fit) {
            add_check("discrete_slope_vs_analytic",
                      std::abs(discrete_fit->slope - analytic->accel) / analytic->accel,
                      sc.tol.slope_rel);
        }
        if (analytic && continuum_vs_analytic) {
            add_check("continuum_vs_analytic_pointwise", continuum_vs_analytic->max_rel,
                      sc.tol.pointwise_rel);
        }
        if (discrete_fit && continuum_fit && continuum_fit->slope != 0.0) {
            add_check("discrete_slope_vs_continuum",
                      std::abs(discrete_fit->slope - continuum_fit->slope) /
                          std::abs(continuum_fit->slope),
                      sc.tol.slope_rel);
        }
    }

    nlohmann::json report;
    report["schema"] = report_schema;
    report["scenario"] = sc.name;
    report["pipelines"] = pipelines;
    if (continuum_vs_analytic) {
        report["deviations"]["continuum_vs_analytic"] = {
            {"max_rel", continuum_vs_analytic->max_rel},
            {"rms_rel", continuum_vs_analytic->rms_rel}};
    }
    report["checks"] = checks;
    report["pass"] = pass;
    if (!outcome.diagnostic.empty()) report["diagnostic"] = outcome.diagnostic;
    outcome.report = report;

    if (sc.mode == ScenarioMode::compare || !sc.out_report_json.empty()) {
        const fs::path rp =
            base / (sc.out_report_json.empty() ? stem + "_report.json" : sc.out_report_json);
        outcome.files_written.push_back(detail::write_text_file(rp, report.dump(2) + "\n"));
    }
    if (!pass && outcome.exit_code == 0) outcome.exit_code = 1;
    return outcome;
}

// --- network export -----------------------------------------------------------

struct NetworkExport {
    std::string dot;
    std::vector<std::string> warnings;
};

/// Loads a network description and renders its Hasse diagram; particle chains
/// are scanned for collinearity violations, which become warnings.
inline NetworkExport export_network(const nlohmann::json& network_json) {
    const InfluenceNetwork net = network_from_json(network_json);
    NetworkExport result;
    result.dot = export_hasse(net);
    for (const Chain& chain : net.chains()) {
        if (chain.role != ChainRole::particle) continue;
        bool taggable = true;
        for (int idx : chain.events) {
            if (!net.events()[idx].side) taggable = false;
        }
        if (!taggable) continue;  // untagged particle chains are fine to draw
        for (const auto& v : net.collinearity_scan(chain.id)) {
            result.warnings.push_back(
                "collinearity violation on chain '" + chain.id + "': emission '" +
                v.emission_id + "' toward side " + std::string(1, side_char(v.side)) +
                " immediately precedes reception '" + v.reception_id + "' from that side");
        }
    }
    return result;
}

} // namespace infnet

#endif // INFNET_SCENARIO_HPP
