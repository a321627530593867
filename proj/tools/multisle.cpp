// Command-line front end: weight evaluation, verification suites, Cardy
// sweeps and percolation Monte Carlo, with CSV or line-delimited JSON output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "multisle/functionals.hpp"
#include "multisle/parallel.hpp"
#include "multisle/percolation.hpp"
#include "multisle/weights.hpp"

using json = nlohmann::json;
using namespace multisle;

namespace {

// All floating output carries 17 significant digits so runs are exactly
// reproducible as regression baselines.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json number(double v) { return json::parse(fmt(v)); }

struct Output {
    std::string path;   // empty: stdout
    std::string format; // "json" or "csv"

    void write_rows(const std::vector<json>& rows,
                    const std::vector<std::string>& columns) const {
        std::ostringstream os;
        if (format == "csv") {
            for (size_t c = 0; c < columns.size(); ++c)
                os << (c ? "," : "") << columns[c];
            os << "\r\n";
            for (const auto& row : rows) {
                for (size_t c = 0; c < columns.size(); ++c) {
                    if (c)
                        os << ",";
                    const auto& v = row.at(columns[c]);
                    if (v.is_number())
                        os << fmt(v.get<double>());
                    else if (v.is_boolean())
                        os << (v.get<bool>() ? "true" : "false");
                    else
                        os << v.get<std::string>();
                }
                os << "\r\n";
            }
        } else {
            for (const auto& row : rows)
                os << row.dump() << "\n";
        }
        if (path.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            f << os.str();
        }
    }
};

std::vector<double> parse_points(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty())
            out.push_back(std::stod(tok));
    return out;
}

// Optional JSON config file mirroring every flag; explicitly passed flags
// win over file values.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw CLI::ValidationError("--config", "cannot open " + path);
    json j;
    f >> j;
    for (auto& [key, val] : j.items()) {
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (!opt || opt->count() > 0)
            continue;
        std::vector<std::string> sval;
        if (val.is_array()) {
            std::string list;
            for (const auto& e : val)
                list += (list.empty() ? "" : ",") + e.dump();
            sval.push_back(list);
        } else if (val.is_string()) {
            sval.push_back(val.get<std::string>());
        } else {
            sval.push_back(val.dump());
        }
        opt->add_result(sval[0]);
        opt->run_callback();
    }
}

int run_weight(double kappa, const std::string& points_str, int sigma,
               bool rainbow, int rotation, double quad_tol, const Output& out) {
    const PointConfig cfg(parse_points(points_str));
    const KappaContext kc(kappa);
    QuadOptions qo = default_quad_options(cfg.n_pairs);
    if (quad_tol > 0.0)
        qo.tol = quad_tol;
    WeightValue w;
    if (rainbow)
        w = weight_rainbow(kc, rotation, cfg, qo);
    else
        w = weight_by_sigma(kc, sigma, cfg, qo);
    json row = {{"N", cfg.n_pairs},
                {"sigma", rainbow ? rotation + 1 : sigma},
                {"kappa", number(kappa)},
                {"value", number(w.value)},
                {"err_est", number(w.err_est)}};
    out.write_rows({row}, {"N", "sigma", "kappa", "value", "err_est"});
    return 0;
}

json report_row(const std::string& check, double kappa,
                const std::vector<double>& config, double value,
                double tolerance, bool pass) {
    json cfg = json::array();
    for (double v : config)
        cfg.push_back(number(v));
    return {{"check", check},       {"kappa", number(kappa)},
            {"config", cfg},        {"value", number(value)},
            {"tolerance", number(tolerance)}, {"pass", pass}};
}

std::vector<double> default_points(int n_pairs) {
    std::vector<double> pts;
    for (int i = 0; i < 2 * n_pairs; ++i)
        pts.push_back(static_cast<double>(i));
    return pts;
}

int run_verify(const std::string& what, int n_pairs, double kappa,
               const std::string& points_str, int sigma, bool triple,
               double quad_tol, double limit_tol, int threads,
               std::uint64_t seed, const Output& out) {
    std::vector<json> rows;
    const std::vector<std::string> cols = {"check", "kappa",     "config",
                                           "value", "tolerance", "pass"};
    bool all_pass = true;
    auto push = [&](const json& r) {
        all_pass = all_pass && r.at("pass").get<bool>();
        rows.push_back(r);
    };

    if (what == "duality") {
        const std::vector<double> pts = points_str.empty()
                                            ? default_points(n_pairs)
                                            : parse_points(points_str);
        const PointConfig base(pts);
        const KappaContext kc(kappa);
        QuadOptions qo = default_quad_options(n_pairs);
        if (quad_tol > 0.0)
            qo.tol = quad_tol;
        LimitOptions lo;
        if (n_pairs == 4)
            lo.ladder = 6;
        const double tol = limit_tol > 0.0 ? limit_tol
                                           : (n_pairs == 4 ? 2e-2 : 5e-3);
        const DualityMatrix m =
            duality_matrix(n_pairs, kc, base, qo, lo, threads);
        push(report_row("duality_offdiag", kappa, pts, m.max_offdiag(), tol,
                        m.max_offdiag() <= tol));
        push(report_row("duality_diag", kappa, pts, m.max_diag_deviation(),
                        tol, m.max_diag_deviation() <= tol));
    } else if (what == "pde") {
        const KappaContext kc(kappa);
        const double tol = limit_tol > 0.0 ? limit_tol : 1e-3;
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> gap(0.5, 1.5);
        QuadOptions qo = default_quad_options(n_pairs);
        qo.tol = quad_tol > 0.0 ? quad_tol : qo.tol * 0.01;
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> pts;
            double v = 0.0;
            for (int i = 0; i < 2 * n_pairs; ++i) {
                v += gap(rng);
                pts.push_back(v);
            }
            const PointConfig cfg(pts);
            const WeightFn f = [&](const PointConfig& c) {
                if (n_pairs == 1)
                    return weight_n1(kc, c).value;
                if (n_pairs == 2)
                    return weight_rect_hyp(kc, 1, c).value;
                return weight_by_sigma(kc, 1, c, qo).value;
            };
            const auto r = pde_residual(f, kc, cfg, 1e-4 * cfg.diameter());
            double worst_null = 0.0;
            for (double x : r.nullstate)
                worst_null = std::max(worst_null, x);
            const double worst_ward =
                std::max({r.ward[0], r.ward[1], r.ward[2]});
            push(report_row("nullstate", kappa, pts, worst_null, tol,
                            worst_null <= tol));
            push(report_row("ward", kappa, pts, worst_ward, tol,
                            worst_ward <= tol));
        }
    } else if (what == "identities") {
        const double k163 = 16.0 / 3.0, k203 = 20.0 / 3.0;
        if (std::abs(kappa - k163) < 1e-6) {
            const auto rep = check_exceptional_identities(k163);
            push(report_row("hex_identity", k163, {}, rep.hex_residual, 1e-6,
                            rep.hex_residual <= 1e-6));
            push(report_row("oct_pi1_decay_order", k163, {}, rep.decay_order,
                            1.8, rep.decay_order >= 1.8));
        } else if (std::abs(kappa - k203) < 1e-6) {
            const auto rep = check_exceptional_identities(k203);
            push(report_row("oct_identity", k203, {}, rep.oct_residual, 1e-5,
                            rep.oct_residual <= 1e-5));
        } else {
            throw std::domain_error(
                "verify identities: kappa must be 16/3 or 20/3");
        }
    } else if (what == "logfit") {
        const KappaContext kc(kappa);
        const PointConfig cfg({0.0, 1.0, 2.3, 3.4});
        const WeightFn f = [&](const PointConfig& c) {
            return weight_rect_hyp(kc, sigma, c).value;
        };
        const LogFitResult r =
            triple ? frobenius_log_fit_triple(f, 1, 0.4, kc, cfg)
                   : frobenius_log_fit_pair(f, 1, kc, cfg);
        json row = report_row("logfit", kappa, cfg.x,
                              r.c0_err > 0.0 ? std::abs(r.c0) / r.c0_err : 0.0,
                              5.0, r.condition < 1e14);
        row["verdict"] = r.log_present ? "log present" : "no log";
        row["A0"] = number(r.a0);
        row["B0"] = number(r.b0);
        row["C0"] = number(r.c0);
        push(row);
    } else {
        throw std::domain_error("verify: unknown suite '" + what + "'");
    }
    out.write_rows(rows, cols);
    return all_pass ? 0 : 1;
}

int run_cardy_sweep(double r_min, double r_max, int steps, const Output& out) {
    if (!(r_min > 0.0) || !(r_max >= r_min) || steps < 1)
        throw std::domain_error("cardy-sweep: need 0 < r-min <= r-max, steps >= 1");
    std::vector<json> rows;
    for (int i = 0; i < steps; ++i) {
        const double r =
            steps == 1 ? r_min
                       : r_min * std::pow(r_max / r_min,
                                          static_cast<double>(i) / (steps - 1));
        const double lambda = lambda_from_aspect(1.0 / r);
        const double p = cardy_probability(lambda);
        rows.push_back({{"R", number(r)},
                        {"lambda", number(lambda)},
                        {"P_cardy", number(p)}});
    }
    out.write_rows(rows, {"R", "lambda", "P_cardy"});
    return 0;
}

int run_perc(int width, int height, double p, long trials, std::uint64_t seed,
             int threads, const Output& out) {
    const LatticeSpec spec(width, height, p, seed);
    const auto est = estimate_crossing(spec, trials, threads);
    const double r = spec.aspect_ratio();
    json row = {{"width", width},
                {"height", height},
                {"p", number(p)},
                {"trials", static_cast<long long>(trials)},
                {"p_hat", number(est.p_hat)},
                {"stderr", number(est.stderr_)},
                {"seed", static_cast<unsigned long long>(seed)},
                {"R", number(r)}};
    std::vector<std::string> cols = {"width", "height", "p",    "trials",
                                     "p_hat", "stderr", "seed", "R"};
    if (p == 0.5) {
        const double cardy = cardy_vertical_probability(r);
        row["P_cardy"] = number(cardy);
        row["z_score"] = number((est.p_hat - cardy) / est.stderr_);
        cols.push_back("P_cardy");
        cols.push_back("z_score");
    }
    out.write_rows({row}, cols);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiple-SLE connectivity weights, crossing probabilities "
                 "and verification suites"};
    app.require_subcommand(1);

    Output out;
    int threads = hardware_threads();

    // weight
    auto* w = app.add_subcommand("weight", "evaluate a connectivity weight");
    double w_kappa = 6.0;
    std::string w_points;
    int w_sigma = 1, w_rotation = 0;
    bool w_rainbow = false;
    double w_qtol = -1.0;
    std::string w_config;
    w->add_option("--kappa", w_kappa, "SLE speed in (0,8)");
    w->add_option("--points", w_points, "comma-separated boundary points");
    w->add_option("--sigma", w_sigma, "connectivity index (1..C_N)");
    w->add_flag("--rainbow", w_rainbow, "evaluate the rainbow weight");
    w->add_option("--rotation", w_rotation, "rainbow rotation (0..2N-1)");
    w->add_option("--quad-tol", w_qtol, "per-level quadrature tolerance");
    w->add_option("--out", out.path, "output file (default stdout)");
    w->add_option("--format", out.format, "json (default) or csv");
    w->add_option("--config", w_config, "JSON config file mirroring flags");

    // verify
    auto* v = app.add_subcommand("verify", "run a verification suite");
    std::string v_what;
    int v_n = 2, v_sigma = 1;
    double v_kappa = 6.0, v_qtol = -1.0, v_ltol = -1.0;
    bool v_triple = false;
    std::string v_points, v_config;
    std::uint64_t v_seed = 12345;
    v->add_option("what", v_what, "duality | pde | identities | logfit")
        ->required();
    v->add_option("--N", v_n, "number of point pairs");
    v->add_option("--kappa", v_kappa, "SLE speed");
    v->add_option("--points", v_points, "base configuration");
    v->add_option("--sigma", v_sigma, "weight index for logfit");
    v->add_flag("--triple", v_triple, "triple-collapse logfit mode");
    v->add_option("--quad-tol", v_qtol, "quadrature tolerance");
    v->add_option("--limit-tol", v_ltol, "pass tolerance");
    v->add_option("--seed", v_seed, "seed for randomized configs");
    v->add_option("--threads", threads, "worker threads");
    v->add_option("--out", out.path, "output file");
    v->add_option("--format", out.format, "json or csv");
    v->add_option("--config", v_config, "JSON config file mirroring flags");

    // cardy-sweep
    auto* cs = app.add_subcommand("cardy-sweep",
                                  "tabulate Cardy's vertical-crossing formula");
    double cs_rmin = 0.5, cs_rmax = 2.0;
    int cs_steps = 7;
    std::string cs_config;
    cs->add_option("--r-min", cs_rmin, "smallest aspect ratio width/height");
    cs->add_option("--r-max", cs_rmax, "largest aspect ratio");
    cs->add_option("--steps", cs_steps, "number of rows (log-spaced)");
    cs->add_option("--out", out.path, "output file");
    cs->add_option("--format", out.format, "json or csv");
    cs->add_option("--config", cs_config, "JSON config file mirroring flags");

    // perc
    auto* pc = app.add_subcommand("perc", "bond-percolation crossing Monte Carlo");
    int pc_w = 128, pc_h = 64;
    double pc_p = 0.5;
    long pc_trials = 100000;
    std::uint64_t pc_seed = 1;
    std::string pc_config;
    pc->add_option("--width", pc_w, "bottom-side bonds");
    pc->add_option("--height", pc_h, "left-side bonds");
    pc->add_option("--p", pc_p, "bond probability");
    pc->add_option("--trials", pc_trials, "number of configurations");
    pc->add_option("--seed", pc_seed, "RNG seed (splitmix64 streams)");
    pc->add_option("--threads", threads, "worker threads");
    pc->add_option("--out", out.path, "output file");
    pc->add_option("--format", out.format, "json or csv");
    pc->add_option("--config", pc_config, "JSON config file mirroring flags");

    try {
        app.parse(argc, argv);
        if (w->parsed() && !w_config.empty())
            apply_config_file(w, w_config);
        if (v->parsed() && !v_config.empty())
            apply_config_file(v, v_config);
        if (cs->parsed() && !cs_config.empty())
            apply_config_file(cs, cs_config);
        if (pc->parsed() && !pc_config.empty())
            apply_config_file(pc, pc_config);
        if (out.format.empty())
            out.format = "json";
        if (out.format != "json" && out.format != "csv")
            throw std::domain_error("--format must be json or csv");

        if (w->parsed())
            return run_weight(w_kappa, w_points, w_sigma, w_rainbow,
                              w_rotation, w_qtol, out);
        if (v->parsed())
            return run_verify(v_what, v_n, v_kappa, v_points, v_sigma,
                              v_triple, v_qtol, v_ltol, threads, v_seed, out);
        if (cs->parsed())
            return run_cardy_sweep(cs_rmin, cs_rmax, cs_steps, out);
        if (pc->parsed())
            return run_perc(pc_w, pc_h, pc_p, pc_trials, pc_seed, threads, out);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what()
                  << " (best value " << fmt(e.best_value()) << ", err_est "
                  << fmt(e.err_est()) << ")\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
