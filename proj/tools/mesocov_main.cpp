// mesocov: closed-form predictions vs Monte Carlo for mesoscopic eigenvalue
// density-density correlations of Wigner matrices.
//
// Subcommands:
//   predict   evaluate a closed-form prediction, JSON out
//   simulate  run a Monte Carlo experiment, JSONL (one record per batch)
//   compare   join a simulate output with a predict output, PASS/FAIL
//   kernel    tabulate the sine kernel, CSV
//   formal    exponent calculus for formal monomials, JSON per line
//   selftest  deterministic invariant suite
//
// Exit codes: 0 ok, 1 comparison/selftest FAIL, 2 config error, 3 numerical
// failure.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mesocov/analysis.hpp"
#include "mesocov/ensemble.hpp"
#include "mesocov/formal.hpp"
#include "mesocov/mc.hpp"
#include "mesocov/selftest.hpp"
#include "mesocov/spectral.hpp"
#include "mesocov/theory.hpp"

#ifndef MESOCOV_BUILD_ID
#define MESOCOV_BUILD_ID "unknown"
#endif

using nlohmann::json;
using namespace mesocov;

namespace {

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

json run_record(const std::string& sub, json config, json results) {
    return json{
        {"schema_version", 1},
        {"timestamp", timestamp_utc()},
        {"subcommand", sub},
        {"config", std::move(config)},
        {"results", std::move(results)},
        {"build_id", MESOCOV_BUILD_ID},
    };
}

json cx(cdouble z) { return {{"re", z.real()}, {"im", z.imag()}}; }

struct EnsembleFlags {
    int beta = 1;
    int N = 400;
    bool goe = false, gue = false;
    std::string offdiag = "gaussian", diag = "gaussian";
    double two_point_p = 0.5, two_point_a = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--beta", beta, "symmetry class (1 or 2)");
        app->add_option("--N", N, "matrix dimension");
        app->add_flag("--goe", goe, "real symmetric Gaussian ensemble");
        app->add_flag("--gue", gue, "complex Hermitian Gaussian ensemble");
        app->add_option("--offdiag", offdiag,
                        "off-diagonal family: gaussian|rademacher|two_point|uniform|phase_four");
        app->add_option("--diag", diag, "diagonal family (real)");
        app->add_option("--two-point-p", two_point_p, "two_point: P(value a)");
        app->add_option("--two-point-a", two_point_a, "two_point: a / sigma");
    }

    EnsembleSpec build() const {
        if (goe) return EnsembleSpec::goe(N);
        if (gue) return EnsembleSpec::gue(N);
        EnsembleSpec s;
        s.beta = beta;
        s.N = N;
        s.offdiag.family = family_from_name(offdiag);
        s.offdiag.p = two_point_p;
        s.offdiag.a_over_sigma = two_point_a;
        s.diag.family = family_from_name(diag);
        s.diag.p = two_point_p;
        s.diag.a_over_sigma = two_point_a;
        s.validate();
        return s;
    }
};

struct WindowFlags {
    double E = 0.0, omega = 0.1, eta = 0.01, M = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--E", E, "reference energy");
        app->add_option("--omega", omega, "energy separation E2 - E1");
        app->add_option("--eta", eta, "spectral resolution");
        app->add_option("--M", M, "test-function support radius");
    }
    SpectralWindow build() const { return SpectralWindow{E, omega, eta, M}; }
};

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return j;
}

// ------------------------------------------------------------------ predict

int cmd_predict(const EnsembleFlags& ef, const WindowFlags& wf,
                const std::string& what, const std::string& config_path,
                double u, double v, int gi, int gj) {
    EnsembleSpec spec;
    SpectralWindow w;
    if (!config_path.empty()) {
        json cfg = load_json_file(config_path);
        spec = cfg.at("spec").get<EnsembleSpec>();
        w = cfg.at("window").get<SpectralWindow>();
    } else {
        spec = ef.build();
        w = wf.build();
    }
    w.validate(spec.N);
    CumulantSums sums = cumulant_sums(spec);

    json results;
    if (what == "conjugate") {
        TermBreakdown t = cov_green_conjugate(w, sums, spec.beta, spec.N);
        if (!spec.canonical_zeta())
            t.add("zeta_block", cov_green_zeta_correction(w, spec.zeta, spec.beta, spec.N));
        results = t;
    } else if (what == "nonconjugate") {
        results = cov_green_nonconjugate(w, sums, spec.beta, spec.N);
    } else if (what == "upsilon") {
        UpsilonValue y = upsilon(w, u, v, sums, spec.beta, spec.N,
                                 spec.canonical_zeta() ? nullptr : &spec.zeta);
        results = json{{"value", y.value},
                       {"terms", y.terms},
                       {"error_bound", y.error_bound}};
    } else if (what == "mean") {
        results = json{{"value", cx(expected_stieltjes(spec, w.zc()))},
                       {"semicircle", cx(msc_stieltjes(w.zc()))}};
    } else if (what == "mean-sq") {
        results = json{{"value", cx(expected_stieltjes_sq(w.zc()))}};
    } else if (what == "linstat") {
        Bump f(w.M), g(w.M);
        results = json{
            {"value", predicted_linstat_cov(w, f, g, sums, spec.beta, spec.N)}};
    } else if (what == "gustavsson") {
        results = json{{"value", gustavsson_prediction(spec.N, gi, gj)}};
    } else {
        throw std::invalid_argument("predict: unknown --what '" + what + "'");
    }
    json cfg{{"spec", spec}, {"window", w}, {"what", what}};
    if (what == "upsilon") cfg["u"] = u, cfg["v"] = v;
    if (what == "gustavsson") cfg["i"] = gi, cfg["j"] = gj;
    std::cout << run_record("predict", cfg, results).dump(2) << "\n";
    return 0;
}

// ------------------------------------------------------------------ simulate

int cmd_simulate(const EnsembleFlags& ef, const WindowFlags& wf,
                 const std::string& config_path,
                 const std::vector<std::string>& observables,
                 int64_t samples, int batches, uint64_t seed, int threads,
                 int gi, int gj, const std::string& out_path) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = load_json_file(config_path).get<ExperimentConfig>();
    } else {
        cfg.spec = ef.build();
        cfg.window = wf.build();
        cfg.n_samples = samples;
        cfg.batch_count = batches;
        cfg.master_seed = seed;
        cfg.bump_M = cfg.window.M;
        for (const std::string& o : observables)
            cfg.observables.push_back(observable_from_name(o));
        cfg.gust_i = gi;
        cfg.gust_j = gj;
    }
    if (threads > 0) cfg.threads = threads;
    if (const char* env = std::getenv("MESOCOV_SEED"))
        cfg.master_seed = std::stoull(env);
    cfg.validate();

    std::ofstream out_file;
    std::ostream* out = &std::cout;
    if (!out_path.empty()) {
        out_file.open(out_path, std::ios::app);
        if (!out_file) throw std::invalid_argument("cannot open " + out_path);
        out = &out_file;
    }

    json cfg_json = cfg;
    auto emit = [&](json results) {
        *out << run_record("simulate", cfg_json, std::move(results)).dump()
             << "\n";
        out->flush();
    };

    auto estimates_json = [](const std::map<Observable, McEstimate>& est) {
        json e = json::object();
        for (const auto& [o, v] : est) e[observable_name(o)] = v;
        return e;
    };

    auto final_est = run_experiment(
        cfg, [&](int batch, const std::map<Observable, McEstimate>& partial) {
            emit(json{{"final", false},
                      {"batch", batch},
                      {"estimates", estimates_json(partial)}});
        });
    emit(json{{"final", true}, {"estimates", estimates_json(final_est)}});
    return 0;
}

// ------------------------------------------------------------------ compare

McEstimate estimate_from_json(const json& j) {
    McEstimate e;
    e.mean = {j.at("mean").at("re").get<double>(),
              j.at("mean").at("im").get<double>()};
    e.stderr_ = j.at("stderr").get<double>();
    e.n_samples = j.at("n_samples").get<int64_t>();
    e.batch_count = j.at("batch_count").get<int>();
    return e;
}

TermBreakdown breakdown_from_json(const json& j) {
    TermBreakdown t;
    for (auto it = j.at("terms").begin(); it != j.at("terms").end(); ++it)
        t.add(it.key(), {it.value().at("re").get<double>(),
                         it.value().at("im").get<double>()});
    t.error_bound = j.at("error_bound").get<double>();
    return t;
}

int cmd_compare(const std::string& est_path, const std::string& pred_path,
                std::string observable, double rel) {
    // estimate: last JSONL record with "final": true
    std::ifstream in(est_path);
    if (!in) throw std::invalid_argument("cannot open " + est_path);
    json final_rec;
    for (std::string line; std::getline(in, line);) {
        if (line.empty()) continue;
        json rec = json::parse(line);
        if (rec.at("results").value("final", false)) final_rec = rec;
    }
    if (final_rec.is_null())
        throw std::invalid_argument("no final record in " + est_path);
    const json& est_map = final_rec.at("results").at("estimates");
    if (observable.empty()) {
        if (est_map.size() != 1)
            throw std::invalid_argument(
                "multiple observables in estimate; pass --observable");
        observable = est_map.begin().key();
    }
    McEstimate est = estimate_from_json(est_map.at(observable));

    json pred_rec = load_json_file(pred_path);
    const json& pr = pred_rec.at("results");
    TermBreakdown pred;
    if (pr.contains("terms") && pr.contains("error_bound") && pr.at("terms").is_object() &&
        !pr.contains("value")) {
        pred = breakdown_from_json(pr);
    } else if (pr.contains("terms")) { // upsilon payload
        pred = breakdown_from_json(json{{"terms", pr.at("terms").at("terms")},
                                        {"error_bound", pr.at("error_bound")}});
    } else {
        // scalar prediction (linstat / mean / gustavsson)
        const json& v = pr.at("value");
        cdouble p = v.is_object()
                        ? cdouble{v.at("re").get<double>(), v.at("im").get<double>()}
                        : cdouble{v.get<double>(), 0.0};
        pred.add("value", p);
    }

    CompareReport rep = compare(est, pred, rel);
    json cfg{{"estimate_file", est_path},
             {"prediction_file", pred_path},
             {"observable", observable},
             {"rel_threshold", rel}};
    std::cout << run_record("compare", cfg, rep).dump(2) << "\n";
    std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
}

// ------------------------------------------------------------------ kernel

int cmd_kernel(double u, double umin, double umax, double step, bool range) {
    std::cout << "u,s,Y1,Y2,Y1_avg_asym\n";
    auto row = [](double x) {
        SineKernel k = sine_kernel(x);
        std::cout << x << "," << k.s << "," << k.Y1 << "," << k.Y2 << ","
                  << k.Y1_avg_asym << "\n";
    };
    if (range) {
        if (!(step > 0) || umax < umin)
            throw std::invalid_argument("kernel: need umin <= umax, step > 0");
        for (double x = umin; x <= umax + step / 2; x += step) row(x);
    } else {
        row(u);
    }
    return 0;
}

// ------------------------------------------------------------------ formal

int cmd_formal(const std::string& path, double alpha, double beta_exp) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (!path.empty()) {
        file.open(path);
        if (!file) throw std::invalid_argument("cannot open " + path);
        in = &file;
    }
    int lineno = 0;
    for (std::string line; std::getline(*in, line);) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        try {
            FormalMonomial P = parse_monomial(line);
            ExponentReport r = exponents(P, alpha, beta_exp);
            json out = r;
            out["monomial"] = print_monomial(P);
            out["line"] = lineno;
            std::cout << out.dump() << "\n";
        } catch (const ParseError& e) {
            std::cerr << "line " << lineno << ": " << e.what() << "\n";
            return 2;
        }
    }
    return 0;
}

// ------------------------------------------------------------------ selftest

int cmd_selftest() {
    int failures = 0;
    auto results = run_selftests([&](const SelfTestResult& r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        if (!r.pass) ++failures;
    });
    std::cout << (failures == 0 ? "selftest: all " : "selftest: FAILED ")
              << (failures == 0 ? std::to_string(results.size()) + " checks passed"
                                : std::to_string(failures) + " of " +
                                      std::to_string(results.size()) + " checks")
              << "\n";
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"closed-form vs Monte Carlo mesoscopic eigenvalue correlations"};
    app.require_subcommand(1);

    // predict
    auto* predict = app.add_subcommand("predict", "evaluate a closed-form prediction");
    EnsembleFlags pe;
    WindowFlags pw;
    pe.attach(predict);
    pw.attach(predict);
    std::string p_what = "conjugate", p_config;
    double p_u = 0, p_v = 0;
    int p_i = 1, p_j = 2;
    predict->add_option("--what", p_what,
                        "conjugate|nonconjugate|upsilon|mean|mean-sq|linstat|gustavsson");
    predict->add_option("--config", p_config, "JSON config {spec, window} (supersedes flags)");
    predict->add_option("--u", p_u, "upsilon: first rescaled coordinate");
    predict->add_option("--v", p_v, "upsilon: second rescaled coordinate");
    predict->add_option("--i", p_i, "gustavsson: first eigenvalue index");
    predict->add_option("--j", p_j, "gustavsson: second eigenvalue index");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
    EnsembleFlags se;
    WindowFlags sw;
    se.attach(simulate);
    sw.attach(simulate);
    std::string s_config, s_out;
    std::vector<std::string> s_obs;
    int64_t s_samples = 20000;
    int s_batches = 20, s_threads = 0, s_i = 450, s_j = 550;
    uint64_t s_seed = 1;
    simulate->add_option("--config", s_config, "ExperimentConfig JSON (supersedes flags)");
    simulate->add_option("--observable", s_obs,
                         "observable name (repeatable): green_cov_conjugate|"
                         "green_cov_nonconjugate|mean_stieltjes|mean_stieltjes_sq|"
                         "linstat_cov|gustavsson");
    simulate->add_option("--samples", s_samples, "number of matrix samples");
    simulate->add_option("--batches", s_batches, "batch count for stderr");
    simulate->add_option("--seed", s_seed, "master seed (MESOCOV_SEED overrides)");
    simulate->add_option("--threads", s_threads, "worker count (0 = all cores)");
    simulate->add_option("--i", s_i, "gustavsson: first eigenvalue index");
    simulate->add_option("--j", s_j, "gustavsson: second eigenvalue index");
    simulate->add_option("--out", s_out, "append JSONL here instead of stdout");

    // compare
    auto* comp = app.add_subcommand("compare", "join simulate and predict outputs");
    std::string c_est, c_pred, c_obs;
    double c_rel = 0.0;
    comp->add_option("--estimate", c_est, "simulate JSONL output")->required();
    comp->add_option("--prediction", c_pred, "predict JSON output")->required();
    comp->add_option("--observable", c_obs, "observable to compare");
    comp->add_option("--rel", c_rel, "relative-deviation pass threshold");

    // kernel
    auto* kernel = app.add_subcommand("kernel", "tabulate the sine kernel (CSV)");
    double k_u = 0, k_umin = 0, k_umax = 10, k_step = 0.1;
    auto* k_u_opt = kernel->add_option("--u", k_u, "single evaluation point");
    kernel->add_option("--umin", k_umin, "range start");
    kernel->add_option("--umax", k_umax, "range end");
    kernel->add_option("--step", k_step, "range step");

    // formal
    auto* formal = app.add_subcommand("formal", "exponent calculus, one monomial per line");
    std::string f_path;
    double f_alpha = 0.5, f_beta = 0.5;
    formal->add_option("file", f_path, "input file (default stdin)");
    formal->add_option("--alpha", f_alpha, "alpha = -log_N eta");
    formal->add_option("--beta-exp", f_beta, "beta = -log_N omega");

    // selftest
    app.add_subcommand("selftest", "deterministic invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (predict->parsed())
            return cmd_predict(pe, pw, p_what, p_config, p_u, p_v, p_i, p_j);
        if (simulate->parsed())
            return cmd_simulate(se, sw, s_config, s_obs, s_samples, s_batches,
                                s_seed, s_threads, s_i, s_j, s_out);
        if (comp->parsed()) return cmd_compare(c_est, c_pred, c_obs, c_rel);
        if (kernel->parsed())
            return cmd_kernel(k_u, k_umin, k_umax, k_step,
                              k_u_opt->count() == 0);
        if (formal->parsed()) return cmd_formal(f_path, f_alpha, f_beta);
        return cmd_selftest();
    } catch (const QuadratureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const CoincidentParameter& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
