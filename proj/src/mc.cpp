#include "mesocov/mc.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace mesocov {

std::string observable_name(Observable o) {
    switch (o) {
        case Observable::green_cov_conjugate: return "green_cov_conjugate";
        case Observable::green_cov_nonconjugate: return "green_cov_nonconjugate";
        case Observable::mean_stieltjes: return "mean_stieltjes";
        case Observable::mean_stieltjes_sq: return "mean_stieltjes_sq";
        case Observable::linstat_cov: return "linstat_cov";
        case Observable::gustavsson: return "gustavsson";
    }
    return "?";
}

Observable observable_from_name(const std::string& s) {
    if (s == "green_cov_conjugate") return Observable::green_cov_conjugate;
    if (s == "green_cov_nonconjugate") return Observable::green_cov_nonconjugate;
    if (s == "mean_stieltjes") return Observable::mean_stieltjes;
    if (s == "mean_stieltjes_sq") return Observable::mean_stieltjes_sq;
    if (s == "linstat_cov") return Observable::linstat_cov;
    if (s == "gustavsson") return Observable::gustavsson;
    throw std::invalid_argument("unknown observable: " + s);
}

void to_json(nlohmann::json& j, const McEstimate& e) {
    j = nlohmann::json{
        {"mean", {{"re", e.mean.real()}, {"im", e.mean.imag()}}},
        {"stderr", e.stderr_},
        {"n_samples", e.n_samples},
        {"batch_count", e.batch_count},
        {"seed", e.seed},
    };
    if (e.var_x > 0 || e.var_y > 0) {
        j["var_x"] = e.var_x;
        j["var_y"] = e.var_y;
    }
}

void ExperimentConfig::validate() const {
    spec.validate();
    window.validate(spec.N);
    if (batch_count < 20)
        throw std::invalid_argument("ExperimentConfig: batch_count must be >= 20");
    if (n_samples < 40ll * batch_count)
        throw std::invalid_argument("ExperimentConfig: n_samples must be >= 40 * batch_count");
    if (observables.empty())
        throw std::invalid_argument("ExperimentConfig: no observables requested");
    for (Observable o : observables) {
        if (o == Observable::gustavsson) {
            if (gust_i < 1 || gust_j < 1 || gust_i > spec.N || gust_j > spec.N)
                throw std::invalid_argument("ExperimentConfig: gustavsson indices out of range");
        }
    }
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    std::vector<std::string> obs;
    for (Observable o : c.observables) obs.push_back(observable_name(o));
    j = nlohmann::json{
        {"spec", c.spec},
        {"window", c.window},
        {"n_samples", c.n_samples},
        {"batch_count", c.batch_count},
        {"master_seed", c.master_seed},
        {"observables", obs},
        {"threads", c.threads},
        {"bump_M", c.bump_M},
    };
    if (c.gust_i || c.gust_j) {
        j["gust_i"] = c.gust_i;
        j["gust_j"] = c.gust_j;
    }
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    c.spec = j.at("spec").get<EnsembleSpec>();
    c.window = j.at("window").get<SpectralWindow>();
    c.n_samples = j.at("n_samples").get<int64_t>();
    if (j.contains("batch_count")) c.batch_count = j.at("batch_count").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<uint64_t>();
    c.observables.clear();
    for (const auto& s : j.at("observables"))
        c.observables.push_back(observable_from_name(s.get<std::string>()));
    if (j.contains("gust_i")) c.gust_i = j.at("gust_i").get<int>();
    if (j.contains("gust_j")) c.gust_j = j.at("gust_j").get<int>();
    if (j.contains("threads")) c.threads = j.at("threads").get<int>();
    if (j.contains("bump_M")) c.bump_M = j.at("bump_M").get<double>();
    c.validate();
}

void PairAccumulator::add(cdouble x, cdouble y) {
    sum_x += x;
    sum_y += y;
    sum_xy += x * y;
    sum_absx2 += std::norm(x);
    sum_absy2 += std::norm(y);
    ++n;
}

void PairAccumulator::merge(const PairAccumulator& o) {
    sum_x += o.sum_x;
    sum_y += o.sum_y;
    sum_xy += o.sum_xy;
    sum_absx2 += o.sum_absx2;
    sum_absy2 += o.sum_absy2;
    n += o.n;
}

cdouble PairAccumulator::covariance() const {
    if (n == 0) return 0.0;
    double inv = 1.0 / double(n);
    return sum_xy * inv - (sum_x * inv) * (sum_y * inv);
}

namespace {
// per-sample observable values; fixed layout so reduction is index-ordered
struct SampleValues {
    cdouble x[8];
    cdouble y[8];
    bool failed = false;
};

struct ObsPlan {
    std::vector<Observable> obs;
    int slot(Observable o) const {
        for (size_t i = 0; i < obs.size(); ++i)
            if (obs[i] == o) return static_cast<int>(i);
        return -1;
    }
};
} // namespace

std::map<Observable, McEstimate> run_experiment(const ExperimentConfig& cfg,
                                                const BatchCallback& on_batch) {
    cfg.validate();
    const int64_t n = cfg.n_samples;
    const int nb = cfg.batch_count;
    const int64_t batch_size = n / nb;

    ObsPlan plan{cfg.observables};
    const int nobs = static_cast<int>(plan.obs.size());
    if (nobs > 8) throw std::invalid_argument("too many observables");

    const cdouble z1 = cfg.window.z1();
    const cdouble z2 = cfg.window.z2();
    const cdouble zc = cfg.window.zc();
    std::optional<Bump> bump;
    for (Observable o : plan.obs)
        if (o == Observable::linstat_cov) bump.emplace(cfg.bump_M);

    std::vector<SampleValues> values(static_cast<size_t>(n));
    std::atomic<int64_t> next{0};
    std::atomic<int64_t> failures{0};

    auto worker = [&]() {
        for (;;) {
            int64_t k = next.fetch_add(1);
            if (k >= n) break;
            SampleValues& sv = values[static_cast<size_t>(k)];
            RngStream stream(cfg.master_seed, static_cast<uint64_t>(k));
            try {
                HermitianMatrix H = sample_wigner(cfg.spec, stream);
                EigenSample eig = eigen_decompose(H, k);
                for (int s = 0; s < nobs; ++s) {
                    switch (plan.obs[static_cast<size_t>(s)]) {
                        case Observable::green_cov_conjugate:
                            sv.x[s] = empirical_stieltjes_power(eig, z1, 1);
                            sv.y[s] = std::conj(empirical_stieltjes_power(eig, z2, 1));
                            break;
                        case Observable::green_cov_nonconjugate:
                            sv.x[s] = empirical_stieltjes_power(eig, z1, 1);
                            sv.y[s] = empirical_stieltjes_power(eig, z2, 1);
                            break;
                        case Observable::mean_stieltjes:
                            sv.x[s] = empirical_stieltjes_power(eig, zc, 1);
                            sv.y[s] = 0.0;
                            break;
                        case Observable::mean_stieltjes_sq:
                            sv.x[s] = empirical_stieltjes_power(eig, zc, 2);
                            sv.y[s] = 0.0;
                            break;
                        case Observable::linstat_cov:
                            sv.x[s] = linear_statistic(eig, cfg.window, *bump, +1);
                            sv.y[s] = linear_statistic(eig, cfg.window, *bump, -1);
                            break;
                        case Observable::gustavsson:
                            sv.x[s] = eig.eigenvalues[static_cast<size_t>(cfg.gust_i - 1)];
                            sv.y[s] = eig.eigenvalues[static_cast<size_t>(cfg.gust_j - 1)];
                            break;
                    }
                }
            } catch (const SolverError&) {
                sv.failed = true;
                failures.fetch_add(1);
            }
        }
    };

    int nthreads = cfg.threads > 0
                       ? cfg.threads
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    {
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    if (failures.load() * 1000 > n)
        throw std::runtime_error("run_experiment: solver failures exceed 0.1% (" +
                                 std::to_string(failures.load()) + "/" +
                                 std::to_string(n) + ")");

    // deterministic index-ordered reduction: grand accumulator per observable
    // plus per-batch accumulators for the batch-means stderr
    std::vector<PairAccumulator> grand(static_cast<size_t>(nobs));
    std::vector<std::vector<PairAccumulator>> batches(
        static_cast<size_t>(nobs), std::vector<PairAccumulator>(static_cast<size_t>(nb)));

    auto finalize = [&](int upto_batch) {
        std::map<Observable, McEstimate> out;
        for (int s = 0; s < nobs; ++s) {
            Observable o = plan.obs[static_cast<size_t>(s)];
            const PairAccumulator& g = grand[static_cast<size_t>(s)];
            McEstimate e;
            e.n_samples = g.n;
            e.batch_count = upto_batch;
            e.seed = cfg.master_seed;

            auto estimand = [&](const PairAccumulator& a) -> cdouble {
                switch (o) {
                    case Observable::mean_stieltjes:
                    case Observable::mean_stieltjes_sq:
                        return a.mean_x();
                    case Observable::linstat_cov:
                        return a.covariance() /
                               (double(cfg.spec.N) * cfg.spec.N);
                    case Observable::gustavsson: {
                        double cov = a.covariance().real();
                        double vx = a.sum_absx2 / double(a.n) - std::norm(a.mean_x());
                        double vy = a.sum_absy2 / double(a.n) - std::norm(a.mean_y());
                        return cov / std::sqrt(vx * vy);
                    }
                    default:
                        return a.covariance();
                }
            };
            e.mean = estimand(g);
            e.mean_x = g.mean_x();
            e.mean_y = g.mean_y();
            e.var_x = g.sum_absx2 / double(g.n) - std::norm(g.mean_x());
            e.var_y = g.sum_absy2 / double(g.n) - std::norm(g.mean_y());

            // batch means: spread of per-batch estimates around their mean
            cdouble bmean = 0;
            int used = 0;
            std::vector<cdouble> be;
            for (int b = 0; b < upto_batch; ++b) {
                const PairAccumulator& a = batches[static_cast<size_t>(s)][static_cast<size_t>(b)];
                if (a.n == 0) continue;
                be.push_back(estimand(a));
                bmean += be.back();
                ++used;
            }
            if (used >= 2) {
                bmean /= double(used);
                double ss = 0;
                for (cdouble v : be) ss += std::norm(v - bmean);
                e.stderr_ = std::sqrt(ss / (used - 1) / used);
            }
            out[o] = e;
        }
        return out;
    };

    for (int b = 0; b < nb; ++b) {
        int64_t lo = b * batch_size;
        int64_t hi = (b == nb - 1) ? n : lo + batch_size;
        for (int64_t k = lo; k < hi; ++k) {
            const SampleValues& sv = values[static_cast<size_t>(k)];
            if (sv.failed) continue;
            for (int s = 0; s < nobs; ++s) {
                batches[static_cast<size_t>(s)][static_cast<size_t>(b)].add(sv.x[s], sv.y[s]);
                grand[static_cast<size_t>(s)].add(sv.x[s], sv.y[s]);
            }
        }
        if (on_batch) on_batch(b + 1, finalize(b + 1));
    }

    return finalize(nb);
}

double gustavsson_prediction(int N, int i, int j) {
    return 1.0 - std::log(double(j - i)) / std::log(double(N));
}

McEstimate gustavsson_experiment(const ExperimentConfig& cfg, int i, int j) {
    ExperimentConfig c = cfg;
    c.observables = {Observable::gustavsson};
    c.gust_i = i;
    c.gust_j = j;
    return run_experiment(c).at(Observable::gustavsson);
}

CompareReport compare(const McEstimate& est, const TermBreakdown& prediction,
                      double rel_threshold) {
    CompareReport r;
    r.estimate = est.mean;
    r.prediction = prediction.total();
    r.stderr_ = est.stderr_;
    r.error_bound = prediction.error_bound;
    r.terms = prediction;
    double denom = std::sqrt(est.stderr_ * est.stderr_ +
                             prediction.error_bound * prediction.error_bound);
    double dev = std::abs(est.mean - prediction.total());
    r.z = denom > 0 ? dev / denom : (dev > 0 ? INFINITY : 0.0);
    double scale = std::abs(prediction.total());
    r.rel_dev = scale > 0 ? dev / scale : (dev > 0 ? INFINITY : 0.0);
    r.pass = r.z <= 3.0 || (rel_threshold > 0 && r.rel_dev <= rel_threshold);
    return r;
}

void to_json(nlohmann::json& j, const CompareReport& r) {
    j = nlohmann::json{
        {"z", r.z},
        {"rel_dev", r.rel_dev},
        {"pass", r.pass},
        {"estimate", {{"re", r.estimate.real()}, {"im", r.estimate.imag()}}},
        {"prediction", {{"re", r.prediction.real()}, {"im", r.prediction.imag()}}},
        {"stderr", r.stderr_},
        {"error_bound", r.error_bound},
        {"terms", r.terms},
    };
}

} // namespace mesocov
