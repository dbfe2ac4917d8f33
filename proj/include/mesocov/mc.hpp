#pragma once
// Monte Carlo experiments: sample ensembles, eigendecompose once per sample,
// evaluate all requested spectral observables from the same spectrum, and
// estimate means/covariances with batch-means standard errors.
//
// Determinism: sample k is a pure function of (master_seed, k); per-sample
// results are stored by index and reduced in index order, so the final report
// is bit-identical for any worker count.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mesocov/analysis.hpp"
#include "mesocov/ensemble.hpp"
#include "mesocov/spectral.hpp"
#include "mesocov/theory.hpp"

namespace mesocov {

enum class Observable {
    green_cov_conjugate,
    green_cov_nonconjugate,
    mean_stieltjes,
    mean_stieltjes_sq,
    linstat_cov,
    gustavsson,
};

std::string observable_name(Observable o);
Observable observable_from_name(const std::string& s);

struct McEstimate {
    cdouble mean;      // the estimand (a covariance estimate for product observables)
    double stderr_ = 0;
    int64_t n_samples = 0;
    int batch_count = 0;
    uint64_t seed = 0;
    // auxiliary first moments, populated for covariance observables
    cdouble mean_x{}, mean_y{};
    double var_x = 0, var_y = 0;
};

void to_json(nlohmann::json& j, const McEstimate& e);

struct ExperimentConfig {
    EnsembleSpec spec;
    SpectralWindow window;
    int64_t n_samples = 0;
    int batch_count = 20;
    uint64_t master_seed = 1;
    std::vector<Observable> observables;
    int gust_i = 0, gust_j = 0; // 1-based eigenvalue indices for gustavsson
    int threads = 0;            // 0 = hardware concurrency
    double bump_M = 1.0;        // test-function support for linstat_cov

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

// mergeable sufficient statistics for one (X, Y) product estimand;
// mean observables use Y = 0 and ignore the product fields
struct PairAccumulator {
    cdouble sum_x{}, sum_y{}, sum_xy{};
    double sum_absx2 = 0, sum_absy2 = 0; // for variance reporting / correlations
    int64_t n = 0;

    void add(cdouble x, cdouble y);
    void merge(const PairAccumulator& o);
    // E[XY] - E[X]E[Y]
    cdouble covariance() const;
    cdouble mean_x() const { return n ? sum_x / double(n) : 0.0; }
    cdouble mean_y() const { return n ? sum_y / double(n) : 0.0; }
};

using BatchCallback = std::function<void(
    int batch_index, const std::map<Observable, McEstimate>& partial)>;

std::map<Observable, McEstimate> run_experiment(const ExperimentConfig& cfg,
                                                const BatchCallback& on_batch = {});

McEstimate gustavsson_experiment(const ExperimentConfig& cfg, int i, int j);
double gustavsson_prediction(int N, int i, int j); // 1 - log_N(j - i)

struct CompareReport {
    double z = 0;
    double rel_dev = 0;
    bool pass = false;
    cdouble estimate, prediction;
    double stderr_ = 0, error_bound = 0;
    TermBreakdown terms;
};

CompareReport compare(const McEstimate& est, const TermBreakdown& prediction,
                      double rel_threshold = 0.0);

void to_json(nlohmann::json& j, const CompareReport& r);

} // namespace mesocov
