#include "sirp/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace sirp {

TrajectoryBank::TrajectoryBank(int num_bins, int horizon,
                               std::vector<std::vector<std::vector<double>>> obs)
    : num_bins_(num_bins), horizon_(horizon), obs_(std::move(obs)) {
    if (num_bins_ < 1 || horizon_ < 2) throw DataError("bank needs bins and >= 2 stages");
    if (obs_.empty()) throw DataError("bank has no observations");
    for (auto& week : obs_) {
        if (static_cast<int>(week.size()) != horizon_)
            throw DataError("bank observation with wrong horizon");
        for (auto& stage : week) {
            if (static_cast<int>(stage.size()) != num_bins_)
                throw DataError("bank observation with wrong bin count");
            for (double v : stage)
                if (v < 0.0 || v > 1.0) throw DataError("bank rate outside [0,1]");
        }
        for (double v : week.front())
            if (v != 0.0) throw DataError("bank stage-1 rates must be zero");
    }
    // Canonical order: content-lexicographic. Selection by cumulative
    // weight then no longer depends on ingestion order.
    std::sort(obs_.begin(), obs_.end());
}

TrajectoryBank TrajectoryBank::from_daily_rates(const std::vector<DailyRates>& rates,
                                                int horizon) {
    if (rates.empty()) throw DataError("no rate trajectories given");
    const int bins = static_cast<int>(rates.size());

    // Common day span shared by every bin.
    int first = rates.front().first_day;
    int last = rates.front().first_day + static_cast<int>(rates.front().rates.size()) - 1;
    for (const DailyRates& r : rates) {
        first = std::max(first, r.first_day);
        last = std::min(last, r.first_day + static_cast<int>(r.rates.size()) - 1);
    }
    const int span = last - first + 1;
    const int weeks = span / horizon;
    if (weeks < 1)
        throw DataError("history span too short for a single planning week");

    std::vector<std::vector<std::vector<double>>> obs(
        static_cast<std::size_t>(weeks),
        std::vector<std::vector<double>>(static_cast<std::size_t>(horizon),
                                         std::vector<double>(static_cast<std::size_t>(bins), 0.0)));
    for (int w = 0; w < weeks; ++w) {
        for (int t = 0; t < horizon; ++t) {
            if (t == 0) continue; // forced zero
            const int day = first + w * horizon + t;
            for (int i = 0; i < bins; ++i) {
                const DailyRates& r = rates[static_cast<std::size_t>(i)];
                obs[w][t][i] = r.rates[static_cast<std::size_t>(day - r.first_day)];
            }
        }
    }
    return TrajectoryBank(bins, horizon, std::move(obs));
}

double bandwidth_from_sigma(double sigma, int num_observations, int dimension) {
    if (sigma < 0.0) throw DataError("negative standard deviation");
    if (sigma == 0.0) return 0.0;
    return sigma * std::pow(static_cast<double>(num_observations),
                            -1.0 / (dimension + 4.0));
}

double silverman_bandwidth(const std::vector<double>& values, int dimension) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(n - 1));
    return bandwidth_from_sigma(sigma, static_cast<int>(n), dimension);
}

SamplerState SamplerState::init(const TrajectoryBank& bank) {
    SamplerState s;
    const int n = bank.num_observations();
    s.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
    s.bandwidths.assign(static_cast<std::size_t>(bank.horizon()), {});
    for (int t = 1; t <= bank.horizon(); ++t) {
        std::vector<double>& h = s.bandwidths[static_cast<std::size_t>(t - 1)];
        h.resize(static_cast<std::size_t>(bank.num_bins()));
        std::vector<double> sample(static_cast<std::size_t>(n));
        for (int i = 0; i < bank.num_bins(); ++i) {
            for (int o = 0; o < n; ++o)
                sample[static_cast<std::size_t>(o)] = bank.value(o, t, i);
            h[static_cast<std::size_t>(i)] = silverman_bandwidth(sample, bank.num_bins());
        }
    }
    return s;
}

namespace {

// Logistic kernel k(u) = e^-u / (1 + e^-u)^2.
double logistic_kernel(double u) {
    const double e = std::exp(-std::fabs(u)); // symmetric, avoid overflow
    return e / ((1.0 + e) * (1.0 + e));
}

int select_observation(const std::vector<double>& weights, double alpha) {
    double cum = 0.0;
    for (std::size_t o = 0; o < weights.size(); ++o) {
        cum += weights[o];
        if (alpha <= cum) return static_cast<int>(o);
    }
    return static_cast<int>(weights.size()) - 1; // rounding slack
}

} // namespace

void update_weights(const TrajectoryBank& bank, int stage,
                    const std::vector<double>& sampled,
                    const std::vector<double>& bandwidths,
                    std::vector<double>& weights, SamplerStats* stats) {
    double total = 0.0;
    for (int o = 0; o < bank.num_observations(); ++o) {
        double w = weights[static_cast<std::size_t>(o)];
        for (int i = 0; i < bank.num_bins(); ++i) {
            const double h = bandwidths[static_cast<std::size_t>(i)];
            if (h == 0.0) continue; // degenerate dimension carries no information
            const double u = (sampled[static_cast<std::size_t>(i)] - bank.value(o, stage, i)) / h;
            w *= logistic_kernel(u) / h;
        }
        weights[static_cast<std::size_t>(o)] = w;
        total += w;
    }
    if (total <= 0.0 || !std::isfinite(total)) {
        // All mass underflowed: reset to uniform rather than divide by 0.
        const double u = 1.0 / bank.num_observations();
        for (double& w : weights) w = u;
        if (stats) ++stats->weight_fallbacks;
        return;
    }
    for (double& w : weights) w /= total;
}

std::vector<std::vector<double>> sample_trajectory(const TrajectoryBank& bank,
                                                   const SamplerState& state,
                                                   Rng& rng, SamplerStats* stats) {
    const int T = bank.horizon();
    const int N = bank.num_bins();
    std::vector<std::vector<double>> traj(
        static_cast<std::size_t>(T), std::vector<double>(static_cast<std::size_t>(N), 0.0));
    std::vector<double> weights = state.weights;

    for (int t = 2; t <= T; ++t) {
        const std::vector<double>& h = state.bandwidths[static_cast<std::size_t>(t - 1)];
        const int o = select_observation(weights, rng.uniform01());
        std::vector<double>& row = traj[static_cast<std::size_t>(t - 1)];
        for (int i = 0; i < N; ++i) {
            double v = bank.value(o, t, i) +
                       h[static_cast<std::size_t>(i)] * rng.logistic();
            row[static_cast<std::size_t>(i)] = std::clamp(v, 0.0, 1.0);
        }
        if (t < T) update_weights(bank, t, row, h, weights, stats);
    }
    return traj;
}

} // namespace sirp
