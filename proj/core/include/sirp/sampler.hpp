#pragma once

#include <vector>

#include "sirp/common.hpp"
#include "sirp/instance.hpp"
#include "sirp/rng.hpp"

namespace sirp {

// Historical accumulation trajectories, one row per observed week:
// value(o, t, i) = rate of bin i at stage t in observation o. Stage-1
// entries are zero (the first day of a planning week reveals nothing).
//
// Construction canonicalizes the observation order (lexicographic by
// content) so that seeded sampling is invariant to the order trajectories
// were ingested in.
class TrajectoryBank {
public:
    TrajectoryBank(int num_bins, int horizon,
                   std::vector<std::vector<std::vector<double>>> obs);

    // Chop per-bin daily rate sequences into non-overlapping weeks of
    // `horizon` days; the trailing incomplete week is dropped, the first
    // day of each week is forced to rate zero.
    static TrajectoryBank from_daily_rates(const std::vector<DailyRates>& rates,
                                           int horizon);

    int num_bins() const { return num_bins_; }
    int horizon() const { return horizon_; }
    int num_observations() const { return static_cast<int>(obs_.size()); }
    double value(int o, int stage, int bin) const {
        return obs_[static_cast<std::size_t>(o)][static_cast<std::size_t>(stage - 1)]
                   [static_cast<std::size_t>(bin)];
    }

private:
    int num_bins_ = 0;
    int horizon_ = 0;
    // obs_[o][t-1][i]
    std::vector<std::vector<std::vector<double>>> obs_;
};

// h = sigma * N_o^(-1/(m+4)). `sigma` is the per-bin, per-stage sample
// standard deviation; m is the dimension of the joint process (number of
// bins). h = 0 exactly when sigma = 0.
double bandwidth_from_sigma(double sigma, int num_observations, int dimension);

// Sample standard deviation ((n-1) denominator, 0 for n < 2) of the given
// stage sample, pushed through bandwidth_from_sigma.
double silverman_bandwidth(const std::vector<double>& values, int dimension);

// Initial weights plus the precomputed kernel bandwidths. The weights are
// the starting distribution over bank observations; sample_trajectory
// evolves a private copy per trajectory, the state itself is immutable
// during sampling.
struct SamplerState {
    std::vector<double> weights;              // per observation, sums to 1
    std::vector<std::vector<double>> bandwidths; // [stage-1][bin]

    static SamplerState init(const TrajectoryBank& bank);
};

struct SamplerStats {
    long weight_fallbacks = 0; // all-zero weight vectors reset to uniform
};

// One joint trajectory [stage-1][bin] of the estimated N-dimensional
// process: per stage a historical week is drawn from the current weights,
// perturbed per bin by bandwidth * logistic kernel draw and clamped to
// [0,1]; afterwards the weights are reweighted by the kernel density of
// the realized values, conditioning the next stage. Stage 1 is zero.
std::vector<std::vector<double>> sample_trajectory(const TrajectoryBank& bank,
                                                   const SamplerState& state,
                                                   Rng& rng,
                                                   SamplerStats* stats = nullptr);

// Single weight-update step, exposed for tests: w_o *= prod_i
// k((x_i - a_{i,o}) / h_i) / h_i with zero-bandwidth factors skipped,
// then renormalized; an all-zero result falls back to uniform.
void update_weights(const TrajectoryBank& bank, int stage,
                    const std::vector<double>& sampled,
                    const std::vector<double>& bandwidths,
                    std::vector<double>& weights, SamplerStats* stats = nullptr);

} // namespace sirp
