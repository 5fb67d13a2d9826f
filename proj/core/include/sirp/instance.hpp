#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sirp/common.hpp"

namespace sirp {

// Global problem parameters. Monetary values are in currency units,
// distances in km, volumes in m^3 and all waste quantities in kg.
struct Parameters {
    double travel_cost_per_km = 1.0;   // C
    double selling_price_per_kg = 0.30; // R
    double vehicle_capacity_kg = 2000.0; // Q
    double waste_density_kg_m3 = 30.0;  // B
    double big_m = 1.0e5;
    int horizon = 6;                    // T, number of stages

    bool operator==(const Parameters&) const = default;
};

struct Bin {
    int id = 0;
    double capacity_m3 = 2.5;   // E_i
    double initial_fill = 0.0;  // S_i, fraction of capacity
    double capacity_kg = 75.0;  // E_i * B, derived once at load

    bool operator==(const Bin&) const = default;
};

// Square travel-distance matrix over depot (index 0) and bins (1..N).
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    DistanceMatrix(int vertices, std::vector<double> row_major);

    int vertices() const { return vertices_; }
    double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * vertices_ + j]; }
    const std::vector<double>& raw() const { return d_; }

    bool is_symmetric(double tol = 1e-9) const;
    // Mean over unordered pairs of |d_ij - d_ji| / pair mean; 0 for
    // symmetric matrices. Diagnostic only.
    double asymmetry_gap() const;

    // Pairwise-average symmetrization; returns a new matrix, the original
    // is untouched. Idempotent (symmetric input comes back bit-identical).
    DistanceMatrix symmetrized() const;

    bool operator==(const DistanceMatrix&) const = default;

private:
    int vertices_ = 0;
    std::vector<double> d_;
};

struct Instance {
    std::string name;
    Parameters params;
    std::vector<Bin> bins;
    DistanceMatrix distances;

    int num_bins() const { return static_cast<int>(bins.size()); }
};

// CLI-level parameter overrides applied on top of the file contents.
struct ParameterOverrides {
    std::optional<double> travel_cost_per_km;
    std::optional<double> selling_price_per_kg;
    std::optional<double> vehicle_capacity_kg;
    std::optional<double> waste_density_kg_m3;
    std::optional<double> big_m;
    std::optional<int> horizon;
};

// Hard-errors on structural problems, appends soft issues (suspicious
// big-M, asymmetric distances, ...) to `warnings` when given.
void validate_instance(const Instance& inst, std::vector<std::string>* warnings = nullptr);

Instance load_instance(const std::string& path,
                       const ParameterOverrides& overrides = {},
                       std::vector<std::string>* warnings = nullptr);
void save_instance(const Instance& inst, const std::string& path);

// Fill-level record of one bin: (day index, fill fraction) on collection
// days, day indices strictly increasing.
struct FillHistory {
    int bin_id = 0;
    std::vector<std::pair<int, double>> observations;
};

// Per-day accumulation rates reconstructed from a fill history. rates[k]
// is the rate of day first_day + k; the first day of the span carries 0
// by convention (nothing precedes it).
struct DailyRates {
    int bin_id = 0;
    int first_day = 0;
    std::vector<double> rates;
};

// Spread each observed fill uniformly over the days since the previous
// collection: rate = fill / gap for every day in (prev, current]. Bins are
// assumed emptied at every observation.
DailyRates derive_accumulation(const FillHistory& history);

// CSV rows `bin_id,day_index,fill_fraction`, header line optional.
std::vector<FillHistory> load_fill_histories(const std::string& path);

} // namespace sirp
