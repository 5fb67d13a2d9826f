#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sirp/instance.hpp"
#include "sirp/rng.hpp"
#include "sirp/sampler.hpp"
#include "support.hpp"

using namespace sirp;

namespace {

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("rng: draws live in the open unit interval and repeat per seed") {
    Rng a(7), b(7), c(8);
    bool differ = false;
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform01();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        CHECK(u == b.uniform01());
        if (u != c.uniform01()) differ = true;
    }
    CHECK(differ);
}

TEST_CASE("rng: uniform_int covers its range without leaking outside") {
    Rng rng(99);
    std::set<int> seen;
    for (int i = 0; i < 2000; ++i) {
        const int v = rng.uniform_int(3, 7);
        CHECK(v >= 3);
        CHECK(v <= 7);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("distance matrix: symmetry checks and idempotent symmetrization") {
    DistanceMatrix d(2, {0.0, 2.0, 4.0, 0.0});
    CHECK(!d.is_symmetric());
    CHECK(d.asymmetry_gap() > 0.0);
    const DistanceMatrix s = d.symmetrized();
    CHECK(s.is_symmetric());
    CHECK(s.at(0, 1) == 3.0);
    CHECK(s.at(1, 0) == 3.0);
    CHECK(s.symmetrized() == s);
    CHECK(s.asymmetry_gap() == 0.0);
}

TEST_CASE("derive_accumulation: fills spread uniformly over the gaps") {
    FillHistory h;
    h.bin_id = 3;
    h.observations = {{2, 0.30}, {5, 0.60}, {6, 0.10}};
    const DailyRates r = derive_accumulation(h);
    CHECK(r.bin_id == 3);
    CHECK(r.first_day == 2);
    REQUIRE(r.rates.size() == 5);
    CHECK(r.rates[0] == 0.0); // nothing precedes the first observation day
    // days 3,4,5 share the 0.60 fill, day 6 carries 0.10
    CHECK(r.rates[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.rates[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.rates[3] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(r.rates[4] == doctest::Approx(0.1).epsilon(1e-12));
    // segment sums reproduce the observed fills exactly
    CHECK(r.rates[1] + r.rates[2] + r.rates[3] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("fill history csv: header optional, bad rows rejected") {
    const std::string path = temp_path("sirp_hist_test.csv");
    {
        std::ofstream out(path);
        out << "bin_id,day_index,fill_fraction\n";
        out << "1,2,0.5\n1,4,0.3\n2,2,0.1\n";
    }
    const auto hs = load_fill_histories(path);
    REQUIRE(hs.size() == 2);
    CHECK(hs[0].bin_id == 1);
    CHECK(hs[0].observations.size() == 2);
    CHECK(hs[1].observations.size() == 1);

    {
        std::ofstream out(path);
        out << "1,2,0.5\n1,4,not_a_number\n"; // line 1 gets header amnesty, line 2 not
    }
    CHECK_THROWS_AS(load_fill_histories(path), LoadError);
    std::filesystem::remove(path);
}

TEST_CASE("trajectory bank: weekly chopping drops the tail and zeroes day one") {
    DailyRates r;
    r.bin_id = 1;
    r.first_day = 1;
    r.rates = {0.9, 0.2, 0.3, 0.9, 0.4, 0.5, 0.7}; // 7 days, horizon 3 -> 2 weeks
    const TrajectoryBank bank = TrajectoryBank::from_daily_rates({r}, 3);
    CHECK(bank.num_bins() == 1);
    CHECK(bank.horizon() == 3);
    CHECK(bank.num_observations() == 2);
    for (int o = 0; o < 2; ++o) CHECK(bank.value(o, 1, 0) == 0.0);
    // observation order is canonicalized, so collect the stage-2/3 pairs
    std::set<std::pair<double, double>> weeks;
    for (int o = 0; o < 2; ++o) weeks.insert({bank.value(o, 2, 0), bank.value(o, 3, 0)});
    CHECK(weeks == std::set<std::pair<double, double>>{{0.2, 0.3}, {0.4, 0.5}});
}

TEST_CASE("bandwidth: silverman rule against a frozen value") {
    CHECK(bandwidth_from_sigma(0.05, 14, 9) ==
          doctest::Approx(0.040813732084).epsilon(1e-9));
    CHECK(bandwidth_from_sigma(0.0, 14, 9) == 0.0);
    // sample sd of {0,1} is sqrt(1/2)... n-1 denominator: sd = sqrt(0.5)
    const double h = silverman_bandwidth({0.0, 1.0}, 1);
    CHECK(h == doctest::Approx(std::sqrt(0.5) * std::pow(2.0, -0.2)).epsilon(1e-12));
    CHECK(silverman_bandwidth({0.4, 0.4, 0.4}, 5) == 0.0);
    CHECK(silverman_bandwidth({0.4}, 5) == 0.0); // n < 2 has no spread
}

TEST_CASE("sampler: trajectories respect stage-1 zeros and [0,1] clamping") {
    const TrajectoryBank bank = testsup::make_bank(3, 4, 10, 123);
    const SamplerState st = SamplerState::init(bank);
    REQUIRE(st.weights.size() == static_cast<std::size_t>(bank.num_observations()));
    double mass = 0.0;
    for (double w : st.weights) mass += w;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(5);
    for (int k = 0; k < 50; ++k) {
        const auto traj = sample_trajectory(bank, st, rng);
        REQUIRE(traj.size() == 4);
        for (double v : traj[0]) CHECK(v == 0.0);
        for (const auto& stage : traj)
            for (double v : stage) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
    }
}

TEST_CASE("sampler: weight update renormalizes and falls back on wipeout") {
    const TrajectoryBank bank = testsup::make_bank(2, 3, 6, 77);
    std::vector<double> w(static_cast<std::size_t>(bank.num_observations()),
                          1.0 / bank.num_observations());
    std::vector<double> bws(2, 0.05);
    update_weights(bank, 2, {0.2, 0.2}, bws, w);
    double mass = 0.0;
    for (double v : w) {
        CHECK(v >= 0.0);
        mass += v;
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

    // zero bandwidths skip every factor: weights must remain unchanged up
    // to the final renormalization
    std::vector<double> w2(w);
    update_weights(bank, 2, {0.9, 0.9}, {0.0, 0.0}, w2);
    for (std::size_t k = 0; k < w.size(); ++k)
        CHECK(w2[k] == doctest::Approx(w[k]).epsilon(1e-12));

    SamplerStats stats;
    std::vector<double> w3(w);
    // a sample far outside every kernel support collapses all weights
    update_weights(bank, 2, {1e9, 1e9}, {1e-9, 1e-9}, w3, &stats);
    CHECK(stats.weight_fallbacks == 1);
    for (double v : w3)
        CHECK(v == doctest::Approx(1.0 / bank.num_observations()).epsilon(1e-12));
}

TEST_CASE("instance json: round trip is byte identical") {
    const Instance inst = testsup::make_instance(3, 4, 42);
    const std::string p1 = temp_path("sirp_inst_rt1.json");
    const std::string p2 = temp_path("sirp_inst_rt2.json");
    save_instance(inst, p1);
    const Instance back = load_instance(p1);
    CHECK(back.name == inst.name);
    CHECK(back.params == inst.params);
    CHECK(back.bins == inst.bins);
    CHECK(back.distances == inst.distances);
    save_instance(back, p2);
    CHECK(slurp(p1) == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("instance validation: structural breakage throws, soft issues warn") {
    Instance inst = testsup::make_instance(2, 3, 9);
    std::vector<std::string> warnings;
    validate_instance(inst, &warnings);
    CHECK(warnings.empty());

    Instance asym = inst;
    std::vector<double> d = asym.distances.raw();
    d[1] += 0.5;
    asym.distances = DistanceMatrix(asym.distances.vertices(), std::move(d));
    warnings.clear();
    validate_instance(asym, &warnings); // asymmetric distances are legal for M
    CHECK(!warnings.empty());

    Instance broken = inst;
    broken.bins[0].id = broken.bins[1].id;
    CHECK_THROWS_AS(validate_instance(broken), LoadError);

    Instance neg = inst;
    neg.params.vehicle_capacity_kg = -1.0;
    CHECK_THROWS_AS(validate_instance(neg), LoadError);
}
