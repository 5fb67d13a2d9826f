#include "sirp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace sirp {

DistanceMatrix::DistanceMatrix(int vertices, std::vector<double> row_major)
    : vertices_(vertices), d_(std::move(row_major)) {
    if (vertices_ < 0 ||
        d_.size() != static_cast<std::size_t>(vertices_) * vertices_)
        throw LoadError("distance matrix is not square");
}

bool DistanceMatrix::is_symmetric(double tol) const {
    for (int i = 0; i < vertices_; ++i)
        for (int j = i + 1; j < vertices_; ++j)
            if (std::fabs(at(i, j) - at(j, i)) > tol) return false;
    return true;
}

double DistanceMatrix::asymmetry_gap() const {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < vertices_; ++i) {
        for (int j = i + 1; j < vertices_; ++j) {
            const double mean = 0.5 * (at(i, j) + at(j, i));
            if (mean > 0.0) {
                sum += std::fabs(at(i, j) - at(j, i)) / mean;
                ++count;
            }
        }
    }
    return count > 0 ? sum / count : 0.0;
}

DistanceMatrix DistanceMatrix::symmetrized() const {
    std::vector<double> out(d_.size());
    for (int i = 0; i < vertices_; ++i)
        for (int j = 0; j < vertices_; ++j)
            out[static_cast<std::size_t>(i) * vertices_ + j] =
                0.5 * (at(i, j) + at(j, i));
    return DistanceMatrix(vertices_, std::move(out));
}

void validate_instance(const Instance& inst, std::vector<std::string>* warnings) {
    const Parameters& p = inst.params;
    if (inst.bins.empty()) throw LoadError("instance has no bins");
    if (p.horizon < 2) throw LoadError("horizon must be at least 2 stages");
    if (p.travel_cost_per_km < 0.0) throw LoadError("travel cost must be >= 0");
    if (p.selling_price_per_kg < 0.0) throw LoadError("selling price must be >= 0");
    if (p.vehicle_capacity_kg <= 0.0) throw LoadError("vehicle capacity must be > 0");
    if (p.waste_density_kg_m3 <= 0.0) throw LoadError("waste density must be > 0");
    if (p.big_m <= 0.0) throw LoadError("big-M must be > 0");

    std::vector<int> seen;
    double max_bin_kg = 0.0;
    for (const Bin& b : inst.bins) {
        if (b.capacity_m3 <= 0.0)
            throw LoadError("bin " + std::to_string(b.id) + ": capacity must be > 0");
        if (b.initial_fill < 0.0 || b.initial_fill > 1.0)
            throw LoadError("bin " + std::to_string(b.id) + ": initial fill outside [0,1]");
        seen.push_back(b.id);
        max_bin_kg = std::max(max_bin_kg, b.capacity_kg);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw LoadError("duplicate bin ids");

    const int want = inst.num_bins() + 1;
    if (inst.distances.vertices() != want)
        throw LoadError("distance matrix must be " + std::to_string(want) + "x" +
                        std::to_string(want) + " (depot + bins)");
    for (int i = 0; i < want; ++i) {
        if (inst.distances.at(i, i) != 0.0)
            throw LoadError("distance matrix diagonal must be zero");
        for (int j = 0; j < want; ++j)
            if (inst.distances.at(i, j) < 0.0)
                throw LoadError("negative distance entry");
    }

    if (warnings) {
        if (p.big_m < p.vehicle_capacity_kg)
            warnings->push_back("big-M smaller than vehicle capacity; big-M bounds may bind");
        if (p.big_m < max_bin_kg)
            warnings->push_back("big-M smaller than largest bin content");
        if (!inst.distances.is_symmetric()) {
            std::ostringstream os;
            os << "asymmetric distance matrix (mean pair gap "
               << inst.distances.asymmetry_gap() * 100.0 << "%)";
            warnings->push_back(os.str());
        }
    }
}

namespace {

using json = nlohmann::ordered_json;

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw LoadError(std::string("missing or non-numeric field '") + key + "'");
    return j[key].get<double>();
}

} // namespace

Instance load_instance(const std::string& path, const ParameterOverrides& ov,
                       std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open instance file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw LoadError("instance " + path + ": " + e.what());
    }

    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw LoadError("instance " + path + ": unsupported schema_version");

    Instance inst;
    inst.name = j.value("name", std::string{});

    const json& jp = j.at("parameters");
    Parameters& p = inst.params;
    p.travel_cost_per_km = require_number(jp, "travel_cost_per_km");
    p.selling_price_per_kg = require_number(jp, "selling_price_per_kg");
    p.vehicle_capacity_kg = require_number(jp, "vehicle_capacity_kg");
    p.waste_density_kg_m3 = require_number(jp, "waste_density_kg_m3");
    p.big_m = require_number(jp, "big_m");
    p.horizon = static_cast<int>(require_number(jp, "horizon"));

    if (ov.travel_cost_per_km) p.travel_cost_per_km = *ov.travel_cost_per_km;
    if (ov.selling_price_per_kg) p.selling_price_per_kg = *ov.selling_price_per_kg;
    if (ov.vehicle_capacity_kg) p.vehicle_capacity_kg = *ov.vehicle_capacity_kg;
    if (ov.waste_density_kg_m3) p.waste_density_kg_m3 = *ov.waste_density_kg_m3;
    if (ov.big_m) p.big_m = *ov.big_m;
    if (ov.horizon) p.horizon = *ov.horizon;

    if (!j.contains("bins") || !j["bins"].is_array())
        throw LoadError("instance " + path + ": missing bins array");
    for (const json& jb : j["bins"]) {
        Bin b;
        b.id = static_cast<int>(require_number(jb, "id"));
        b.capacity_m3 = require_number(jb, "capacity_m3");
        b.initial_fill = require_number(jb, "initial_fill");
        b.capacity_kg = b.capacity_m3 * p.waste_density_kg_m3;
        inst.bins.push_back(b);
    }

    if (!j.contains("distance_matrix") || !j["distance_matrix"].is_array())
        throw LoadError("instance " + path + ": missing distance_matrix");
    std::vector<double> flat;
    const json& jd = j["distance_matrix"];
    for (const json& row : jd) {
        if (!row.is_array() || row.size() != jd.size())
            throw LoadError("instance " + path + ": distance_matrix is not square");
        for (const json& v : row) flat.push_back(v.get<double>());
    }
    inst.distances = DistanceMatrix(static_cast<int>(jd.size()), std::move(flat));

    validate_instance(inst, warnings);
    return inst;
}

void save_instance(const Instance& inst, const std::string& path) {
    json j;
    j["schema_version"] = 1;
    if (!inst.name.empty()) j["name"] = inst.name;
    j["parameters"] = {
        {"travel_cost_per_km", inst.params.travel_cost_per_km},
        {"selling_price_per_kg", inst.params.selling_price_per_kg},
        {"vehicle_capacity_kg", inst.params.vehicle_capacity_kg},
        {"waste_density_kg_m3", inst.params.waste_density_kg_m3},
        {"big_m", inst.params.big_m},
        {"horizon", inst.params.horizon},
    };
    j["bins"] = json::array();
    for (const Bin& b : inst.bins)
        j["bins"].push_back({{"id", b.id},
                             {"capacity_m3", b.capacity_m3},
                             {"initial_fill", b.initial_fill}});
    j["distance_matrix"] = json::array();
    const int n = inst.distances.vertices();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int jx = 0; jx < n; ++jx) row.push_back(inst.distances.at(i, jx));
        j["distance_matrix"].push_back(row);
    }

    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    out << j.dump(2) << '\n';
}

DailyRates derive_accumulation(const FillHistory& h) {
    if (h.observations.size() < 2)
        throw DataError("bin " + std::to_string(h.bin_id) +
                        ": need at least two observations");
    for (std::size_t k = 0; k < h.observations.size(); ++k) {
        const double fill = h.observations[k].second;
        if (fill < 0.0 || fill > 1.0)
            throw DataError("bin " + std::to_string(h.bin_id) + ": fill " +
                            std::to_string(fill) + " outside [0,1]");
        if (k > 0 && h.observations[k].first <= h.observations[k - 1].first)
            throw LoadError("bin " + std::to_string(h.bin_id) +
                            ": day indices must be strictly increasing");
    }

    DailyRates out;
    out.bin_id = h.bin_id;
    out.first_day = h.observations.front().first;
    const int span = h.observations.back().first - out.first_day + 1;
    out.rates.assign(static_cast<std::size_t>(span), 0.0);

    for (std::size_t k = 1; k < h.observations.size(); ++k) {
        const auto& [prev_day, prev_fill] = h.observations[k - 1];
        const auto& [day, fill] = h.observations[k];
        (void)prev_fill; // bin emptied at every collection
        const int gap = day - prev_day;
        const double rate = fill / gap;
        if (rate < 0.0 || rate > 1.0)
            throw DataError("bin " + std::to_string(h.bin_id) + ": rate " +
                            std::to_string(rate) + " outside [0,1] in days (" +
                            std::to_string(prev_day) + "," + std::to_string(day) + "]");
        for (int d = prev_day + 1; d <= day; ++d)
            out.rates[static_cast<std::size_t>(d - out.first_day)] = rate;
    }
    return out;
}

std::vector<FillHistory> load_fill_histories(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open history file " + path);

    std::map<int, FillHistory> by_bin;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f0, f1, f2;
        if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') ||
            !std::getline(row, f2))
            throw LoadError(path + ":" + std::to_string(lineno) +
                            ": expected bin_id,day_index,fill_fraction");
        try {
            const int bin = std::stoi(f0);
            const int day = std::stoi(f1);
            const double fill = std::stod(f2);
            FillHistory& h = by_bin[bin];
            h.bin_id = bin;
            h.observations.emplace_back(day, fill);
        } catch (const std::exception&) {
            if (lineno == 1) continue; // header line
            throw LoadError(path + ":" + std::to_string(lineno) + ": bad record");
        }
    }
    if (by_bin.empty()) throw LoadError(path + ": no usable records");

    std::vector<FillHistory> out;
    out.reserve(by_bin.size());
    for (auto& [id, h] : by_bin) out.push_back(std::move(h));
    return out;
}

} // namespace sirp
