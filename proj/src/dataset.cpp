#include "qerf/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qerf/errors.hpp"
#include "qerf/quantile.hpp"

namespace qerf {

void ObservationalDataset::validate() const {
    const Eigen::Index n = exposure.size();
    if (n < 2) throw EmptyDataset("dataset needs at least 2 units, got " + std::to_string(n));
    if (outcome.size() != n || unit_weight.size() != n || covariates.rows() != n)
        throw DimensionMismatch("dataset columns have inconsistent lengths");
    if (static_cast<Eigen::Index>(covariate_names.size()) != covariates.cols())
        throw DimensionMismatch("covariate_names length != covariate count");
    if (!exposure.allFinite() || !outcome.allFinite() || !covariates.allFinite() ||
        !unit_weight.allFinite())
        throw Error("dataset contains non-finite values");
    if ((unit_weight.array() <= 0.0).any()) throw Error("unit_weight must be positive");
}

ExposureRange exposure_range(const ObservationalDataset& ds) {
    return {ds.exposure.minCoeff(), ds.exposure.maxCoeff()};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) throw ParseFailure(row, col);
    return value;
}

}  // namespace

ObservationalDataset load_csv(const std::string& path, const ColumnMap& schema) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw EmptyDataset("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);

    auto column_index = [&](const std::string& name) -> Eigen::Index {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw MissingColumn("column '" + name + "' not found in '" + path + "'");
        return it - header.begin();
    };

    const Eigen::Index wi = column_index(schema.exposure);
    const Eigen::Index yi = column_index(schema.outcome);
    std::vector<Eigen::Index> ci;
    for (const auto& name : schema.covariates) ci.push_back(column_index(name));
    const Eigen::Index ui = schema.weight.empty() ? -1 : column_index(schema.weight);

    std::vector<double> w, y, u;
    std::vector<std::vector<double>> c(ci.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> cells = split_csv_line(line);
        auto cell = [&](Eigen::Index idx, const std::string& col) -> double {
            if (idx >= static_cast<Eigen::Index>(cells.size())) throw ParseFailure(row, col);
            return parse_cell(cells[idx], row, col);
        };
        w.push_back(cell(wi, schema.exposure));
        y.push_back(cell(yi, schema.outcome));
        for (std::size_t k = 0; k < ci.size(); ++k)
            c[k].push_back(cell(ci[k], schema.covariates[k]));
        u.push_back(ui >= 0 ? cell(ui, schema.weight) : 1.0);
    }
    if (w.empty()) throw EmptyDataset("'" + path + "' has no data rows");

    ObservationalDataset ds;
    const Eigen::Index n = static_cast<Eigen::Index>(w.size());
    ds.exposure = Eigen::Map<Eigen::VectorXd>(w.data(), n);
    ds.outcome = Eigen::Map<Eigen::VectorXd>(y.data(), n);
    ds.unit_weight = Eigen::Map<Eigen::VectorXd>(u.data(), n);
    ds.covariates.resize(n, static_cast<Eigen::Index>(c.size()));
    for (std::size_t k = 0; k < c.size(); ++k)
        ds.covariates.col(static_cast<Eigen::Index>(k)) = Eigen::Map<Eigen::VectorXd>(c[k].data(), n);
    ds.covariate_names = schema.covariates;
    ds.validate();
    return ds;
}

void save_csv(const ObservationalDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out.precision(17);
    const bool weighted = (ds.unit_weight.array() != 1.0).any();
    out << "w,y";
    for (const auto& name : ds.covariate_names) out << ',' << name;
    if (weighted) out << ",weight";
    out << '\n';
    for (Eigen::Index i = 0; i < ds.n_units(); ++i) {
        out << ds.exposure[i] << ',' << ds.outcome[i];
        for (Eigen::Index k = 0; k < ds.n_covariates(); ++k) out << ',' << ds.covariates(i, k);
        if (weighted) out << ',' << ds.unit_weight[i];
        out << '\n';
    }
}

ObservationalDataset trim_exposure(const ObservationalDataset& ds, double lo_pct, double hi_pct) {
    if (!(lo_pct >= 0.0 && lo_pct <= hi_pct && hi_pct <= 1.0))
        throw Error("trim fractions must satisfy 0 <= lo < hi <= 1");
    if (lo_pct == hi_pct) throw EmptyAfterTrim("degenerate trim bounds");
    const double lo =
        lo_pct == 0.0 ? ds.exposure.minCoeff() : weighted_quantile(ds.exposure, ds.unit_weight, lo_pct);
    const double hi =
        hi_pct == 1.0 ? ds.exposure.maxCoeff() : weighted_quantile(ds.exposure, ds.unit_weight, hi_pct);

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ds.n_units(); ++i)
        if (ds.exposure[i] >= lo && ds.exposure[i] <= hi) keep.push_back(i);
    if (keep.size() < 2) throw EmptyAfterTrim("fewer than 2 units remain after trimming");

    ObservationalDataset out;
    const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
    out.exposure.resize(m);
    out.outcome.resize(m);
    out.unit_weight.resize(m);
    out.covariates.resize(m, ds.n_covariates());
    for (Eigen::Index i = 0; i < m; ++i) {
        out.exposure[i] = ds.exposure[keep[i]];
        out.outcome[i] = ds.outcome[keep[i]];
        out.unit_weight[i] = ds.unit_weight[keep[i]];
        out.covariates.row(i) = ds.covariates.row(keep[i]);
    }
    out.covariate_names = ds.covariate_names;
    return out;
}

ObservationalDataset reweight(const ObservationalDataset& ds, const Eigen::VectorXd& factor) {
    if (factor.size() != ds.n_units()) throw DimensionMismatch("reweight: factor length mismatch");
    ObservationalDataset out = ds;
    out.unit_weight = ds.unit_weight.cwiseProduct(factor);
    return out;
}

}  // namespace qerf
