#ifndef QERF_SVG_HPP
#define QERF_SVG_HPP

#include <string>
#include <vector>

#include "qerf/matching.hpp"
#include "qerf/quantile.hpp"

namespace qerf {

/// Grouped bar chart of per-covariate absolute correlations, matched vs raw
/// (and optionally IPTW-weighted).
void write_balance_svg(const BalanceReport& matched, const BalanceReport& raw,
                       const std::vector<std::string>& names, const std::string& path,
                       const BalanceReport* weighted = nullptr);

/// Multi-curve line plot with shaded confidence bands where present.
void write_curves_svg(const std::vector<QuantileCurve>& curves, const std::string& path,
                      const std::string& y_label = "quantile");

}  // namespace qerf

#endif  // QERF_SVG_HPP
