#include "qerf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "qerf/errors.hpp"

namespace qerf {

namespace {

constexpr int kWidth = 760;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 60;
constexpr int kMarginBottom = 50;
constexpr int kMarginTop = 20;
constexpr int kMarginRight = 20;

const char* kPalette[] = {"#6a3d9a", "#8a5fc9", "#1f78b4", "#56b4e9", "#2aa198",
                          "#33a02c", "#e6c229", "#e31a1c", "#ff7f00"};

struct Axis {
    double lo, hi;
    double px0, px1;

    double operator()(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='" << kHeight
        << "' font-family='sans-serif' font-size='11'>\n";
    return out;
}

}  // namespace

void write_balance_svg(const BalanceReport& matched, const BalanceReport& raw,
                       const std::vector<std::string>& names, const std::string& path,
                       const BalanceReport* weighted) {
    const Eigen::Index q = matched.per_covariate_abs_corr.size();
    std::ofstream out = open_svg(path);
    double maxv = std::max(matched.per_covariate_abs_corr.maxCoeff(),
                           raw.per_covariate_abs_corr.maxCoeff());
    if (weighted) maxv = std::max(maxv, weighted->per_covariate_abs_corr.maxCoeff());
    maxv = std::max(maxv, 0.12);
    const Axis y{0.0, maxv * 1.1, kHeight - kMarginBottom, kMarginTop};

    const int series = weighted ? 3 : 2;
    const double group_w = static_cast<double>(kWidth - kMarginLeft - kMarginRight) / q;
    const double bar_w = group_w / (series + 1);
    const char* colors[3] = {"#e31a1c", "#33a02c", "#1f78b4"};  // raw, weighted, matched
    auto bar = [&](double x, double v, const char* color) {
        out << "<rect x='" << x << "' y='" << y(v) << "' width='" << bar_w << "' height='"
            << y(0.0) - y(v) << "' fill='" << color << "'/>\n";
    };
    for (Eigen::Index k = 0; k < q; ++k) {
        double x = kMarginLeft + k * group_w + bar_w * 0.5;
        bar(x, raw.per_covariate_abs_corr[k], colors[0]);
        x += bar_w;
        if (weighted) {
            bar(x, weighted->per_covariate_abs_corr[k], colors[1]);
            x += bar_w;
        }
        bar(x, matched.per_covariate_abs_corr[k], colors[2]);
        out << "<text x='" << kMarginLeft + (k + 0.5) * group_w << "' y='" << kHeight - 30
            << "' text-anchor='middle'>" << names[static_cast<std::size_t>(k)] << "</text>\n";
    }
    // 0.1 balance threshold
    out << "<line x1='" << kMarginLeft << "' y1='" << y(0.1) << "' x2='" << kWidth - kMarginRight
        << "' y2='" << y(0.1) << "' stroke='#888' stroke-dasharray='4 3'/>\n";
    out << "<text x='" << kMarginLeft << "' y='" << kHeight - 10 << "'>raw (red)"
        << (weighted ? ", iptw (green)" : "") << ", matched (blue); dashed line = 0.1</text>\n";
    out << "<line x1='" << kMarginLeft << "' y1='" << y(0.0) << "' x2='" << kWidth - kMarginRight
        << "' y2='" << y(0.0) << "' stroke='black'/>\n";
    out << "</svg>\n";
}

void write_curves_svg(const std::vector<QuantileCurve>& curves, const std::string& path,
                      const std::string& y_label) {
    if (curves.empty()) throw Error("write_curves_svg: no curves");
    double xlo = curves[0].grid.minCoeff(), xhi = curves[0].grid.maxCoeff();
    double ylo = curves[0].estimate.minCoeff(), yhi = curves[0].estimate.maxCoeff();
    for (const auto& c : curves) {
        xlo = std::min(xlo, c.grid.minCoeff());
        xhi = std::max(xhi, c.grid.maxCoeff());
        ylo = std::min(ylo, c.has_bands() ? c.lower.minCoeff() : c.estimate.minCoeff());
        yhi = std::max(yhi, c.has_bands() ? c.upper.maxCoeff() : c.estimate.maxCoeff());
    }
    if (yhi == ylo) {
        yhi += 1.0;
        ylo -= 1.0;
    }
    const Axis x{xlo, xhi, static_cast<double>(kMarginLeft),
                 static_cast<double>(kWidth - kMarginRight)};
    const Axis y{ylo, yhi, static_cast<double>(kHeight - kMarginBottom),
                 static_cast<double>(kMarginTop)};

    std::ofstream out = open_svg(path);
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& curve = curves[c];
        const char* color = kPalette[c % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (curve.has_bands()) {
            out << "<path d='M";
            for (Eigen::Index g = 0; g < curve.grid.size(); ++g)
                out << ' ' << x(curve.grid[g]) << ' ' << y(curve.lower[g]);
            for (Eigen::Index g = curve.grid.size() - 1; g >= 0; --g)
                out << " L " << x(curve.grid[g]) << ' ' << y(curve.upper[g]);
            out << " Z' fill='" << color << "' fill-opacity='0.15' stroke='none'/>\n";
        }
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (Eigen::Index g = 0; g < curve.grid.size(); ++g)
            out << x(curve.grid[g]) << ',' << y(curve.estimate[g]) << ' ';
        out << "'/>\n";
        out << "<text x='" << kWidth - kMarginRight - 80 << "' y='" << kMarginTop + 14 * (c + 1)
            << "' fill='" << color << "'>tau=" << curve.tau << "</text>\n";
    }
    out << "<line x1='" << kMarginLeft << "' y1='" << y.px0 << "' x2='" << kWidth - kMarginRight
        << "' y2='" << y.px0 << "' stroke='black'/>\n";
    out << "<line x1='" << kMarginLeft << "' y1='" << y.px0 << "' x2='" << kMarginLeft << "' y2='"
        << y.px1 << "' stroke='black'/>\n";
    out << "<text x='" << kMarginLeft << "' y='" << kHeight - 10 << "'>exposure vs " << y_label
        << "</text>\n";
    out << "</svg>\n";
}

}  // namespace qerf
