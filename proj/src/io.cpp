#include "pco/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace pco {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

void write_firing_log_csv(std::ostream& os, const FiringLog& log) {
    os << "time,oscillator,index\n";
    for (const FiringRecord& r : log.records()) {
        os << format_number(r.time) << ',' << r.oscillator << ',' << r.index << '\n';
    }
}

void write_topology_csv(std::ostream& os, const NetworkTopology& topology) {
    const auto m = topology.matrix();
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ',';
            os << format_number(row[j]);
        }
        os << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<EstimateCell>& cells) {
    os << "tau,eps,N,samples,sync,undecided,p_hat,ci_low,ci_high,region\n";
    for (const EstimateCell& c : cells) {
        os << format_number(c.tau) << ',' << format_number(c.eps) << ',' << c.n << ','
           << c.samples << ',' << c.sync_count << ',' << c.undecided << ','
           << format_number(c.p_hat) << ',' << format_number(c.ci_low) << ','
           << format_number(c.ci_high) << ',' << to_string(c.region) << '\n';
    }
}

std::string raster_svg(const FiringLog& log, int n) {
    const double t_end = log.records().empty() ? 1.0 : log.records().back().time;
    const double width = 720.0, row_h = 28.0, margin = 40.0;
    const double height = margin * 2 + row_h * n;
    const double scale = (width - 2 * margin) / std::max(t_end, 1e-9);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int i = 0; i < n; ++i) {
        const double y = margin + row_h * (i + 0.5);
        os << "<line x1=\"" << margin << "\" y1=\"" << y << "\" x2=\"" << width - margin
           << "\" y2=\"" << y << "\" stroke=\"#ccc\"/>\n";
        os << "<text x=\"6\" y=\"" << y + 4 << "\" font-size=\"12\">" << i << "</text>\n";
    }
    for (const FiringRecord& r : log.records()) {
        const double x = margin + r.time * scale;
        const double y = margin + row_h * (r.oscillator + 0.5);
        os << "<line x1=\"" << x << "\" y1=\"" << y - 9 << "\" x2=\"" << x << "\" y2=\""
           << y + 9 << "\" stroke=\"black\" stroke-width=\"1.2\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const std::vector<EstimateCell>& cells, const PhaseMap& map) {
    std::set<double> taus, epss;
    for (const auto& c : cells) {
        taus.insert(c.tau);
        epss.insert(c.eps);
    }
    const double width = 560.0, height = 560.0, margin = 50.0;
    const double pw = width - 2 * margin, ph = height - 2 * margin;
    auto x_of = [&](double tau) { return margin + tau * pw; };
    auto y_of = [&](double eps) { return height - margin - eps * ph; };
    const double cw = taus.size() > 1 ? pw / static_cast<double>(taus.size()) : pw / 10;
    const double ch = epss.size() > 1 ? ph / static_cast<double>(epss.size()) : ph / 10;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
       << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << pw
       << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& c : cells) {
        if (c.p_hat <= 0.0) continue;
        os << "<rect x=\"" << x_of(c.tau) - cw / 2 << "\" y=\"" << y_of(c.eps) - ch / 2
           << "\" width=\"" << cw << "\" height=\"" << ch << "\" fill=\"black\"/>\n";
    }
    // Boundary curve eps = 1 - f(tau), dashed.
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"6,4\" points=\"";
    const int steps = 200;
    bool firstpt = true;
    for (int k = 0; k <= steps; ++k) {
        const double tau = static_cast<double>(k) / steps;
        const double eps = 1.0 - map.f(tau);
        if (eps < 0.0 || eps > 1.0) continue;
        if (!firstpt) os << ' ';
        os << x_of(tau) << ',' << y_of(eps);
        firstpt = false;
    }
    os << "\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
       << "\" font-size=\"14\" text-anchor=\"middle\">tau</text>\n";
    os << "<text x=\"14\" y=\"" << height / 2
       << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << height / 2 << ")\">eps</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace pco
