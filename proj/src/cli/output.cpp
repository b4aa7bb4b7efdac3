#include "sclbf/cli/output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sclbf::cli {

std::string format_g9(double v) {
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.9g", v);
    return buf.data();
}

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols{"t",  "p1", "p2",     "v1",     "v2", "tau1", "tau2",
                                               "F1", "F2", "Fsafe1", "Fsafe2", "W1", "W2",   "safe_flag"};
    return cols;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    const auto& cols = csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const TrajectoryPoint& pt : traj.points) {
        const double w1 = pt.w_values.size() > 0 ? pt.w_values[0] : 0.0;
        const double w2 = pt.w_values.size() > 1 ? pt.w_values[1] : 0.0;
        const std::array<double, 13> vals{pt.t,        pt.p[0],     pt.p[1],          pt.v[0],          pt.v[1],
                                          pt.torque[0], pt.torque[1], pt.force[0],     pt.force[1],
                                          pt.force_safe[0], pt.force_safe[1], w1, w2};
        for (double v : vals) out << format_g9(v) << ',';
        out << (pt.safe ? 1 : 0) << '\n';
    }
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::InvalidArgument, "no CSV column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    if (std::getline(in, line)) table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line)) row.push_back(std::stod(cell));
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace {

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

struct Frame {
    double x_lo, x_hi, y_lo, y_hi;
    double width = 640, height = 480, margin = 60;

    double px(double x) const { return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin); }
    double py(double y) const { return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin); }
};

void open_svg(std::ostream& out, const Frame& f, const std::string& title, const std::string& xlabel,
              const std::string& ylabel) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << f.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
        << "</text>\n";
    out << "<text x=\"" << f.width / 2 << "\" y=\"" << f.height - 16 << "\" text-anchor=\"middle\">" << xlabel
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << f.height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << f.height / 2 << ")\">" << ylabel << "</text>\n";
}

void axes(std::ostream& out, const Frame& f) {
    out << "<rect x=\"" << f.margin << "\" y=\"" << f.margin << "\" width=\"" << f.width - 2 * f.margin
        << "\" height=\"" << f.height - 2 * f.margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double x = f.x_lo + (f.x_hi - f.x_lo) * i / 4.0;
        const double y = f.y_lo + (f.y_hi - f.y_lo) * i / 4.0;
        out << "<text x=\"" << f.px(x) << "\" y=\"" << f.height - f.margin + 16 << "\" text-anchor=\"middle\">"
            << format_g9(std::round(x * 100) / 100) << "</text>\n";
        out << "<text x=\"" << f.margin - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">"
            << format_g9(std::round(y * 100) / 100) << "</text>\n";
    }
}

template <typename Get>
void polyline(std::ostream& out, const Frame& f, const Trajectory& traj, Get get, const char* color,
              const char* dash) {
    const std::size_t n = traj.points.size();
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << dash << " points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
        const auto [x, y] = get(traj.points[i]);
        out << format_g9(f.px(x)) << ',' << format_g9(f.py(y)) << ' ';
    }
    out << "\"/>\n";
}

void legend(std::ostream& out, const Frame& f, const std::vector<LabeledRun>& runs) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const double y = f.margin + 16 + 16 * static_cast<double>(i);
        out << "<line x1=\"" << f.width - f.margin - 130 << "\" y1=\"" << y - 4 << "\" x2=\""
            << f.width - f.margin - 110 << "\" y2=\"" << y - 4 << "\" stroke=\"" << kPalette[i % kPalette.size()]
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << f.width - f.margin - 104 << "\" y=\"" << y << "\">" << runs[i].label << "</text>\n";
    }
}

}  // namespace

void write_trajectory_svg(std::ostream& out, const std::vector<LabeledRun>& runs, const TaskConstraints& constraints,
                          const Vec2& goal) {
    const double p1_limit = -constraints.d_hat[0];
    const double p2_limit = constraints.d_hat[1];
    double x_lo = std::min(goal[0], p1_limit), x_hi = std::max(goal[0], p1_limit);
    double y_lo = std::min(goal[1], p2_limit), y_hi = std::max(goal[1], p2_limit);
    for (const auto& r : runs)
        for (const auto& pt : r.trajectory->points) {
            x_lo = std::min(x_lo, pt.p[0]);
            x_hi = std::max(x_hi, pt.p[0]);
            y_lo = std::min(y_lo, pt.p[1]);
            y_hi = std::max(y_hi, pt.p[1]);
        }
    const double pad_x = 0.1 * (x_hi - x_lo) + 1e-3, pad_y = 0.1 * (y_hi - y_lo) + 1e-3;
    const Frame f{x_lo - pad_x, x_hi + pad_x, y_lo - pad_y, y_hi + pad_y};

    open_svg(out, f, "End-effector trajectories", "p1 [m]", "p2 [m]");
    // Unsafe regions: p1 >= -d_hat1 and p2 <= d_hat2.
    out << "<rect x=\"" << f.px(p1_limit) << "\" y=\"" << f.margin << "\" width=\""
        << std::max(0.0, f.width - f.margin - f.px(p1_limit)) << "\" height=\"" << f.height - 2 * f.margin
        << "\" fill=\"red\" fill-opacity=\"0.2\"/>\n";
    out << "<rect x=\"" << f.margin << "\" y=\"" << f.py(p2_limit) << "\" width=\"" << f.width - 2 * f.margin
        << "\" height=\"" << std::max(0.0, f.height - f.margin - f.py(p2_limit))
        << "\" fill=\"red\" fill-opacity=\"0.2\"/>\n";
    axes(out, f);
    for (std::size_t i = 0; i < runs.size(); ++i)
        polyline(
            out, f, *runs[i].trajectory, [](const TrajectoryPoint& p) { return std::pair{p.p[0], p.p[1]}; },
            kPalette[i % kPalette.size()], "");
    out << "<circle cx=\"" << f.px(goal[0]) << "\" cy=\"" << f.py(goal[1]) << "\" r=\"4\" fill=\"black\"/>\n";
    legend(out, f, runs);
    out << "</svg>\n";
}

void write_input_norm_svg(std::ostream& out, const std::vector<LabeledRun>& runs) {
    double t_hi = 0.0, y_hi = 0.0;
    for (const auto& r : runs)
        for (const auto& pt : r.trajectory->points) {
            t_hi = std::max(t_hi, pt.t);
            y_hi = std::max({y_hi, pt.phi.norm(), pt.force_safe.norm()});
        }
    const Frame f{0.0, std::max(t_hi, 1e-9), 0.0, 1.05 * std::max(y_hi, 1e-9)};
    open_svg(out, f, "Input norms: |phi| solid, |F_safe| dashed", "t [s]", "norm [N]");
    axes(out, f);
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const char* color = kPalette[i % kPalette.size()];
        polyline(
            out, f, *runs[i].trajectory, [](const TrajectoryPoint& p) { return std::pair{p.t, p.phi.norm()}; }, color,
            "");
        polyline(
            out, f, *runs[i].trajectory,
            [](const TrajectoryPoint& p) { return std::pair{p.t, p.force_safe.norm()}; }, color,
            " stroke-dasharray=\"5,3\"");
    }
    legend(out, f, runs);
    out << "</svg>\n";
}

}  // namespace sclbf::cli
