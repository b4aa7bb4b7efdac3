#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sclbf/sim.hpp"

namespace sclbf::cli {

/// t,p1,p2,v1,v2,tau1,tau2,F1,F2,Fsafe1,Fsafe2,W1,W2,safe_flag
const std::vector<std::string>& csv_columns();

/// Values use 9 significant digits; safe_flag is 0/1.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // throws InvalidArgument
};

CsvTable read_csv(const std::string& path);

struct LabeledRun {
    std::string label;
    const Trajectory* trajectory;
};

/// p2 against p1 with the unsafe half-planes shaded.
void write_trajectory_svg(std::ostream& out, const std::vector<LabeledRun>& runs, const TaskConstraints& constraints,
                          const Vec2& goal);

/// |phi| (solid) and |F_safe| (dashed) against time.
void write_input_norm_svg(std::ostream& out, const std::vector<LabeledRun>& runs);

std::string format_g9(double v);

}  // namespace sclbf::cli
