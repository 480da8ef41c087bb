#pragma once

#include <string>
#include <vector>

#include "nchs/forward.hpp"
#include "nchs/optimize.hpp"

namespace nchs {

/// Header line written before the column names; bumped whenever the columns change.
inline constexpr const char* diagnostics_schema = "# nchs-diagnostics v1";
inline constexpr const char* history_schema = "# nchs-history v1";

std::vector<std::string> diagnostics_columns();
std::vector<std::string> history_columns();

std::string diagnostics_csv(const Trajectory& traj, const EnergyReport& energy);
std::string history_csv(const std::vector<IterationRecord>& history);
/// gnuplot "splot ... with pm3d" layout: x y phi, a blank line after every grid row.
std::string phase_dump(const ScalarField& phi, double t);

void write_diagnostics(const std::string& path, const Trajectory& traj, const EnergyReport& energy);
void write_history(const std::string& path, const std::vector<IterationRecord>& history);
/// One dump per requested time at the nearest snapshot; returns the written paths.
std::vector<std::string> write_phase_dumps(const std::string& directory, const Trajectory& traj,
                                           const std::vector<double>& times);

}  // namespace nchs
