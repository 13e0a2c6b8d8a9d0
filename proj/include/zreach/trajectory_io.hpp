#ifndef ZREACH_TRAJECTORY_IO_HPP
#define ZREACH_TRAJECTORY_IO_HPP

#include "zreach/plant.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace zreach
{

struct CsvTrajectory
{
    Trajectory trajectory;
    Index state_dim = 0;
    Index input_dim = 0;
    std::vector<std::string> warnings;
};

/// Parses `k,x1..xn,u1..um` rows. Row k holds x_k and u_k; the final row may
/// leave its input fields empty. Errors name the offending line.
CsvTrajectory read_trajectory_csv(std::istream& in, const std::string& source = "<stream>");
CsvTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// Writes states and inputs; the final state's input fields are left empty
/// when the trajectory has one more state than inputs.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

} // namespace zreach

#endif
