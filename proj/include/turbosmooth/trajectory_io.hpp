// Copyright 2026 The turbosmooth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TURBOSMOOTH_TRAJECTORY_IO_HPP
#define TURBOSMOOTH_TRAJECTORY_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "turbosmooth/clg_model.hpp"

namespace turbosmooth {

/// CSV layout: header `t,x0,..,x{D-1},y0,..,y{P-1}`, one row per step, t
/// starting at 1. Values are written with 17 significant digits so a round
/// trip is exact.
void write_trajectory_csv(std::ostream& out, const SimulatedTrajectory& traj);
void write_trajectory_csv(const std::filesystem::path& path, const SimulatedTrajectory& traj);

/// Reads the layout above. State columns are optional (measurement-only
/// files give an empty `states`). Throws DimensionMismatch on malformed
/// input.
SimulatedTrajectory read_trajectory_csv(std::istream& in);
SimulatedTrajectory read_trajectory_csv(const std::filesystem::path& path);

/// Writes rows of vectors under a `t,<prefix>0,..` header.
void write_series_csv(std::ostream& out, const std::vector<std::string>& prefixes,
                      const std::vector<std::vector<Vector>>& columns);

/// printf("%.17g") of a double.
std::string format_double(double value);

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_TRAJECTORY_IO_HPP
