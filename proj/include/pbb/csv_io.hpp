#pragma once

#include <map>
#include <string>
#include <vector>

#include "pbb/maxwell_bloch.hpp"
#include "pbb/qjmc.hpp"
#include "pbb/timeseries.hpp"

namespace pbb {

/// Leading "# key=value" comment lines of a CSV file.
using CsvMetadata = std::map<std::string, std::string>;

/// Shortest round-trip decimal representation (locale independent).
std::string format_double(double x);
/// Strict parse of a full field; throws InvalidArgument on junk or NaN/inf.
double parse_double(const std::string& field);

struct CsvTable {
    CsvMetadata metadata;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_lines;  ///< 1-based file line of each row

    /// Column index by name; throws ParseError when absent.
    std::size_t column(const std::string& name, const std::string& file) const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvMetadata& metadata, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Columns time_s, n_photon, pop_0..pop_{L-1}, re_alpha, im_alpha.
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record, const CsvMetadata& metadata);
/// Columns time_s, channel (jump-operator label).
void write_jumps_csv(const std::string& path, const TrajectoryRecord& record);

/// Columns time_s and the series unit name (e.g. n_photon).
void write_series_csv(const std::string& path, const TimeSeries& series, const CsvMetadata& metadata);

struct SeriesFile {
    TimeSeries series;
    CsvMetadata metadata;
};

/// Reads a series or trajectory CSV: the first column is time_s, the value
/// column is n_photon when present, else the second column. Rejects
/// malformed or non-finite rows and non-uniform time steps with the line.
SeriesFile read_series_csv(const std::string& path);

/// Header nu_delta_hz,<eta values in Hz>; one row per detuning, cells D/B/X.
void write_phase_diagram_csv(const std::string& path, const PhaseDiagram& diagram, const CsvMetadata& metadata);
/// Axes returned in Hz as written.
PhaseDiagram read_phase_diagram_csv(const std::string& path);

}  // namespace pbb
