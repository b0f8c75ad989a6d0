#include "pbb/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pbb/error.hpp"

namespace pbb {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    return out;
}

void write_metadata(std::ostream& out, const CsvMetadata& metadata) {
    for (const auto& [k, v] : metadata) out << "# " << k << '=' << v << '\n';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& field) {
    std::size_t a = 0;
    std::size_t b = field.size();
    while (a < b && field[a] == ' ') ++a;
    while (b > a && field[b - 1] == ' ') --b;
    const char* first = field.data() + a;
    const char* last = field.data() + b;
    if (first != last && *first == '+') ++first;
    double x = 0.0;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc() || res.ptr != last || first == last) {
        throw InvalidArgument("not a number: '" + field + "'");
    }
    if (!std::isfinite(x)) throw InvalidArgument("non-finite value: '" + field + "'");
    return x;
}

std::size_t CsvTable::column(const std::string& name, const std::string& file) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError(file, 1, "missing column '" + name + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    CsvTable t;
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (have_header) continue;
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            const auto eq = body.find('=');
            if (eq != std::string::npos) t.metadata[body.substr(0, eq)] = body.substr(eq + 1);
            continue;
        }
        auto fields = split_row(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw ParseError(path, n, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
        t.row_lines.push_back(n);
    }
    if (!have_header) throw ParseError(path, n, "no header row");
    return t;
}

void write_csv(const std::string& path, const CsvMetadata& metadata, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    write_row(out, header);
    for (const auto& r : rows) write_row(out, r);
    if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& rec, const CsvMetadata& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    std::vector<std::string> header{"time_s", "n_photon"};
    for (std::size_t u = 0; u < rec.populations.size(); ++u) header.push_back("pop_" + std::to_string(u));
    header.emplace_back("re_alpha");
    header.emplace_back("im_alpha");
    write_row(out, header);
    std::string line;
    for (std::size_t i = 0; i < rec.size(); ++i) {
        line.clear();
        line += format_double(rec.times[i]);
        line += ',';
        line += format_double(rec.n_photon[i]);
        for (const auto& pop : rec.populations) {
            line += ',';
            line += format_double(pop[i]);
        }
        line += ',';
        line += format_double(rec.alpha[i].real());
        line += ',';
        line += format_double(rec.alpha[i].imag());
        out << line << '\n';
    }
    if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

void write_jumps_csv(const std::string& path, const TrajectoryRecord& rec) {
    auto out = open_out(path);
    write_row(out, {"time_s", "channel"});
    for (const auto& j : rec.jumps) {
        out << format_double(j.time) << ',' << rec.channel_labels.at(static_cast<std::size_t>(j.channel)) << '\n';
    }
    if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

void write_series_csv(const std::string& path, const TimeSeries& series, const CsvMetadata& metadata) {
    auto out = open_out(path);
    write_metadata(out, metadata);
    write_row(out, {"time_s", series.unit == "photons" ? "n_photon" : series.unit});
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_double(series.time(i)) << ',' << format_double(series.values[i]) << '\n';
    }
    if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

SeriesFile read_series_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2) throw ParseError(path, 1, "need at least two columns");
    const std::size_t tc = t.column("time_s", path);
    std::size_t vc = tc == 0 ? 1 : 0;
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "n_photon") vc = i;
    }
    if (t.rows.size() < 2) throw ParseError(path, t.row_lines.empty() ? 1 : t.row_lines.back(), "need at least two samples");

    SeriesFile f;
    f.metadata = t.metadata;
    f.series.unit = t.header[vc] == "n_photon" ? "photons" : t.header[vc];
    std::vector<double> times;
    times.reserve(t.rows.size());
    f.series.values.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            times.push_back(parse_double(t.rows[r][tc]));
            f.series.values.push_back(parse_double(t.rows[r][vc]));
        } catch (const InvalidArgument& e) {
            throw ParseError(path, t.row_lines[r], e.what());
        }
    }
    f.series.t0 = times.front();
    const double step = times[1] - times[0];
    if (!(step > 0.0)) throw ParseError(path, t.row_lines[1], "time_s must increase");
    for (std::size_t r = 2; r < times.size(); ++r) {
        const double expect = f.series.t0 + step * static_cast<double>(r);
        if (std::abs(times[r] - expect) > 1e-6 * step) {
            throw ParseError(path, t.row_lines[r], "time_s is not uniformly spaced");
        }
    }
    f.series.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    return f;
}

void write_phase_diagram_csv(const std::string& path, const PhaseDiagram& d, const CsvMetadata& metadata) {
    std::vector<std::string> header{"nu_delta_hz"};
    for (const double e : d.eta) header.push_back(format_double(e));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < d.delta.size(); ++i) {
        std::vector<std::string> row{format_double(d.delta[i])};
        for (std::size_t j = 0; j < d.eta.size(); ++j) row.emplace_back(1, phase_symbol(d.at(i, j)));
        rows.push_back(std::move(row));
    }
    write_csv(path, metadata, header, rows);
}

PhaseDiagram read_phase_diagram_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    if (t.header.empty() || t.header[0] != "nu_delta_hz") throw ParseError(path, 1, "first column must be nu_delta_hz");
    PhaseDiagram d;
    try {
        for (std::size_t j = 1; j < t.header.size(); ++j) d.eta.push_back(parse_double(t.header[j]));
    } catch (const InvalidArgument& e) {
        throw ParseError(path, 1, e.what());
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            d.delta.push_back(parse_double(t.rows[r][0]));
            for (std::size_t j = 1; j < t.rows[r].size(); ++j) {
                const auto& cell = t.rows[r][j];
                if (cell.size() != 1) throw InvalidArgument("bad phase cell '" + cell + "'");
                d.cells.push_back(phase_from_symbol(cell[0]));
            }
        } catch (const InvalidArgument& e) {
            throw ParseError(path, t.row_lines[r], e.what());
        }
    }
    return d;
}

}  // namespace pbb
