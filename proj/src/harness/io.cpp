#include "vicinal/harness/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vicinal::harness {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const std::vector<std::string> kSeriesColumns = {"t", "F", "E", "D", "F_eps", "m", "m_reg", "u_min", "u_max", "dt"};

std::vector<double> row_of(const energetics::EnergyReport& r) {
    return {r.t, r.F, r.E, r.D, r.F_eps, r.m, r.m_reg, r.u_min, r.u_max, r.dt};
}

energetics::EnergyReport report_of(const std::vector<double>& v) {
    energetics::EnergyReport r;
    r.t = v[0], r.F = v[1], r.E = v[2], r.D = v[3], r.F_eps = v[4];
    r.m = v[5], r.m_reg = v[6], r.u_min = v[7], r.u_max = v[8], r.dt = v[9];
    r.D_eps = r.D;
    return r;
}

// JSON has no infinities, so non-finite values travel as strings.
json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

double parse_double(const std::string& s, const fs::path& path) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw IoError("malformed number '" + s + "' in " + path.string());
    return v;
}

double from_json(const json& j, const fs::path& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_double(j.get<std::string>(), path);
    throw IoError("malformed number in " + path.string());
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

void close_checked(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

std::vector<double> split_numbers(const std::string& line, const fs::path& path) {
    std::vector<double> v;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) v.push_back(parse_double(cell, path));
    return v;
}

json read_json(const fs::path& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string extension(OutputFormat format) { return format == OutputFormat::Csv ? ".csv" : ".json"; }

void write_json(const json& j, const fs::path& path) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_checked(out, path);
}

fs::path write_series(std::span<const energetics::EnergyReport> reports, const fs::path& path, OutputFormat format) {
    if (format == OutputFormat::Json) {
        json rows = json::array();
        for (const auto& r : reports) {
            json row;
            const auto v = row_of(r);
            for (std::size_t k = 0; k < kSeriesColumns.size(); ++k) row[kSeriesColumns[k]] = number(v[k]);
            rows.push_back(std::move(row));
        }
        write_json(json{{"series", rows}}, path);
        return path;
    }
    auto out = open_out(path);
    for (std::size_t k = 0; k < kSeriesColumns.size(); ++k) out << (k ? "," : "") << kSeriesColumns[k];
    out << '\n';
    for (const auto& r : reports) {
        const auto v = row_of(r);
        for (std::size_t k = 0; k < v.size(); ++k) out << (k ? "," : "") << format_double(v[k]);
        out << '\n';
    }
    close_checked(out, path);
    return path;
}

std::vector<energetics::EnergyReport> read_series(const fs::path& path) {
    std::vector<energetics::EnergyReport> reports;
    if (path.extension() == ".json") {
        const auto j = read_json(path);
        if (!j.contains("series") || !j["series"].is_array()) throw IoError("no series array in " + path.string());
        for (const auto& row : j["series"]) {
            std::vector<double> v;
            for (const auto& c : kSeriesColumns) {
                if (!row.contains(c)) throw IoError("missing column " + c + " in " + path.string());
                v.push_back(from_json(row[c], path));
            }
            reports.push_back(report_of(v));
        }
        return reports;
    }
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty series file " + path.string());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = split_numbers(line, path);
        if (v.size() != kSeriesColumns.size()) throw IoError("wrong column count in " + path.string());
        reports.push_back(report_of(v));
    }
    return reports;
}

fs::path write_snapshot(double t, const PeriodicField& u, double epsilon, const fs::path& path, OutputFormat format) {
    const auto& g = u.grid();
    if (format == OutputFormat::Json) {
        json h = json::array(), vals = json::array();
        for (std::size_t i = 0; i < u.size(); ++i) {
            h.push_back(g.node(i));
            vals.push_back(u[i]);
        }
        write_json(json{{"t", t}, {"n", g.n()}, {"epsilon", epsilon}, {"h", h}, {"u", vals}}, path);
        return path;
    }
    auto out = open_out(path);
    out << "# t=" << format_double(t) << " n=" << g.n() << " epsilon=" << format_double(epsilon) << '\n';
    out << "h,u\n";
    for (std::size_t i = 0; i < u.size(); ++i) out << format_double(g.node(i)) << ',' << format_double(u[i]) << '\n';
    close_checked(out, path);
    return path;
}

SnapshotData read_snapshot(const fs::path& path) {
    SnapshotData s;
    if (path.extension() == ".json") {
        const auto j = read_json(path);
        s.t = from_json(j.at("t"), path);
        s.epsilon = from_json(j.at("epsilon"), path);
        for (const auto& v : j.at("h")) s.h.push_back(from_json(v, path));
        for (const auto& v : j.at("u")) s.u.push_back(from_json(v, path));
        return s;
    }
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# t=", 0) != 0) throw IoError("missing snapshot header in " + path.string());
    std::stringstream header(line.substr(2));
    std::string item;
    while (header >> item) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        const auto key = item.substr(0, eq);
        const double v = parse_double(item.substr(eq + 1), path);
        if (key == "t") s.t = v;
        else if (key == "epsilon") s.epsilon = v;
    }
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = split_numbers(line, path);
        if (v.size() != 2) throw IoError("wrong column count in " + path.string());
        s.h.push_back(v[0]);
        s.u.push_back(v[1]);
    }
    return s;
}

fs::path write_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows,
                     const fs::path& path, OutputFormat format) {
    if (format == OutputFormat::Json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json o;
            for (std::size_t k = 0; k < columns.size() && k < r.size(); ++k) o[columns[k]] = number(r[k]);
            arr.push_back(std::move(o));
        }
        write_json(json{{"rows", arr}}, path);
        return path;
    }
    auto out = open_out(path);
    for (std::size_t k = 0; k < columns.size(); ++k) out << (k ? "," : "") << columns[k];
    out << '\n';
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << format_double(r[k]);
        out << '\n';
    }
    close_checked(out, path);
    return path;
}

} // namespace vicinal::harness
