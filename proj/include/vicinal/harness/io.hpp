#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vicinal/energetics.hpp"
#include "vicinal/errors.hpp"
#include "vicinal/harness/config.hpp"

namespace vicinal::harness {

/// File could not be written or read; the message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double v);

/// CSV header t,F,E,D,F_eps,m,m_reg,u_min,u_max,dt and one row per report, or a JSON
/// object {"series": [{...}, ...]} with the same keys.
std::filesystem::path write_series(std::span<const energetics::EnergyReport> reports, const std::filesystem::path& path,
                                   OutputFormat format);
/// Format chosen from the extension (.json or anything else for CSV).
std::vector<energetics::EnergyReport> read_series(const std::filesystem::path& path);

struct SnapshotData {
    double t = 0.0;
    double epsilon = 0.0;
    std::vector<double> h;
    std::vector<double> u;
};

/// CSV: "# t=<v> n=<v> epsilon=<v>", header h,u, then one row per node.
/// JSON: {"t", "n", "epsilon", "h": [...], "u": [...]}.
std::filesystem::path write_snapshot(double t, const PeriodicField& u, double epsilon, const std::filesystem::path& path,
                                     OutputFormat format);
SnapshotData read_snapshot(const std::filesystem::path& path);

/// Writes a small table (header plus rows) as CSV, or as a JSON list of objects.
std::filesystem::path write_table(const std::vector<std::string>& columns, const std::vector<std::vector<double>>& rows,
                                  const std::filesystem::path& path, OutputFormat format);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

std::string extension(OutputFormat format);

} // namespace vicinal::harness
