#pragma once

#include "hkflow/density.hpp"
#include "hkflow/grid.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace hkcli {

// Minimal RFC-4180 writer: fields with comma, quote or newline are quoted;
// doubles carry 17 significant digits so values round-trip.
class CsvWriter {
public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<Cell>& cells);

    static std::string format(double v);
    static std::string quote(const std::string& s);

private:
    std::ofstream out_;
    std::size_t columns_;
    std::filesystem::path path_;
};

// Pretty-printed summary document, same notation as configs.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

// Doubles inside summaries: NaN and infinities become strings so the document stays valid.
nlohmann::json number(double v);

void ensure_directory(const std::filesystem::path& dir);

// Reads a two-column x,u CSV (header required) onto the grid's cell centers.
std::vector<double> read_density_csv(const std::string& path, const hkflow::Grid& grid);

} // namespace hkcli
