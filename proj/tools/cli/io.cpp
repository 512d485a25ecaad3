#include "io.hpp"

#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace hkcli {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary), columns_(header.size()), path_(path)
{
    if (!out_)
        throw hkflow::UsageError("cannot write '" + path.string() + "'");
    std::vector<Cell> cells(header.begin(), header.end());
    row(cells);
}

std::string CsvWriter::format(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvWriter::quote(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

void CsvWriter::row(const std::vector<Cell>& cells)
{
    if (cells.size() != columns_)
        throw hkflow::UsageError("csv row width mismatch in '" + path_.string() + "'");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out_ << ',';
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    out_ << format(v);
                else if constexpr (std::is_same_v<T, long long>)
                    out_ << v;
                else
                    out_ << quote(v);
            },
            cells[i]);
    }
    out_ << "\n";
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw hkflow::UsageError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

nlohmann::json number(double v)
{
    if (std::isfinite(v))
        return v;
    return CsvWriter::format(v);
}

void ensure_directory(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw hkflow::UsageError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::vector<double> read_density_csv(const std::string& path, const hkflow::Grid& grid)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path, "cannot open density file");
    std::string line;
    std::getline(in, line); // header
    std::vector<double> u;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno), "expected two columns x,u");
        try {
            u.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno), "not a number");
        }
    }
    if (u.size() != grid.n_cells())
        throw ConfigError(path, "has " + std::to_string(u.size()) + " rows but the grid has " +
                                    std::to_string(grid.n_cells()) + " cells");
    return u;
}

} // namespace hkcli
