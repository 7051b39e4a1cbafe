#include "erglab/report.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace erglab {

using json = nlohmann::ordered_json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string report_json(const Report& r) {
    json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tag"] = r.tag;
    j["backend"] = r.backend;
    j["config"] = json::parse(r.config_echo.empty() ? "{}" : r.config_echo);
    json scalars = json::object();
    for (const auto& [k, v] : r.scalars) scalars[k] = v;
    j["scalars"] = scalars;
    json checks = json::object();
    for (const auto& [k, v] : r.checks) checks[k] = v;
    j["checks"] = checks;
    json tables = json::object();
    for (const auto& t : r.tables) {
        json tt;
        tt["columns"] = t.columns;
        tt["rows"] = t.rows;
        tables[t.name] = tt;
    }
    j["tables"] = tables;
    return j.dump(2) + "\n";
}

namespace {

void check_cell(const std::string& cell) {
    if (cell.find(',') != std::string::npos ||
        cell.find('"') != std::string::npos ||
        cell.find('\n') != std::string::npos)
        throw std::runtime_error("CSV cell with separator: " + cell);
}

}  // namespace

std::string report_csv(const Report& r) {
    // long format, one row per (table, key-cell, column, value)
    std::ostringstream out;
    out << "table,key,column,value\n";
    for (const auto& [k, v] : r.scalars) {
        check_cell(k);
        check_cell(v);
        out << "scalars," << k << ",value," << v << "\n";
    }
    for (const auto& [k, v] : r.checks) {
        check_cell(k);
        out << "checks," << k << ",pass," << (v ? "1" : "0") << "\n";
    }
    for (const auto& t : r.tables) {
        check_cell(t.name);
        for (const auto& row : t.rows) {
            for (std::size_t c = 1; c < t.columns.size(); ++c) {
                check_cell(row[0]);
                check_cell(t.columns[c]);
                check_cell(row[c]);
                out << t.name << "," << row[0] << "," << t.columns[c] << ","
                    << row[c] << "\n";
            }
        }
    }
    return out.str();
}

std::string write_report(const Report& r, const std::string& out_dir,
                         const std::string& format) {
    std::filesystem::create_directories(out_dir);
    std::string path =
        out_dir + "/report." + (format == "csv" ? "csv" : "json");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << (format == "csv" ? report_csv(r) : report_json(r));
    return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

Report load_report_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", -1) != kReportSchemaVersion)
        throw std::runtime_error("unsupported report schema version");
    Report r;
    r.tag = j.value("tag", std::string());
    r.backend = j.value("backend", std::string());
    r.config_echo = j.value("config", json::object()).dump();
    for (const auto& [k, v] : j.value("scalars", json::object()).items())
        r.scalars.emplace_back(k, v.get<std::string>());
    for (const auto& [k, v] : j.value("checks", json::object()).items())
        r.checks.emplace_back(k, v.get<bool>());
    for (const auto& [name, t] : j.value("tables", json::object()).items()) {
        Table table;
        table.name = name;
        table.columns = t.at("columns").get<std::vector<std::string>>();
        for (const auto& row : t.at("rows"))
            table.rows.push_back(row.get<std::vector<std::string>>());
        r.tables.push_back(std::move(table));
    }
    return r;
}

}  // namespace erglab
