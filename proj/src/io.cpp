#include "tubeflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "tubeflow/errors.hpp"

namespace tubeflow::io {

Json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ArgumentError("cannot open " + path);
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ArgumentError("malformed JSON in " + path + ": " + e.what());
    }
}

namespace {

double number_field(const Json& object, const char* key)
{
    if (!object.is_object() || !object.contains(key) || !object.at(key).is_number()) {
        throw ArgumentError(std::string("expected numeric field \"") + key + "\"");
    }
    return object.at(key).get<double>();
}

std::vector<double> number_array(const Json& object, const char* key)
{
    if (!object.contains(key) || !object.at(key).is_array()) {
        throw ArgumentError(std::string("expected array field \"") + key + "\"");
    }
    std::vector<double> values;
    for (const auto& item : object.at(key)) {
        if (!item.is_number()) {
            throw ArgumentError(std::string("non-numeric entry in \"") + key + "\"");
        }
        values.push_back(item.get<double>());
    }
    return values;
}

std::vector<Atom> atom_list(const Json& array)
{
    if (!array.is_array()) {
        throw ArgumentError("atom list must be an array");
    }
    std::vector<Atom> atoms;
    for (const auto& item : array) {
        atoms.push_back({number_field(item, "L"), number_field(item, "S")});
    }
    return atoms;
}

} // namespace

Measure measure_from_json(const Json& config)
{
    if (!config.is_object()) {
        throw ArgumentError("measure config must be a JSON object");
    }
    std::vector<Atom> atoms;
    if (config.contains("atoms")) {
        atoms = atom_list(config.at("atoms"));
    }
    std::vector<DensityPiece> pieces;
    if (config.contains("pieces")) {
        if (!config.at("pieces").is_array()) {
            throw ArgumentError("\"pieces\" must be an array");
        }
        for (const auto& item : config.at("pieces")) {
            pieces.push_back({number_field(item, "a"), number_field(item, "b"), number_field(item, "rho")});
        }
    }
    return Measure(std::move(atoms), std::move(pieces));
}

Json measure_to_json(const Measure& mu)
{
    Json atoms = Json::array();
    for (const auto& atom : mu.atoms()) {
        atoms.push_back({{"L", atom.length}, {"S", atom.area}});
    }
    Json pieces = Json::array();
    for (const auto& piece : mu.pieces()) {
        pieces.push_back({{"a", piece.lo}, {"b", piece.hi}, {"rho", piece.density}});
    }
    return {{"atoms", atoms}, {"pieces", pieces}};
}

TubeSystem tubes_from_json(const Json& config)
{
    if (!config.is_object() || !config.contains("tubes")) {
        throw ArgumentError("expected a \"tubes\" array");
    }
    return TubeSystem(atom_list(config.at("tubes")));
}

PumpHistory pump_from_json(const Json& config)
{
    if (!config.is_object()) {
        throw ArgumentError("pump config must be a JSON object");
    }
    return PumpHistory(number_array(config, "breakpoints"), number_array(config, "c"));
}

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "";
    }
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc()) {
        throw ConsistencyError("format_number: conversion failed");
    }
    return std::string(buffer, end);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size())
{
    row(header);
}

void CsvWriter::row(const std::vector<double>& values)
{
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) {
        cells.push_back(format_number(v));
    }
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells)
{
    if (cells.size() != columns_) {
        throw ConsistencyError("CsvWriter: row width does not match header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << cells[i];
    }
    out_ << '\n';
}

std::size_t CsvTable::column(std::initializer_list<std::string_view> names) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        for (auto name : names) {
            if (header[i] == name) {
                return i;
            }
        }
    }
    std::string wanted;
    for (auto name : names) {
        wanted += (wanted.empty() ? "" : " or ") + std::string(name);
    }
    throw ArgumentError("CSV has no column " + wanted);
}

std::vector<double> CsvTable::values(std::size_t column) const
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        out.push_back(r.at(column));
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        const auto first = cell.find_first_not_of(' ');
        cells.push_back(first == std::string::npos ? std::string() : cell.substr(first));
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

} // namespace

CsvTable read_csv(std::istream& in)
{
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ArgumentError("CSV is empty");
    }
    table.header = split(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != table.header.size()) {
            throw ArgumentError("CSV line " + std::to_string(line_no) + " has the wrong number of cells");
        }
        std::vector<double> row;
        for (const auto& cell : cells) {
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            double value = 0.0;
            const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc() || end != cell.data() + cell.size()) {
                throw ArgumentError("CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
            row.push_back(value);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

DisplacementCurve read_curve_csv(std::istream& in, double alpha_max, double kappa)
{
    const auto table = read_csv(in);
    const auto total = table.values(table.column({"total"}));
    const auto water = table.values(table.column({"water", "Vw"}));
    return DisplacementCurve(total, water, alpha_max, kappa);
}

} // namespace tubeflow::io
