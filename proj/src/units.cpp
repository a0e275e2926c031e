#include "zefoz/units.hpp"

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>

namespace zefoz {

namespace {

const std::map<std::string, std::map<std::string, double>>& unit_tables() {
    static const std::map<std::string, std::map<std::string, double>> tables = {
        {"frequency", {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}}},
        {"field", {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"µT", 1e-6}, {"nT", 1e-9}}},
        {"time", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}}},
        {"length", {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}, {"A", 1e-10}}},
        {"gyromagnetic", {{"Hz/T", 1.0}, {"kHz/T", 1e3}, {"MHz/T", 1e6}, {"GHz/T", 1e9}}},
        {"dimensionless", {{"", 1.0}}},
    };
    return tables;
}

}  // namespace

double parse_quantity(const std::string& text, const std::string& dimension) {
    auto it = unit_tables().find(dimension);
    if (it == unit_tables().end())
        throw std::invalid_argument("unknown dimension '" + dimension + "'");

    size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed quantity '" + text + "'");
    }

    std::string unit = text.substr(pos);
    size_t b = unit.find_first_not_of(" \t");
    size_t e = unit.find_last_not_of(" \t");
    unit = (b == std::string::npos) ? "" : unit.substr(b, e - b + 1);

    if (unit.empty() && dimension != "dimensionless")
        throw std::invalid_argument("quantity '" + text + "' is missing a " + dimension + " unit");

    auto u = it->second.find(unit);
    if (u == it->second.end())
        throw std::invalid_argument("'" + unit + "' is not a valid " + dimension + " unit in '" + text + "'");
    return value * u->second;
}

}  // namespace zefoz
