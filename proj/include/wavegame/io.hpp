#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

namespace wavegame::io {

/// Comma-separated rows with 17 significant digits so values round-trip.
class CsvWriter {
public:
    CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header);
    CsvWriter(std::ostream& os, std::span<const std::string> header);

    void row(std::initializer_list<double> values);
    void row(std::span<const double> values);

private:
    std::ostream& os_;
};

std::ofstream open_output(const std::filesystem::path& path);

/// Pretty-printed JSON; non-finite numbers are written as null.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// JSON number or null for inf/nan.
nlohmann::json finite_or_null(double v);

}  // namespace wavegame::io
