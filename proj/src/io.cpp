#include "wavegame/io.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "wavegame/error.hpp"

namespace wavegame::io {

namespace {

template <class Range>
void put_header(std::ostream& os, const Range& header) {
    bool first = true;
    for (const auto& h : header) {
        if (!first) os << ',';
        os << h;
        first = false;
    }
    os << '\n';
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& os, std::initializer_list<std::string_view> header) : os_(os) {
    os_ << std::setprecision(17);
    put_header(os_, header);
}

CsvWriter::CsvWriter(std::ostream& os, std::span<const std::string> header) : os_(os) {
    os_ << std::setprecision(17);
    put_header(os_, header);
}

void CsvWriter::row(std::initializer_list<double> values) {
    row(std::span<const double>(values.begin(), values.size()));
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os_ << ',';
        os_ << values[i];
    }
    os_ << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file " + path.string());
    return out;
}

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

}  // namespace wavegame::io
