#include "csvio.hpp"

#include <charconv>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace ruinvest::tool {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
    return std::string(buf, ptr);
}

CsvFile::CsvFile(const std::string& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open output file '" + path + "'");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvFile::cell(const std::string& v) {
    if (in_row_) out_ << ',';
    out_ << v;
    ++in_row_;
}

void CsvFile::end_row() {
    if (in_row_ != columns_)
        throw std::runtime_error("csv row in '" + path_ + "' has " + std::to_string(in_row_) +
                                 " cells, expected " + std::to_string(columns_));
    out_ << '\n';
    in_row_ = 0;
}

void CsvFile::close() {
    out_.close();
    if (!out_) throw std::runtime_error("write error on '" + path_ + "'");
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::runtime_error("csv column '" + name + "' not found");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string piece;
    while (std::getline(hs, piece, ',')) table.header.push_back(piece);

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, piece, ',')) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
            if (ec != std::errc{} || ptr != piece.data() + piece.size())
                throw std::runtime_error("csv cell '" + piece + "' in '" + path +
                                         "' is not numeric");
            row.push_back(v);
        }
        if (row.size() != table.header.size())
            throw std::runtime_error("csv row width mismatch in '" + path + "'");
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace ruinvest::tool
