#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

namespace ruinvest::tool {

// Shortest round-trip decimal form (17 significant digits max), locale-free.
// The same double always renders to the same bytes.
std::string format_double(double x);

// CSV with a header row, comma separators, LF line endings. Opened in binary
// mode so the byte stream is identical across platforms.
class CsvFile {
public:
    CsvFile(const std::string& path, const std::vector<std::string>& header);

    void cell(const std::string& v);
    void cell(double v) { cell(format_double(v)); }
    void cell(std::uint64_t v) { cell(std::to_string(v)); }
    void cell(int v) { cell(std::to_string(v)); }
    void end_row();

    void close();
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

// Minimal reader for files produced by CsvFile: header row, numeric cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
};

CsvTable read_csv(const std::string& path);

}  // namespace ruinvest::tool
