#include "rydlat/csv.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rydlat::csv {

std::string number(double value) {
    if (value == 0.0) {
        return "0";  // folds -0 into 0 so outputs do not depend on sign of zero
    }
    return fmt::format("{}", value);
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::string Table::str() const {
    std::string text;
    auto append_row = [&text](const std::vector<std::string>& cells) {
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c) text += ',';
            text += cells[c];
        }
        text += '\n';
    };
    append_row(header);
    for (const auto& row : rows) append_row(row);
    return text;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    Table table;
    std::string line;
    if (std::getline(in, line)) table.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) table.rows.push_back(split(line));
    }
    return table;
}

}  // namespace rydlat::csv
