#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rydlat::csv {

// Shortest round-trip representation capped at 17 significant digits.
std::string number(double value);

// Writes `text` to `path`, throwing std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, std::string_view text);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const;
};

// Minimal reader for the files this project writes (no quoting).
Table read(const std::filesystem::path& path);

}  // namespace rydlat::csv
